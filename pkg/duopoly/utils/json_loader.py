import json
import os
from typing import Any, Dict

from duopoly.utils.errors import ConfigInvalid, IoFailure

# Path to duopoly/data/presets.json
PRESETS_FILE_PATH = os.path.join(os.path.dirname(__file__), '..', 'data', 'presets.json')

# In-memory cache so we don't read the file on every command
_cached_presets: Dict[str, Any] = {}


def load_presets() -> Dict[str, Any]:
    """
    Load presets.json into memory (with simple caching).
    """
    global _cached_presets
    if not _cached_presets:
        with open(PRESETS_FILE_PATH, 'r') as f:
            _cached_presets = json.load(f)
    return _cached_presets


def get_preset(name: str) -> Dict[str, Any]:
    """
    Return the option dict of one figure preset, without its description.
    """
    presets = load_presets()
    if name not in presets:
        raise ConfigInvalid(f"unknown preset '{name}'; available: {', '.join(sorted(presets))}")
    return {k: v for k, v in presets[name].items() if k != 'description'}


def reload_presets() -> Dict[str, Any]:
    """
    Clear the cache and force reload from disk.
    """
    global _cached_presets
    _cached_presets = {}
    return load_presets()


def load_config_file(path: str) -> Dict[str, Any]:
    """
    Read a JSON run config. The top level must be an object.
    """
    try:
        with open(path, 'r') as f:
            data = json.load(f)
    except OSError as e:
        raise IoFailure(f"cannot read config '{path}': {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigInvalid(f"config '{path}' is not valid JSON: {e}") from e

    if not isinstance(data, dict):
        raise ConfigInvalid(f"config '{path}' must hold a JSON object")
    return data
