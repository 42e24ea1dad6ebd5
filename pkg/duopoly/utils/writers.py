import csv
import json
import os
from typing import Dict, Iterable, List, Sequence, Tuple

from duopoly.utils.errors import IoFailure

RGB = Tuple[int, int, int]

# basin ids cycle through these; UNRESOLVED is black
BASIN_PALETTE: List[RGB] = [
    (220, 30, 30),    # red
    (40, 170, 60),    # green
    (120, 190, 240),  # light blue
    (150, 150, 150),  # gray
    (240, 220, 40),   # yellow
    (200, 60, 200),   # magenta
    (40, 210, 210),   # cyan
    (245, 150, 30),   # orange
]
UNRESOLVED_COLOR: RGB = (0, 0, 0)

REGIME_PALETTE: Dict[str, RGB] = {
    "I": (240, 220, 40),
    "II": (150, 150, 150),
    "IIIa": (245, 150, 30),
    "IIIb": (220, 30, 30),
    "chaotic": (255, 255, 255),
    "out-of-domain": (0, 0, 0),
}


def format_float(value: float) -> str:
    """17 significant digits: round-trips every binary64 value."""
    return "%.17g" % value


def _cell(value) -> str:
    if isinstance(value, float):
        return format_float(value)
    return str(value)


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence]) -> str:
    rows = list(rows)
    if not rows:
        raise IoFailure(f"refusing to write empty table to '{path}'")
    try:
        with open(path, "w", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([_cell(v) for v in row])
    except OSError as e:
        raise IoFailure(f"cannot write '{path}': {e}") from e
    return path


def basin_color(label: int) -> RGB:
    if label < 0:
        return UNRESOLVED_COLOR
    return BASIN_PALETTE[label % len(BASIN_PALETTE)]


def write_ppm(path: str, width: int, height: int, colors: Sequence[RGB]) -> str:
    """Binary P6 pixmap.

    colors is row-major with row 0 at the smallest y; the file stores the
    largest y first, so rows are written bottom-up.
    """
    if width < 1 or height < 1 or len(colors) != width * height:
        raise IoFailure(f"cannot write {width}x{height} image from {len(colors)} pixels")
    payload = bytearray()
    for j in reversed(range(height)):
        for r, g, b in colors[j * width:(j + 1) * width]:
            payload += bytes((r, g, b))
    try:
        with open(path, "wb") as f:
            f.write(f"P6\n{width} {height}\n255\n".encode("ascii"))
            f.write(bytes(payload))
    except OSError as e:
        raise IoFailure(f"cannot write '{path}': {e}") from e
    return path


def ensure_dir(path: str) -> str:
    try:
        os.makedirs(path, exist_ok=True)
    except OSError as e:
        raise IoFailure(f"cannot create output directory '{path}': {e}") from e
    return path


def write_json(path: str, data) -> str:
    try:
        with open(path, "w") as f:
            f.write(json.dumps(data, indent=2) + "\n")
    except OSError as e:
        raise IoFailure(f"cannot write '{path}': {e}") from e
    return path
