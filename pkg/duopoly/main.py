import argparse
import json
import logging
import math
import os
import sys
from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import ValidationError

from duopoly.models.config import RunConfig
from duopoly.models.dynamics import Cycle
from duopoly.models.game import UncertaintySet
from duopoly.models.results import GridSpec
from duopoly.services.basin_service import check_symmetry, compute_basins, default_grid_spec
from duopoly.services.dynamics1d_service import (
    chaotic_intervals,
    classify_regime,
    find_two_cycles,
    fixed_points,
    iterate_f,
    lyapunov,
)
from duopoly.services.dynamics2d_service import iterate_mixed, iterate_T, lift_cycles
from duopoly.services.model_service import build_best_reply, new_uncertainty_set
from duopoly.services.profit_service import profit_series
from duopoly.services.sweep_service import bifurcation_1d, regime_map
from duopoly.utils.errors import ConfigInvalid, DuopolyError, PieceCountNotPowerOfTwo
from duopoly.utils.json_loader import get_preset, load_config_file
from duopoly.utils.writers import (
    REGIME_PALETTE,
    basin_color,
    ensure_dir,
    write_csv,
    write_json,
    write_ppm,
)

DEFAULT_BURN = {
    "analyze": 10_000,
    "simulate": 0,
    "cycles": 0,
    "bifurcate-1d": 10_000,
    "regime-map": 0,
    "basins": 2000,
    "profits": 1000,
}


def configure_logging() -> None:
    level = os.environ.get("DUOPOLY_LOG_LEVEL", "WARNING").upper()
    if not isinstance(logging.getLevelName(level), int):
        level = "WARNING"
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(message)s")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--preset", help="figure preset from duopoly/data/presets.json")
    common.add_argument("--config", help="JSON file with RunConfig keys")
    common.add_argument("--b-hi", dest="b_hi", type=float)
    common.add_argument("--b-lo", dest="b_lo", type=float)
    common.add_argument("--g-hi", dest="g_hi", type=float)
    common.add_argument("--g-lo", dest="g_lo", type=float)
    common.add_argument("--a", type=float, help="choke price")
    common.add_argument("--output-dir", dest="output_dir")
    common.add_argument("--output", help="output file stem")
    common.add_argument("--workers", type=int)
    common.add_argument("--burn", type=int)

    parser = argparse.ArgumentParser(prog="duopoly",
                                     description="Worst-case best-reply dynamics of a duopoly with ambiguity aversion")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("analyze", parents=[common], argument_default=argparse.SUPPRESS,
                       help="map, fixed points, regime, 2-cycles, chaotic intervals")

    p = sub.add_parser("simulate", parents=[common], argument_default=argparse.SUPPRESS,
                       help="orbit CSV")
    p.add_argument("--mode", choices=["1d", "2d", "mixed"])
    p.add_argument("--x0", type=float)
    p.add_argument("--y0", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--random-ic", dest="random_ic", type=int, help="number of random initial conditions")
    p.add_argument("--seed", type=int)

    sub.add_parser("cycles", parents=[common], argument_default=argparse.SUPPRESS,
                       help="T-cycles lifted from the cycles of f")

    p = sub.add_parser("bifurcate-1d", parents=[common], argument_default=argparse.SUPPRESS,
                       help="bifurcation diagram CSV")
    p.add_argument("--param", choices=["b_hi", "b_lo", "g_hi", "g_lo"])
    p.add_argument("--lo", type=float)
    p.add_argument("--hi", type=float)
    p.add_argument("--steps", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--x0", type=float)
    p.add_argument("--fixed-x0", dest="continuation", action="store_false",
                   help="start every column at x0 instead of continuing the previous orbit")

    p = sub.add_parser("regime-map", parents=[common], argument_default=argparse.SUPPRESS,
                       help="regime map CSV and image")
    p.add_argument("--g-hi-range", dest="g_hi_range", type=float, nargs=2)
    p.add_argument("--b-hi-range", dest="b_hi_range", type=float, nargs=2)
    p.add_argument("--nx", type=int)
    p.add_argument("--ny", type=int)
    p.add_argument("--verify", type=int, help="number of cells to spot-check by simulation")
    p.add_argument("--seed", type=int)

    p = sub.add_parser("basins", parents=[common], argument_default=argparse.SUPPRESS,
                       help="basin CSV, image and symmetry report")
    p.add_argument("--grid", type=int, help="cells per axis")
    p.add_argument("--window", type=float, nargs=2, help="square window [lo, hi] on both axes")
    p.add_argument("--n-tail", dest="n_tail", type=int)
    p.add_argument("--tol", type=float)

    p = sub.add_parser("profits", parents=[common], argument_default=argparse.SUPPRESS,
                       help="profit series CSV")
    p.add_argument("--x0", type=float)
    p.add_argument("--n", type=int)

    return parser


def load_run_config(options: Dict[str, Any]) -> RunConfig:
    """defaults < preset < config file < flags."""
    options = dict(options)
    merged: Dict[str, Any] = {}
    preset = options.pop("preset", None)
    config_path = options.pop("config", None)

    file_values = load_config_file(config_path) if config_path else {}
    file_preset = file_values.pop("preset", None)
    preset = preset or file_preset
    if preset:
        merged.update(get_preset(preset))
    merged.update(file_values)
    merged.update(options)

    try:
        return RunConfig(**merged)
    except ValidationError as e:
        first = e.errors()[0]
        where = ".".join(str(p) for p in first["loc"]) or "config"
        raise ConfigInvalid(f"{where}: {first['msg']}") from e


def _output_path(config: RunConfig, suffix: str) -> str:
    out_dir = config.output_dir or os.environ.get("DUOPOLY_OUTPUT_DIR") or "."
    ensure_dir(out_dir)
    stem = config.output or config.command.replace("-", "_")
    return os.path.join(out_dir, stem + suffix)


def _burn(config: RunConfig) -> int:
    return config.burn if config.burn is not None else DEFAULT_BURN[config.command]


def _uncertainty_set(config: RunConfig) -> UncertaintySet:
    return new_uncertainty_set(config.b_hi, config.b_lo, config.g_hi, config.g_lo, config.a)


def _finite(value: float):
    return value if math.isfinite(value) else str(value)


def run_analyze(config: RunConfig) -> List[str]:
    U = _uncertainty_set(config)
    m = build_best_reply(U)
    regime = classify_regime(m)

    intervals = None
    if regime.chaotic and regime.k is not None:
        try:
            intervals = chaotic_intervals(m).model_dump()
        except PieceCountNotPowerOfTwo as e:
            logging.warning(f"Chaotic intervals unavailable: {e}")

    report = {
        "uncertainty_set": U.model_dump(),
        "map": m.model_dump(exclude={"owner"}),
        "fixed_points": fixed_points(m).model_dump(),
        "regime": regime.model_dump(),
        "two_cycles": [c.model_dump() for c in find_two_cycles(m)],
        "chaotic_intervals": intervals,
        "lyapunov": _finite(lyapunov(m, config.x0, burn=_burn(config))),
    }
    print(json.dumps(report, indent=2))
    return [write_json(_output_path(config, ".json"), report)]


def run_simulate(config: RunConfig) -> List[str]:
    m = build_best_reply(_uncertainty_set(config))
    burn = _burn(config)

    if config.random_ic:
        rng = np.random.default_rng(config.seed)
        width = 1 if config.mode == "1d" else 2
        starts = rng.uniform(0.0, 2.0 * m.x_m, size=(config.random_ic, width)).tolist()
    else:
        y0 = config.x0 if config.y0 is None else config.y0
        starts = [[config.x0]] if config.mode == "1d" else [[config.x0, y0]]

    rows = []
    for k, start in enumerate(starts):
        if config.mode == "1d":
            orbit = iterate_f(m, start[0], config.n, burn)
            rows += [(k, burn + t + 1, x) for t, x in enumerate(orbit.values)]
        else:
            if config.mode == "2d":
                orbit = iterate_T(m, (start[0], start[1]), config.n, burn)
            else:
                orbit = iterate_mixed(m, start[0], config.n, burn)
            rows += [(k, burn + t + 1, x, y) for t, (x, y) in enumerate(orbit.points())]

    header = ["orbit", "t", "x"] if config.mode == "1d" else ["orbit", "t", "x", "y"]
    return [write_csv(_output_path(config, ".csv"), header, rows)]


def run_cycles(config: RunConfig) -> List[str]:
    m = build_best_reply(_uncertainty_set(config))
    fp = fixed_points(m)
    f_cycles = []
    if fp.point is not None:
        f_cycles.append(Cycle(period=1, points=[fp.point], eigenvalue=fp.eigenvalue, stability=fp.stability))
    else:
        logging.info(f"Segment of fixed points {fp.segment} is not lifted")
    f_cycles += find_two_cycles(m)

    rows = []
    for k, c in enumerate(lift_cycles(f_cycles, m)):
        generators = "+".join(str(g) for g in c.generators)
        for idx, (x, y) in enumerate(c.points):
            rows.append((k, c.origin, c.period, generators, c.stability,
                         c.eigenvalues[0], c.eigenvalues[1], idx, x, y))
    header = ["cycle", "origin", "period", "generators", "stability", "zeta1", "zeta2", "point", "x", "y"]
    return [write_csv(_output_path(config, ".csv"), header, rows)]


def run_bifurcate(config: RunConfig) -> List[str]:
    # the base set is validated per swept value
    base = UncertaintySet(b_hi=config.b_hi, b_lo=config.b_lo, g_hi=config.g_hi, g_lo=config.g_lo, a=config.a)
    data = bifurcation_1d(base, config.param, config.lo, config.hi, config.steps, config.x0,
                          burn=_burn(config), samples=config.samples,
                          continuation=config.continuation, workers=config.workers)
    rows = [(v, x) for v, column in zip(data.values, data.samples) for x in column]
    return [write_csv(_output_path(config, ".csv"), [data.parameter, "x"], rows)]


def run_regime_map(config: RunConfig) -> List[str]:
    grid = regime_map(config.b_lo, config.g_lo, config.g_hi_range, config.b_hi_range,
                      config.nx, config.ny, verify=config.verify, seed=config.seed)
    rows = []
    for j in range(grid.ny):
        for i in range(grid.nx):
            g_hi, b_hi = grid.cell(i, j)
            rows.append((i, j, g_hi, b_hi, grid.tag_at(i, j)))
    curves = [("r_one", g, b) for g, b in grid.r_one_curve] + [("flip", g, b) for g, b in grid.flip_curve]

    paths = [write_csv(_output_path(config, ".csv"), ["i", "j", "g_hi", "b_hi", "tag"], rows)]
    if curves:
        paths.append(write_csv(_output_path(config, "_curves.csv"), ["curve", "g_hi", "b_hi"], curves))
    colors = [REGIME_PALETTE[t] for t in grid.tags]
    paths.append(write_ppm(_output_path(config, ".ppm"), grid.nx, grid.ny, colors))
    logging.info(f"Chaotic fraction {grid.chaotic_fraction:.4f}")
    return paths


def run_basins(config: RunConfig) -> List[str]:
    m = build_best_reply(_uncertainty_set(config))
    options = dict(burn=_burn(config), n_tail=config.n_tail, tol=config.tol, workers=config.workers)
    if config.window is None:
        spec = default_grid_spec(m, config.grid, **options)
    else:
        try:
            spec = GridSpec(x_range=config.window, y_range=config.window, nx=config.grid, ny=config.grid, **options)
        except ValidationError as e:
            raise ConfigInvalid(str(e.errors()[0]["msg"])) from e

    grid = compute_basins(m, spec)
    xs, ys = spec.centers()
    rows = [(i, j, xs[i], ys[j], grid.label_at(i, j)) for j in range(spec.ny) for i in range(spec.nx)]

    paths = [write_csv(_output_path(config, ".csv"), ["i", "j", "x", "y", "label"], rows)]
    paths.append(write_ppm(_output_path(config, ".ppm"), spec.nx, spec.ny,
                           [basin_color(label) for label in grid.labels]))

    symmetry = check_symmetry(grid)
    summary = {
        "catalog": [a.model_dump() for a in grid.catalog],
        "unresolved": grid.unresolved,
        "histogram": grid.histogram,
        "symmetry": symmetry.model_dump(exclude={"violations"}),
        "violations": symmetry.violations[:100],
    }
    paths.append(write_json(_output_path(config, "_symmetry.json"), summary))
    return paths


def run_profits(config: RunConfig) -> List[str]:
    U = _uncertainty_set(config)
    series = profit_series(U, config.x0, config.n, _burn(config))
    header = ["t", "expectation", "realized", "naivety_gap", "guaranteed_achievable",
              "max_guaranteed_expected", "best_possible_expected"]
    return [write_csv(_output_path(config, ".csv"), header, series.rows())]


COMMANDS = {
    "analyze": run_analyze,
    "simulate": run_simulate,
    "cycles": run_cycles,
    "bifurcate-1d": run_bifurcate,
    "regime-map": run_regime_map,
    "basins": run_basins,
    "profits": run_profits,
}


def dispatch(config: RunConfig) -> List[str]:
    if config.command not in COMMANDS:
        raise ConfigInvalid(f"unknown command {config.command!r}")
    paths = COMMANDS[config.command](config)
    for path in paths:
        logging.info(f"Wrote {path}")
    return paths


def main(argv: Optional[List[str]] = None) -> int:
    configure_logging()
    args = build_parser().parse_args(argv)
    try:
        config = load_run_config(vars(args))
        dispatch(config)
    except DuopolyError as e:
        print(f"error {e.code}: {e.detail}", file=sys.stderr)
        return e.exit_code
    except Exception as e:
        logging.error(f"Unexpected failure: {e}")
        print(f"error InternalError: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
