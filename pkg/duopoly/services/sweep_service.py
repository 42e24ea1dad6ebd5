import logging
from multiprocessing import Pool
from typing import List, Optional, Tuple

import numpy as np

from duopoly.models.config import SweepParam
from duopoly.models.game import BestReplyMap, UncertaintySet
from duopoly.models.results import BifurcationData, RegimeGrid
from duopoly.services.dynamics1d_service import classify_regime, fixed_points, lyapunov
from duopoly.services.model_service import build_best_reply, eval_best_reply, new_uncertainty_set
from duopoly.utils.errors import DuopolyError, EmptySweep, InvalidParameters

REGIME_TAGS = ("I", "II", "IIIa", "IIIb", "chaotic", "out-of-domain")
SWEEP_PARAMS = ("b_hi", "b_lo", "g_hi", "g_lo")


def _swept_map(base: UncertaintySet, param: str, value: float) -> Optional[BestReplyMap]:
    params = base.model_dump()
    params[param] = value
    try:
        return build_best_reply(new_uncertainty_set(**params))
    except DuopolyError as e:
        logging.info(f"Skipping {param}={value}: {e.code}: {e}")
        return None


def _run(m: BestReplyMap, x: float, burn: int, samples: int) -> List[float]:
    for _ in range(burn):
        x = eval_best_reply(m, x)
    out = []
    for _ in range(samples):
        x = eval_best_reply(m, x)
        out.append(x)
    return out


def _run_column(args: Tuple[BestReplyMap, float, int, int]) -> List[float]:
    return _run(*args)


def bifurcation_1d(base: UncertaintySet, param: SweepParam, lo: float, hi: float, steps: int,
                   x0: float, burn: int = 10_000, samples: int = 200,
                   continuation: bool = True, workers: int = 1) -> BifurcationData:
    """Long-run x-samples of f for each value of one swept parameter.

    With continuation, each column starts from the last state of the previous
    one. Values breaking the ordering chain are recorded as skipped.
    """
    if param not in SWEEP_PARAMS:
        raise InvalidParameters(f"cannot sweep {param!r}; choose one of {SWEEP_PARAMS}")
    if steps < 1 or samples < 1 or burn < 0:
        raise InvalidParameters(f"need steps, samples >= 1 and burn >= 0, got {steps}, {samples}, {burn}")
    if steps > 1 and not hi > lo:
        raise InvalidParameters(f"sweep values must increase, got [{lo}, {hi}]")

    grid = [lo] if steps == 1 else np.linspace(lo, hi, steps).tolist()
    columns = [(v, _swept_map(base, param, v)) for v in grid]
    kept = [(v, m) for v, m in columns if m is not None]
    skipped = [v for v, m in columns if m is None]
    if not kept:
        raise EmptySweep(f"every value of {param} in [{lo}, {hi}] violates the ordering chain")

    if continuation:
        if workers > 1:
            logging.info("Continuation sweep runs sequentially")
        samples_by_column = []
        x = x0
        for _, m in kept:
            column = _run(m, x, burn, samples)
            samples_by_column.append(column)
            x = column[-1]
    else:
        tasks = [(m, x0, burn, samples) for _, m in kept]
        if workers > 1:
            with Pool(processes=workers) as pool:
                samples_by_column = pool.map(_run_column, tasks)
        else:
            samples_by_column = [_run_column(t) for t in tasks]

    return BifurcationData(parameter=param, values=[v for v, _ in kept], samples=samples_by_column,
                           skipped=skipped, continuation=continuation)


def regime_tag(m: BestReplyMap) -> str:
    case = classify_regime(m, detect_k=False).case
    return "chaotic" if case in ("IIIc", "IIId") else case


def _cell_tag(b_hi: float, b_lo: float, g_hi: float, g_lo: float) -> Tuple[str, Optional[BestReplyMap]]:
    try:
        m = build_best_reply(new_uncertainty_set(b_hi, b_lo, g_hi, g_lo))
    except DuopolyError:
        return "out-of-domain", None
    return regime_tag(m), m


def _simulated_tag(m: BestReplyMap, expected: str) -> bool:
    """Simulation agrees with the analytic tag: convergence for point regimes, chaos otherwise."""
    x0 = m.x_u
    if expected in ("I", "IIIa"):
        target = fixed_points(m).point
        x = _run(m, x0, 5000, 1)[0]
        return abs(x - target) <= 1e-8 * max(1.0, target)
    if expected == "chaotic":
        return lyapunov(m, x0, n=2000, burn=2000) > 0
    return True


def regime_map(b_lo: float, g_lo: float, g_hi_range: Tuple[float, float],
               b_hi_range: Tuple[float, float], nx: int, ny: int,
               verify: int = 0, seed: int = 0) -> RegimeGrid:
    """Analytic regime of every cell center in the (g_hi, b_hi) plane.

    IIIc and IIId share the "chaotic" tag. With verify > 0, that many
    in-domain cells drawn by a seeded generator are also simulated.
    """
    if nx < 1 or ny < 1:
        raise InvalidParameters(f"grid must be positive, got {nx}x{ny}")

    grid = RegimeGrid(b_lo=b_lo, g_lo=g_lo, g_hi_range=g_hi_range, b_hi_range=b_hi_range,
                      nx=nx, ny=ny, tags=[], r_one_curve=[], flip_curve=[], chaotic_fraction=0.0)
    tags = []
    maps = {}
    for j in range(ny):
        for i in range(nx):
            g_hi, b_hi = grid.cell(i, j)
            tag, m = _cell_tag(b_hi, b_lo, g_hi, g_lo)
            tags.append(tag)
            if m is not None and verify > 0:
                maps[(i, j)] = m

    (g0, g1), (b0, b1) = g_hi_range, b_hi_range
    r_one = []
    for g_hi in np.linspace(g0, g1, nx + 1).tolist():
        # r = 1  <=>  b_hi = g_hi - g_lo + b_lo
        b_hi = g_hi - g_lo + b_lo
        if b0 <= b_hi <= b1 and g_hi >= b_lo:
            r_one.append((g_hi, b_hi))
    flip = []
    if g0 <= 2.0 * b_lo <= g1:
        flip = [(2.0 * b_lo, b_hi) for b_hi in np.linspace(b0, b1, ny + 1).tolist() if b_hi >= 2.0 * b_lo]

    mismatches = []
    verified = 0
    if verify > 0 and maps:
        rng = np.random.default_rng(seed)
        cells = sorted(maps)
        picks = rng.choice(len(cells), size=min(verify, len(cells)), replace=False)
        for k in picks.tolist():
            i, j = cells[k]
            verified += 1
            if not _simulated_tag(maps[(i, j)], tags[j * nx + i]):
                mismatches.append((i, j))
        if mismatches:
            logging.warning(f"{len(mismatches)} of {verified} spot-checked cells disagree with the analytic tag")

    chaotic = sum(1 for t in tags if t == "chaotic") / len(tags)
    return grid.model_copy(update={
        "tags": tags, "r_one_curve": r_one, "flip_curve": flip,
        "chaotic_fraction": chaotic, "verified": verified, "mismatches": mismatches,
    })
