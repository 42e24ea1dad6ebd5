import logging
import math
from collections import Counter
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from duopoly.models.dynamics import (
    UNRESOLVED,
    Attractor,
    Cycle,
    Cycle2D,
    Orbit2D,
    Rectangle,
    Stability2D,
)
from duopoly.models.game import BestReplyMap
from duopoly.services.dynamics1d_service import chaotic_intervals, classify_regime, fixed_points
from duopoly.services.model_service import eval_best_reply
from duopoly.utils.errors import InvalidParameters, NotACycle, NotClassified, PieceCountNotPowerOfTwo

CLOSURE_TOL = 1e-12
TAIL_SHARE = 0.99

Point = Tuple[float, float]


def step_T(m: BestReplyMap, point: Point) -> Point:
    x, y = point
    return eval_best_reply(m, y), eval_best_reply(m, x)


def iterate_T(m: BestReplyMap, point: Point, n: int, burn: int = 0) -> Orbit2D:
    if n < 1 or burn < 0:
        raise InvalidParameters(f"need n >= 1 and burn >= 0, got n={n}, burn={burn}")
    x, y = point
    for _ in range(burn):
        x, y = eval_best_reply(m, y), eval_best_reply(m, x)
    xs, ys = [], []
    for _ in range(n):
        x, y = eval_best_reply(m, y), eval_best_reply(m, x)
        xs.append(x)
        ys.append(y)
    return Orbit2D(x0=point[0], y0=point[1], burn=burn, xs=xs, ys=ys)


def iterate_mixed(m: BestReplyMap, x0: float, n: int, burn: int = 0,
                  y0: Optional[float] = None) -> Orbit2D:
    """Firm 1 with perfect foresight, firm 2 with constant expectations.

    (x', y') = (f(f(x)), f(x)); y only records firm 2's reply.
    """
    if n < 1 or burn < 0:
        raise InvalidParameters(f"need n >= 1 and burn >= 0, got n={n}, burn={burn}")
    x = x0
    for _ in range(burn):
        x = eval_best_reply(m, eval_best_reply(m, x))
    xs, ys = [], []
    for _ in range(n):
        y = eval_best_reply(m, x)
        x = eval_best_reply(m, y)
        xs.append(x)
        ys.append(y)
    start_y = eval_best_reply(m, x0) if y0 is None else y0
    return Orbit2D(x0=x0, y0=start_y, burn=burn, xs=xs, ys=ys)


# cycle lifting


def expected_lift_counts(n: int) -> Dict[int, int]:
    """{period: count} of the T-cycles made from one f-cycle of period n."""
    if n < 1:
        raise InvalidParameters(f"period must be >= 1, got {n}")
    if n % 2:
        counts = {n: 1}
        if n > 1:
            counts[2 * n] = (n - 1) // 2
        return counts
    if (n // 2) % 2 == 0:
        return {n: n}
    return {n // 2: 2, n: n - 1}


def expected_pair_counts(n: int, m: int) -> Dict[int, int]:
    """{period: count} of the T-cycles made from two distinct f-cycles of periods n, m."""
    if n < 1 or m < 1:
        raise InvalidParameters(f"periods must be >= 1, got {n}, {m}")
    lcm = n * m // math.gcd(n, m)
    if n % 2 and m % 2:
        return {2 * lcm: n * m // lcm}
    return {lcm: 2 * n * m // lcm}


def _node_type(eigenvalues: Sequence[float]) -> Stability2D:
    sizes = [abs(v) for v in eigenvalues]
    if any(s == 1.0 for s in sizes):
        return "marginal"
    if all(s < 1.0 for s in sizes):
        return "stable-node"
    if all(s > 1.0 for s in sizes):
        return "unstable-node"
    return "saddle"


def cycle_stability_2d(c: Cycle2D, generator_eigenvalues: Sequence[float]) -> Stability2D:
    """Singly-generated cycles have zeta_1 = zeta_2 = lambda, doubly-generated ones (lambda, mu)."""
    expected = 2 if c.origin == "doubly" else 1
    if len(generator_eigenvalues) != expected:
        raise InvalidParameters(
            f"{c.origin} cycle needs {expected} generator eigenvalue(s), got {len(generator_eigenvalues)}")
    return _node_type(generator_eigenvalues)


def _check_f_closure(m: BestReplyMap, c: Cycle) -> None:
    for k, x in enumerate(c.points):
        image = eval_best_reply(m, x)
        target = c.points[(k + 1) % c.period]
        if not math.isclose(image, target, rel_tol=CLOSURE_TOL, abs_tol=CLOSURE_TOL):
            raise NotACycle(f"f({x}) = {image}, expected {target}")


def _check_T_closure(m: BestReplyMap, c: Cycle2D) -> None:
    for k, p in enumerate(c.points):
        image = step_T(m, p)
        target = c.points[(k + 1) % c.period]
        if not all(math.isclose(a, b, rel_tol=CLOSURE_TOL, abs_tol=CLOSURE_TOL)
                   for a, b in zip(image, target)):
            raise NotACycle(f"T{p} = {image}, expected {target}")


def _orbits(states: List[tuple], step: Callable[[tuple], tuple]) -> List[List[tuple]]:
    """Partition states into the cycles of step, in order of first appearance."""
    orbits = []
    visited = set()
    for start in states:
        if start in visited:
            continue
        orbit = []
        state = start
        while state not in visited:
            visited.add(state)
            orbit.append(state)
            state = step(state)
        orbits.append(orbit)
    return orbits


def _check_counts(orbits: List[List[tuple]], expected: Dict[int, int], label: str) -> None:
    found = Counter(len(o) for o in orbits)
    if dict(found) != expected:
        raise NotACycle(f"cycle counts for {label} are {dict(found)}, expected {expected}")


def _make_cycle(points: List[Point], origin: str, generators: List[int],
                eigenvalues: Tuple[float, float]) -> Cycle2D:
    generator_eigenvalues = eigenvalues if origin == "doubly" else eigenvalues[:1]
    return Cycle2D(period=len(points), points=points, origin=origin, generators=generators,
                   eigenvalues=eigenvalues, stability=_node_type(generator_eigenvalues))


def lift_cycles(f_cycles: List[Cycle], m: Optional[BestReplyMap] = None) -> List[Cycle2D]:
    """Lift f-cycles to the cycles of T they generate.

    A point (X_i, Y_j) of a product of f-cycles X, Y goes to (Y_{j+1}, X_{i+1}).
    One cycle gives the singly-generated cycles on its Cartesian square, each
    distinct pair the doubly-generated ones on both products. With a map,
    every input is checked closed under f and every output under T.
    """
    cycles = []
    for c in f_cycles:
        if c.continuum:
            logging.info(f"Skipping continuum of {c.period}-cycles on {c.points}")
            continue
        if c.period < 1 or len(c.points) != c.period or len(set(c.points)) != c.period:
            raise NotACycle(f"{c.period}-cycle needs {c.period} distinct points, got {c.points}")
        if m is not None:
            _check_f_closure(m, c)
        cycles.append(c)

    lifted: List[Cycle2D] = []
    for g, c in enumerate(cycles):
        n = c.period
        states = [(i, j) for i in range(n) for j in range(n)]
        orbits = _orbits(states, lambda s, n=n: ((s[1] + 1) % n, (s[0] + 1) % n))
        _check_counts(orbits, expected_lift_counts(n), f"cycle {g}")
        for orbit in orbits:
            points = [(c.points[i], c.points[j]) for i, j in orbit]
            origin = "diagonal" if all(i == j for i, j in orbit) else "singly"
            lifted.append(_make_cycle(points, origin, [g], (c.eigenvalue, c.eigenvalue)))

    for g in range(len(cycles)):
        for h in range(g + 1, len(cycles)):
            c, d = cycles[g], cycles[h]
            n, p = c.period, d.period
            # side 0: (c_i, d_j); side 1: (d_i, c_j)
            states = [(0, i, j) for i in range(n) for j in range(p)]
            states += [(1, i, j) for i in range(p) for j in range(n)]

            def step(s, n=n, p=p):
                side, i, j = s
                if side == 0:
                    return 1, (j + 1) % p, (i + 1) % n
                return 0, (j + 1) % n, (i + 1) % p

            orbits = _orbits(states, step)
            _check_counts(orbits, expected_pair_counts(n, p), f"cycles {g}, {h}")
            for orbit in orbits:
                points = [(c.points[i], d.points[j]) if side == 0 else (d.points[i], c.points[j])
                          for side, i, j in orbit]
                lifted.append(_make_cycle(points, "doubly", [g, h], (c.eigenvalue, d.eigenvalue)))

    if m is not None:
        for c2 in lifted:
            _check_T_closure(m, c2)
    return lifted


# attractors


def _point_attractor(x: float) -> Attractor:
    return Attractor(id=0, kind="point", rectangles=[Rectangle(x_lo=x, x_hi=x, y_lo=x, y_hi=x)],
                     on_diagonal=True, period=1, mirror_id=0)


def _square_set(lo: float, hi: float) -> Attractor:
    return Attractor(id=0, kind="invariant-set", rectangles=[Rectangle(x_lo=lo, x_hi=hi, y_lo=lo, y_hi=hi)],
                     on_diagonal=True, attracting=False, period=1, mirror_id=0)


def attractor_catalog(m: BestReplyMap) -> List[Attractor]:
    """Attractors of T.

    Products I_i x I_j of the chaotic intervals are grouped by the index
    dynamics (i, j) -> (j + 1, i + 1) mod 2^k. The diagonal attractor comes
    first; the rest follow their first product in row-major order.
    """
    regime = classify_regime(m, detect_k=False)
    if regime.case in ("I", "IIIa"):
        return [_point_attractor(fixed_points(m).point)]
    if regime.case == "II":
        return [_square_set(m.x_l, m.x_u)]
    if regime.case == "IIIb":
        return [_square_set(m.x_u, eval_best_reply(m, m.x_u))]

    try:
        bands = chaotic_intervals(m)
    except PieceCountNotPowerOfTwo as e:
        raise NotClassified(f"no catalog for regime {regime.case}: {e}") from e

    n = len(bands.intervals)
    groups = []
    visited = set()
    starts = [(0, 0)] + [(i, j) for i in range(n) for j in range(n)]
    for start in starts:
        if start in visited:
            continue
        group = []
        i, j = start
        while (i, j) not in visited:
            visited.add((i, j))
            group.append((i, j))
            i, j = (j + 1) % n, (i + 1) % n
        groups.append(group)

    owner = {ij: gid for gid, group in enumerate(groups) for ij in group}
    catalog = []
    for gid, group in enumerate(groups):
        rectangles = []
        for i, j in group:
            (x_lo, x_hi), (y_lo, y_hi) = bands.intervals[i], bands.intervals[j]
            rectangles.append(Rectangle(x_lo=x_lo, x_hi=x_hi, y_lo=y_lo, y_hi=y_hi, i=i + 1, j=j + 1))
        i, j = group[0]
        catalog.append(Attractor(
            id=gid,
            kind="chaotic-rectangles",
            rectangles=rectangles,
            on_diagonal=any(a == b for a, b in group),
            period=len(group),
            mirror_id=owner[(j, i)],
        ))
    return catalog


def _band_table(catalog: List[Attractor]):
    bands = {}
    for att in catalog:
        for rect in att.rectangles:
            bands[rect.i] = (rect.x_lo, rect.x_hi)
            bands[rect.j] = (rect.y_lo, rect.y_hi)
    order = sorted(bands, key=lambda k: bands[k][0])
    pos = {k: p for p, k in enumerate(order)}
    lows = np.array([bands[k][0] for k in order])
    highs = np.array([bands[k][1] for k in order])
    table = np.full((len(order), len(order)), UNRESOLVED, dtype=np.int64)
    for att in catalog:
        for rect in att.rectangles:
            table[pos[rect.i], pos[rect.j]] = att.id
    return lows, highs, table


def _band_index(values: np.ndarray, lows: np.ndarray, highs: np.ndarray, tol: float) -> np.ndarray:
    idx = np.searchsorted(lows - tol, values, side="right") - 1
    safe = np.clip(idx, 0, len(lows) - 1)
    inside = (idx >= 0) & (values <= highs[safe] + tol)
    return np.where(inside, safe, -1)


def locate(catalog: List[Attractor], xs, ys, tol: float = 1e-6) -> np.ndarray:
    """Attractor id for each point (xs[k], ys[k]), or UNRESOLVED."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    ids = np.full(xs.shape, UNRESOLVED, dtype=np.int64)

    if catalog and all(att.kind == "chaotic-rectangles" for att in catalog):
        lows, highs, table = _band_table(catalog)
        bx = _band_index(xs, lows, highs, tol)
        by = _band_index(ys, lows, highs, tol)
        hit = (bx >= 0) & (by >= 0)
        ids[hit] = table[bx[hit], by[hit]]
        return ids

    for att in reversed(catalog):
        for rect in att.rectangles:
            inside = ((xs >= rect.x_lo - tol) & (xs <= rect.x_hi + tol)
                      & (ys >= rect.y_lo - tol) & (ys <= rect.y_hi + tol))
            ids[inside] = att.id
    return ids


def classify_orbit(orbit: Orbit2D, catalog: List[Attractor], tol: float = 1e-6) -> int:
    ids = locate(catalog, orbit.xs, orbit.ys, tol)
    if ids.size == 0:
        return UNRESOLVED
    counts = np.bincount(ids[ids != UNRESOLVED], minlength=len(catalog))
    if counts.size == 0:
        return UNRESOLVED
    best = int(np.argmax(counts))
    if counts[best] >= TAIL_SHARE * ids.size:
        return best
    return UNRESOLVED
