import logging
import math
from typing import List, Optional, Tuple

import numpy as np

from duopoly.models.dynamics import (
    ChaoticIntervals,
    Cycle,
    FixedPointReport,
    OrbitSeries,
    Regime,
    RegimeCase,
    Stability,
)
from duopoly.models.game import BestReplyMap, Branch
from duopoly.services.model_service import branch_of, eval_best_reply
from duopoly.utils.errors import (
    CriticalOrbitMismatch,
    InvalidParameters,
    NotChaoticRegime,
    PieceCountNotPowerOfTwo,
    ZeroSlopeEncountered,
)

# decides the measure-zero cases r = 1 and g_hi = 2 b_lo
TOL_R = 1e-10
INVARIANCE_TOL = 1e-10
GAP_FRACTION = 1e-4
GOLDEN_OFFSET = 0.381966
MAX_K = 10

DEFAULT_BURN = 10_000
DEFAULT_SAMPLES = 100_000


def _stability(eigenvalue: float) -> Stability:
    size = abs(eigenvalue)
    if size < 1.0:
        return "attracting"
    if size > 1.0:
        return "repelling"
    return "marginal"


def fixed_points(m: BestReplyMap) -> FixedPointReport:
    if abs(m.r - 1.0) <= TOL_R:
        return FixedPointReport(kind="segment", segment=(m.x_l, m.x_u), right_open=m.x_u >= m.x_m,
                                stability="marginal", eigenvalue=1.0)
    if m.r < 1.0:
        eigenvalue = m.left.slope
        return FixedPointReport(kind="unique-left", point=m.x_star_left,
                                stability=_stability(eigenvalue), eigenvalue=eigenvalue)
    eigenvalue = m.right.slope
    return FixedPointReport(kind="unique-right", point=m.x_star_right,
                            stability=_stability(eigenvalue), eigenvalue=eigenvalue)


def critical_orbit(m: BestReplyMap, depth: int) -> List[float]:
    """c_1 = f(x_u), c_{j+1} = f(c_j)."""
    if depth < 1:
        raise InvalidParameters(f"depth must be >= 1, got {depth}")
    orbit = []
    x = m.x_u
    for _ in range(depth):
        x = eval_best_reply(m, x)
        orbit.append(x)
    return orbit


def homoclinic_value(m: BestReplyMap) -> float:
    """f_m(f_r(f_m(x_u))), compared against x*_r at the homoclinic bifurcation."""
    return m.middle.value(m.right.value(m.middle.value(m.x_u)))


def _analytic_case(m: BestReplyMap) -> Tuple[RegimeCase, Optional[bool]]:
    if abs(m.r - 1.0) <= TOL_R:
        return "II", None
    if m.r < 1.0:
        return "I", None

    g_hi, two_b_lo = m.owner.g_hi, 2.0 * m.owner.b_lo
    if abs(g_hi - two_b_lo) <= TOL_R:
        return "IIIb", None
    if g_hi < two_b_lo:
        return "IIIa", None

    c = critical_orbit(m, 2)
    absorbing_ok = c[1] > m.x_l
    if homoclinic_value(m) < m.x_star_right:
        return "IIId", absorbing_ok
    return "IIIc", absorbing_ok


def classify_regime(m: BestReplyMap, detect_k: bool = True) -> Regime:
    """Case of the map among I, II, IIIa, IIIb, IIIc, IIId.

    Everything except the piece count k is decided in closed form. k is
    measured by chaotic_intervals unless detect_k is False, in which case a
    IIIc regime comes back with k = None.
    """
    case, absorbing_ok = _analytic_case(m)
    if case not in ("IIIc", "IIId"):
        return Regime(case=case)
    if case == "IIId" and absorbing_ok:
        return Regime(case=case, k=0, absorbing_ok=True)
    if not absorbing_ok:
        logging.warning(f"f^2(x_u) <= x_l (r={m.r}); classifying by attractor detection")
    if not detect_k:
        return Regime(case=case, absorbing_ok=absorbing_ok)

    try:
        intervals = chaotic_intervals(m)
    except PieceCountNotPowerOfTwo as e:
        logging.warning(f"Piece count undetected for r={m.r}: {e}")
        return Regime(case=case, absorbing_ok=absorbing_ok)

    if not absorbing_ok:
        case = "IIId" if intervals.k == 0 else "IIIc"
    return Regime(case=case, k=intervals.k, absorbing_ok=absorbing_ok)


def _two_cycle_on(m: BestReplyMap, p: Branch, q: Branch) -> Optional[Tuple[float, float]]:
    # x2 = p(x1), x1 = q(x2)
    det = 1.0 - p.slope * q.slope
    if det == 0.0:
        return None
    x1 = (q.intercept + q.slope * p.intercept) / det
    x2 = p.value(x1)
    if x1 < 0 or x2 < 0:
        return None
    if branch_of(m, x1) != p.name or branch_of(m, x2) != q.name:
        return None
    if math.isclose(x1, x2, rel_tol=1e-12, abs_tol=1e-15):
        return None
    return x1, x2


def find_two_cycles(m: BestReplyMap) -> List[Cycle]:
    cycles: List[Cycle] = []
    continuum: Optional[Tuple[float, float]] = None

    if _analytic_case(m)[0] == "IIIb":
        continuum = (m.x_u, eval_best_reply(m, m.x_u))
        cycles.append(Cycle(period=2, points=list(continuum), eigenvalue=m.right.slope ** 2,
                            stability="marginal", continuum=True))

    seen = set()
    branches = (m.left, m.middle, m.right)
    for p in branches:
        for q in branches:
            found = _two_cycle_on(m, p, q)
            if found is None:
                continue
            x1, x2 = sorted(found)
            key = (round(x1, 12), round(x2, 12))
            if key in seen:
                continue
            if continuum:
                slack = INVARIANCE_TOL * continuum[1]
                if continuum[0] - slack <= x1 and x2 <= continuum[1] + slack:
                    continue
            seen.add(key)
            eigenvalue = p.slope * q.slope
            cycles.append(Cycle(period=2, points=[x1, x2], eigenvalue=eigenvalue,
                                stability=_stability(eigenvalue)))
    return cycles


def interval_image(m: BestReplyMap, lo: float, hi: float) -> Tuple[float, float]:
    """Exact image of [lo, hi]: f is piecewise linear, so endpoints and interior kinks suffice."""
    points = [lo, hi] + [k for k in m.kinks if lo < k < hi]
    values = [eval_best_reply(m, x) for x in points]
    return min(values), max(values)


def _orbit(m: BestReplyMap, x0: float, burn: int, n: int) -> np.ndarray:
    x = x0
    for _ in range(burn):
        x = eval_best_reply(m, x)
    out = np.empty(n)
    for t in range(n):
        x = eval_best_reply(m, x)
        out[t] = x
    return out


def _hulls(orbit: List[float], pieces: int) -> List[Tuple[float, float]]:
    return [(min(orbit[i], orbit[i + pieces]), max(orbit[i], orbit[i + pieces]))
            for i in range(pieces)]


def _splits(m: BestReplyMap, intervals: List[Tuple[float, float]]) -> bool:
    """True when the hulls are pairwise disjoint and cycled by f."""
    ordered = sorted(intervals)
    for (_, hi), (lo, _) in zip(ordered, ordered[1:]):
        if lo - hi <= INVARIANCE_TOL * max(1.0, lo):
            return False
    try:
        _check_invariance(m, intervals)
    except CriticalOrbitMismatch:
        return False
    return True


def _confirm_with_orbit(m: BestReplyMap, intervals: List[Tuple[float, float]], burn: int,
                        samples: int) -> None:
    # gaps inside a hull are sampling noise; only points between hulls
    # or a hull the orbit never visits count against the hulls
    ordered = np.array(sorted(intervals))
    lo, hi = ordered[0, 0], ordered[-1, 1]
    threshold = GAP_FRACTION * (hi - lo)
    points = _orbit(m, lo + GOLDEN_OFFSET * (hi - lo), burn, samples)
    idx = np.clip(np.searchsorted(ordered[:, 0], points + threshold, side="right") - 1,
                  0, len(ordered) - 1)
    inside = (points >= ordered[idx, 0] - threshold) & (points <= ordered[idx, 1] + threshold)
    if not inside.all():
        stray = points[~inside][0]
        raise CriticalOrbitMismatch(
            f"{np.count_nonzero(~inside)} orbit points lie outside the hulls, e.g. x={stray}")
    visited = np.unique(idx).size
    if visited != len(ordered):
        raise CriticalOrbitMismatch(f"orbit visits {visited} of {len(ordered)} hulls")


def chaotic_intervals(m: BestReplyMap, burn: int = DEFAULT_BURN,
                      samples: int = DEFAULT_SAMPLES) -> ChaoticIntervals:
    """The 2^k chaotic intervals I_1..I_{2^k}, with f(I_i) = I_{i+1}.

    I_i is the hull of c_i and c_{i+2^k}. k = 0 in IIId comes from the
    homoclinic condition. Otherwise the hulls are refined level by level
    while they stay disjoint and cycled by f, and a long orbit from the
    middle of [c_2, c_1] must stay on the resulting hulls.
    """
    case, absorbing_ok = _analytic_case(m)
    if case not in ("IIIc", "IIId"):
        raise NotChaoticRegime(f"regime {case} has no chaotic intervals")

    if case == "IIId" and absorbing_ok:
        orbit = critical_orbit(m, 4)
        intervals = _hulls(orbit, 1)
        _check_invariance(m, intervals)
        return ChaoticIntervals(k=0, intervals=intervals, critical_orbit=orbit)

    orbit = critical_orbit(m, 2 ** (MAX_K + 1))
    k = 0
    while _splits(m, _hulls(orbit, 2 ** (k + 1))):
        k += 1
        if k == MAX_K:
            raise PieceCountNotPowerOfTwo(f"critical-orbit hulls still split at 2^{MAX_K} pieces")
    if case == "IIIc" and absorbing_ok and k == 0:
        raise CriticalOrbitMismatch("hulls of c_1, c_3 and c_2, c_4 overlap but c_3 >= x*_r")

    pieces = 2 ** k
    intervals = _hulls(orbit, pieces)
    _check_invariance(m, intervals)
    _confirm_with_orbit(m, intervals, burn, samples)
    logging.info(f"Detected {pieces} chaotic pieces for r={m.r}")
    return ChaoticIntervals(k=k, intervals=intervals, critical_orbit=orbit[:max(4, 2 * pieces)])


def _check_invariance(m: BestReplyMap, intervals: List[Tuple[float, float]]) -> None:
    last = len(intervals) - 1
    for i, (lo, hi) in enumerate(intervals):
        img_lo, img_hi = interval_image(m, lo, hi)
        nxt_lo, nxt_hi = intervals[(i + 1) % len(intervals)]
        tol = INVARIANCE_TOL * max(1.0, nxt_hi)
        if i < last:
            ok = abs(img_lo - nxt_lo) <= tol and abs(img_hi - nxt_hi) <= tol
        else:
            ok = img_lo >= nxt_lo - tol and img_hi <= nxt_hi + tol
        if not ok:
            raise CriticalOrbitMismatch(
                f"f([{lo}, {hi}]) = [{img_lo}, {img_hi}] is not the successor [{nxt_lo}, {nxt_hi}]")


def iterate_f(m: BestReplyMap, x0: float, n: int = 10_000, burn: int = DEFAULT_BURN) -> OrbitSeries:
    if n < 1 or burn < 0:
        raise InvalidParameters(f"need n >= 1 and burn >= 0, got n={n}, burn={burn}")
    values = _orbit(m, x0, burn, n)
    return OrbitSeries(x0=x0, burn=burn, values=values.tolist())


def lyapunov(m: BestReplyMap, x0: float, n: int = DEFAULT_SAMPLES, burn: int = DEFAULT_BURN,
             strict: bool = False) -> float:
    """Mean of ln|f'| along the orbit.

    Iterates sitting exactly on a kink or in the zero branch are skipped. A
    zero slope gives -inf, or ZeroSlopeEncountered when strict.
    """
    if n < 1000:
        raise InvalidParameters(f"need n >= 1000 iterates, got {n}")
    kinks = set(m.kinks)
    total = 0.0
    counted = 0
    for x in _orbit(m, x0, burn, n):
        x = float(x)
        if x in kinks:
            continue
        branch = branch_of(m, x)
        if branch == "zero":
            continue
        slope = getattr(m, branch).slope
        if slope == 0.0:
            if strict:
                raise ZeroSlopeEncountered(f"orbit visits the flat {branch} branch at x={x}")
            return -math.inf
        total += math.log(abs(slope))
        counted += 1

    if counted == 0:
        logging.warning(f"No iterate from x0={x0} contributed a slope")
        return -math.inf
    return total / counted
