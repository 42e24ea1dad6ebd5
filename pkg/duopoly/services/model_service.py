import math
from typing import Callable, Literal

import numpy as np

from duopoly.models.game import BestReplyMap, Branch, BranchName, UncertaintySet
from duopoly.utils.errors import (
    DegenerateMap,
    InvalidParameters,
    NegativeInput,
    NonPositiveChoke,
    OrderingViolation,
    SingletonSet,
)


def _check_finite_non_negative(**values: float) -> None:
    for name, value in values.items():
        if not math.isfinite(value):
            raise InvalidParameters(f"{name} must be finite, got {value}")
        if value < 0:
            raise InvalidParameters(f"{name} must be non-negative, got {value}")


def new_uncertainty_set(b_hi: float, b_lo: float, g_hi: float, g_lo: float,
                        a: float = 1.0) -> UncertaintySet:
    if not math.isfinite(a) or a <= 0:
        raise NonPositiveChoke(f"choke price must be positive, got a={a}")
    _check_finite_non_negative(b_hi=b_hi, b_lo=b_lo, g_hi=g_hi, g_lo=g_lo)

    if not (b_hi >= g_hi >= b_lo >= g_lo >= 0):
        raise OrderingViolation(
            f"expected b_hi >= g_hi >= b_lo >= g_lo >= 0, got "
            f"b_hi={b_hi}, g_hi={g_hi}, b_lo={b_lo}, g_lo={g_lo}"
        )
    if b_hi <= 0:
        raise OrderingViolation(f"b_hi must be positive, got {b_hi}")

    return UncertaintySet(b_hi=b_hi, b_lo=b_lo, g_hi=g_hi, g_lo=g_lo, a=a)


def build_best_reply(U: UncertaintySet) -> BestReplyMap:
    if U.is_singleton():
        raise SingletonSet("the set is a singleton; use complete_info_reply")
    if U.g_hi == 0:
        raise DegenerateMap("g_hi = 0 leaves x_m undefined")
    if U.b_hi == U.b_lo or U.g_hi == U.g_lo:
        # one parameter known exactly: r is infinite (b) or zero (gamma)
        raise DegenerateMap(
            f"uncertainty on only one parameter (b_hi-b_lo={U.b_hi - U.b_lo}, "
            f"g_hi-g_lo={U.g_hi - U.g_lo}) leaves r degenerate"
        )

    a = U.a
    r = (U.g_hi - U.g_lo) / (U.b_hi - U.b_lo)
    x_l = a / (U.g_lo + 2.0 * U.b_hi * r)
    x_u = a / (U.g_hi + 2.0 * U.b_lo * r)
    x_m = a / U.g_hi

    if U.b_lo > 0:
        right = Branch(name="right", intercept=a / (2.0 * U.b_lo), slope=-U.g_hi / (2.0 * U.b_lo))
    else:
        # x_u == x_m: the right branch has an empty domain
        right = Branch(name="right", intercept=0.0, slope=0.0)

    return BestReplyMap(
        owner=U,
        r=r,
        x_l=x_l,
        x_u=x_u,
        x_m=x_m,
        left=Branch(name="left", intercept=a / (2.0 * U.b_hi), slope=-U.g_lo / (2.0 * U.b_hi)),
        middle=Branch(name="middle", intercept=0.0, slope=r),
        right=right,
        zero=Branch(name="zero", intercept=0.0, slope=0.0),
    )


def branch_of(m: BestReplyMap, x: float) -> BranchName:
    if x < m.x_l:
        return "left"
    if x < m.x_u:
        return "middle"
    if x < m.x_m:
        return "right"
    return "zero"


def _branch(m: BestReplyMap, x: float) -> Branch:
    if x < m.x_l:
        return m.left
    if x < m.x_u:
        return m.middle
    if x < m.x_m:
        return m.right
    return m.zero


def slope_at(m: BestReplyMap, x: float) -> float:
    return _branch(m, x).slope


def eval_best_reply(m: BestReplyMap, x: float) -> float:
    if x < 0 or math.isnan(x):
        raise NegativeInput(f"quantity must be non-negative, got {x}")
    if x >= m.x_m:
        return 0.0
    value = _branch(m, x).value(x)
    return value if value > 0.0 else 0.0


def eval_best_reply_array(m: BestReplyMap, xs: np.ndarray) -> np.ndarray:
    xs = np.asarray(xs, dtype=np.float64)
    if np.any(xs < 0) or np.any(np.isnan(xs)):
        raise NegativeInput("quantities must be non-negative")
    idx = np.searchsorted(np.array(m.kinks), xs, side="right")
    intercepts = np.array([b.intercept for b in m.branches])
    slopes = np.array([b.slope for b in m.branches])
    values = intercepts[idx] + slopes[idx] * xs
    values[idx == 3] = 0.0
    return np.maximum(values, 0.0)


def complete_info_reply(b: float, gamma: float, x: float) -> float:
    if not b > 0 or gamma < 0 or gamma > b:
        raise InvalidParameters(f"need b > 0 and 0 <= gamma <= b, got b={b}, gamma={gamma}")
    if x < 0:
        raise NegativeInput(f"quantity must be non-negative, got {x}")
    if gamma > 0 and x >= 1.0 / gamma:
        return 0.0
    return max((1.0 - gamma * x) / (2.0 * b), 0.0)


def reply_function(U: UncertaintySet) -> Callable[[float], float]:
    """f for the set: the worst-case reply, or the benchmark reply for a singleton."""
    if U.is_singleton():
        b, gamma, a = U.b_hi, U.g_hi, U.a
        # benchmark reply scaled to choke price a
        return lambda x: a * complete_info_reply(b, gamma, x / a)
    m = build_best_reply(U)
    return lambda x: eval_best_reply(m, x)


def inverse_demand(x: float, y: float, b: float, gamma: float, a: float = 1.0) -> float:
    return max(a - b * x - gamma * y, 0.0)


def payoff(x: float, y: float, b: float, gamma: float, a: float = 1.0) -> float:
    return inverse_demand(x, y, b, gamma, a) * x


def extremal_payoff(U: UncertaintySet, x: float, y: float,
                    mode: Literal["worst", "best"] = "worst") -> float:
    if x < 0 or y < 0:
        raise NegativeInput(f"quantities must be non-negative, got x={x}, y={y}")
    values = [payoff(x, y, b, gamma, U.a) for b, gamma in U.realizations()]
    if mode == "worst":
        return min(values)
    if mode == "best":
        return max(values)
    raise InvalidParameters(f"mode must be 'worst' or 'best', got {mode!r}")
