from typing import Literal

from pydantic import BaseModel, ConfigDict


BranchName = Literal["left", "middle", "right", "zero"]


class UncertaintySet(BaseModel):
    """The two worst-case realizations (b_hi, g_lo) and (b_lo, g_hi) plus the choke price."""

    model_config = ConfigDict(frozen=True)

    b_hi: float
    b_lo: float
    g_hi: float
    g_lo: float
    a: float = 1.0

    def is_singleton(self) -> bool:
        return self.b_hi == self.b_lo and self.g_hi == self.g_lo

    def realizations(self) -> list[tuple[float, float]]:
        return [(self.b_hi, self.g_lo), (self.b_lo, self.g_hi)]


class Branch(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: BranchName
    intercept: float
    slope: float

    def value(self, x: float) -> float:
        return self.intercept + self.slope * x


class BestReplyMap(BaseModel):
    """Worst-case best reply f, a continuous piecewise-linear map.

    Branch domains follow the left-closed rule: [0, x_l), [x_l, x_u),
    [x_u, x_m), [x_m, inf).
    """

    model_config = ConfigDict(frozen=True)

    owner: UncertaintySet
    r: float
    x_l: float
    x_u: float
    x_m: float
    left: Branch
    middle: Branch
    right: Branch
    zero: Branch

    @property
    def kinks(self) -> tuple[float, float, float]:
        return (self.x_l, self.x_u, self.x_m)

    @property
    def branches(self) -> tuple[Branch, Branch, Branch, Branch]:
        return (self.left, self.middle, self.right, self.zero)

    @property
    def x_star_left(self) -> float:
        return self.owner.a / (self.owner.g_lo + 2.0 * self.owner.b_hi)

    @property
    def x_star_right(self) -> float:
        return self.owner.a / (self.owner.g_hi + 2.0 * self.owner.b_lo)
