from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict


Stability = Literal["attracting", "marginal", "repelling"]
RegimeCase = Literal["I", "II", "IIIa", "IIIb", "IIIc", "IIId"]
Stability2D = Literal["stable-node", "saddle", "unstable-node", "marginal"]

UNRESOLVED = -1


class FixedPointReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["unique-left", "unique-right", "segment"]
    point: Optional[float] = None
    segment: Optional[Tuple[float, float]] = None
    # b_lo = 0 puts x_u on the zero branch, so the segment excludes it
    right_open: bool = False
    stability: Stability
    eigenvalue: float


class Regime(BaseModel):
    model_config = ConfigDict(frozen=True)

    case: RegimeCase
    k: Optional[int] = None
    # f^2(x_u) > x_l, needed for the absorbing-interval argument
    absorbing_ok: Optional[bool] = None

    @property
    def chaotic(self) -> bool:
        return self.case in ("IIIc", "IIId")

    @property
    def pieces(self) -> Optional[int]:
        return None if self.k is None else 2 ** self.k


class Cycle(BaseModel):
    model_config = ConfigDict(frozen=True)

    period: int
    points: List[float]
    eigenvalue: float
    stability: Stability
    continuum: bool = False


class ChaoticIntervals(BaseModel):
    model_config = ConfigDict(frozen=True)

    k: int
    intervals: List[Tuple[float, float]]
    critical_orbit: List[float]

    def contains(self, x: float, tol: float = 0.0) -> bool:
        return any(lo - tol <= x <= hi + tol for lo, hi in self.intervals)


class OrbitSeries(BaseModel):
    x0: float
    burn: int
    values: List[float]


class Orbit2D(BaseModel):
    x0: float
    y0: float
    burn: int
    xs: List[float]
    ys: List[float]

    def points(self) -> List[Tuple[float, float]]:
        return list(zip(self.xs, self.ys))


class Cycle2D(BaseModel):
    model_config = ConfigDict(frozen=True)

    period: int
    points: List[Tuple[float, float]]
    origin: Literal["singly", "doubly", "diagonal"]
    generators: List[int]
    eigenvalues: Tuple[float, float]
    stability: Stability2D


class Rectangle(BaseModel):
    model_config = ConfigDict(frozen=True)

    x_lo: float
    x_hi: float
    y_lo: float
    y_hi: float
    # interval indices (1-based) for products of chaotic intervals
    i: Optional[int] = None
    j: Optional[int] = None

    def contains(self, x: float, y: float, tol: float = 0.0) -> bool:
        return (self.x_lo - tol <= x <= self.x_hi + tol
                and self.y_lo - tol <= y <= self.y_hi + tol)


class Attractor(BaseModel):
    model_config = ConfigDict(frozen=True)

    id: int
    kind: Literal["point", "chaotic-rectangles", "invariant-set"]
    rectangles: List[Rectangle]
    on_diagonal: bool
    attracting: bool = True
    period: int = 1
    mirror_id: int
