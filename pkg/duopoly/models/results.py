from typing import Dict, List, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from duopoly.models.dynamics import Attractor


class GridSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    x_range: Tuple[float, float]
    y_range: Tuple[float, float]
    nx: int = Field(gt=0)
    ny: int = Field(gt=0)
    burn: int = Field(default=2000, ge=0)
    n_tail: int = Field(default=500, gt=0)
    tol: float = Field(default=1e-6, ge=0.0)
    workers: int = Field(default=1, ge=1)

    @model_validator(mode="after")
    def _check_ranges(self):
        for lo, hi in (self.x_range, self.y_range):
            if not hi > lo:
                raise ValueError(f"empty range [{lo}, {hi}]")
        return self

    def centers(self) -> Tuple[List[float], List[float]]:
        (x0, x1), (y0, y1) = self.x_range, self.y_range
        dx = (x1 - x0) / self.nx
        dy = (y1 - y0) / self.ny
        xs = [x0 + (i + 0.5) * dx for i in range(self.nx)]
        ys = [y0 + (j + 0.5) * dy for j in range(self.ny)]
        return xs, ys


class BasinGrid(BaseModel):
    """Labels are row-major: labels[j * nx + i] is the cell at x index i, y index j."""

    spec: GridSpec
    labels: List[int]
    catalog: List[Attractor]
    unresolved: int
    histogram: Dict[int, int]

    def label_at(self, i: int, j: int) -> int:
        return self.labels[j * self.spec.nx + i]


class SymmetryReport(BaseModel):
    pairs: int
    consistent: int
    fraction: float
    violations: List[Tuple[int, int]]


class BifurcationData(BaseModel):
    parameter: str
    values: List[float]
    samples: List[List[float]]
    skipped: List[float] = []
    continuation: bool = True


class RegimeGrid(BaseModel):
    b_lo: float
    g_lo: float
    g_hi_range: Tuple[float, float]
    b_hi_range: Tuple[float, float]
    nx: int
    ny: int
    # row-major, row j = b_hi index, column i = g_hi index
    tags: List[str]
    r_one_curve: List[Tuple[float, float]]
    flip_curve: List[Tuple[float, float]]
    chaotic_fraction: float
    verified: int = 0
    mismatches: List[Tuple[int, int]] = []

    def tag_at(self, i: int, j: int) -> str:
        return self.tags[j * self.nx + i]

    def cell(self, i: int, j: int) -> Tuple[float, float]:
        (g0, g1), (b0, b1) = self.g_hi_range, self.b_hi_range
        return (g0 + (i + 0.5) * (g1 - g0) / self.nx,
                b0 + (j + 0.5) * (b1 - b0) / self.ny)


class ProfitSeries(BaseModel):
    t: List[int]
    expectation: List[float]
    realized: List[float]
    naivety_gap: List[float]
    guaranteed_achievable: List[float]
    max_guaranteed_expected: List[float]
    best_possible_expected: List[float]

    def rows(self) -> List[tuple]:
        return list(zip(self.t, self.expectation, self.realized, self.naivety_gap,
                        self.guaranteed_achievable, self.max_guaranteed_expected,
                        self.best_possible_expected))
