from typing import Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator


Command = Literal["analyze", "simulate", "cycles", "bifurcate-1d", "regime-map", "basins", "profits"]
SweepParam = Literal["b_hi", "b_lo", "g_hi", "g_lo"]


class RunConfig(BaseModel):
    """Everything one CLI invocation needs.

    Built from defaults, then a preset, then a JSON config file, then flags.
    Unknown keys are rejected.
    """

    model_config = ConfigDict(extra="forbid")

    command: Optional[Command] = None

    # uncertainty set
    b_hi: float = Field(default=0.3, ge=0.0)
    b_lo: float = Field(default=0.1, ge=0.0)
    g_hi: float = Field(default=0.25, ge=0.0)
    g_lo: float = Field(default=0.0, ge=0.0)
    a: float = 1.0

    # orbits
    x0: float = Field(default=1.9, ge=0.0)
    y0: Optional[float] = Field(default=None, ge=0.0)
    n: int = Field(default=200, ge=1)
    burn: Optional[int] = Field(default=None, ge=0)
    mode: Literal["1d", "2d", "mixed"] = "1d"
    random_ic: int = Field(default=0, ge=0)
    seed: int = Field(default=0, ge=0)

    # sweeps
    param: SweepParam = "b_lo"
    lo: float = 0.0
    hi: float = 0.4
    steps: int = Field(default=81, ge=1)
    samples: int = Field(default=200, ge=1)
    continuation: bool = True
    g_hi_range: Tuple[float, float] = (0.0, 1.0)
    b_hi_range: Tuple[float, float] = (0.0, 1.0)
    nx: int = Field(default=200, ge=1)
    ny: int = Field(default=200, ge=1)
    verify: int = Field(default=0, ge=0)

    # basins
    grid: int = Field(default=200, ge=1)
    window: Optional[Tuple[float, float]] = None
    n_tail: int = Field(default=500, ge=1)
    tol: float = Field(default=1e-6, ge=0.0)

    # output
    workers: int = Field(default=1, ge=1)
    output_dir: Optional[str] = None
    output: Optional[str] = None

    @model_validator(mode="after")
    def _check_ranges(self):
        for name in ("g_hi_range", "b_hi_range", "window"):
            bounds = getattr(self, name)
            if bounds is not None and not bounds[1] > bounds[0]:
                raise ValueError(f"{name} must satisfy hi > lo, got {bounds}")
        if self.hi < self.lo:
            raise ValueError(f"sweep bounds must satisfy lo <= hi, got [{self.lo}, {self.hi}]")
        return self
