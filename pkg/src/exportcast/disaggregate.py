"""Annual to quarterly conversion at the annual level scale.

Quarterly points are the annual level sampled at quarter offsets 0, 1/4,
1/2 and 3/4 within each year, so a quarter carries the same order of
magnitude as the year it belongs to. Nothing here preserves annual sums.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import total_ordering

import numpy as np
from scipy.interpolate import CubicSpline

from .ingest import AnnualSeries, country_code

METHODS = ("flat", "linear", "cubic")
_OFFSETS = np.arange(4) / 4.0


@total_ordering
@dataclass(frozen=True)
class QuarterStamp:
    year: int
    quarter: int

    def __post_init__(self):
        if self.quarter not in (1, 2, 3, 4):
            raise ValueError(f"quarter must be 1..4, got {self.quarter}")

    def __lt__(self, other: "QuarterStamp") -> bool:
        return (self.year, self.quarter) < (other.year, other.quarter)

    @property
    def index(self) -> int:
        return self.year * 4 + self.quarter - 1

    @classmethod
    def from_index(cls, i: int) -> "QuarterStamp":
        return cls(i // 4, i % 4 + 1)

    def shift(self, n: int) -> "QuarterStamp":
        return QuarterStamp.from_index(self.index + n)

    def __str__(self):
        return f"{self.year}q{self.quarter}"


@dataclass(frozen=True)
class QuarterlySeries:
    country: str
    start: QuarterStamp
    values: np.ndarray

    def __post_init__(self):
        country_code(self.country)
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))

    @property
    def end(self) -> QuarterStamp:
        return self.start.shift(len(self.values) - 1)

    def stamps(self) -> list[QuarterStamp]:
        return [self.start.shift(i) for i in range(len(self.values))]


def to_quarterly(s: AnnualSeries, method: str = "linear") -> QuarterlySeries:
    """Four quarterly points per year.

    ``flat`` repeats the annual value. ``linear`` moves toward the next
    year's value at quarter offsets and holds the final year flat.
    ``cubic`` samples a natural cubic spline through the annual knots and
    also holds the final year flat.
    """
    y = np.asarray(s.values, dtype=float)
    if y.size == 0:
        raise ValueError(f"{s.country}: cannot disaggregate an empty series")
    if method not in METHODS:
        raise ValueError(f"unknown disaggregation method {method!r}; use one of {METHODS}")

    knots = np.arange(y.size, dtype=float)
    t = (knots[:, None] + _OFFSETS[None, :]).ravel()
    if method == "flat" or y.size == 1:
        q = np.repeat(y, 4)
    elif method == "linear":
        # np.interp holds the right endpoint past the last knot
        q = np.interp(t, knots, y)
    else:
        q = CubicSpline(knots, y, bc_type="natural")(np.minimum(t, knots[-1]))
        if not np.all(np.isfinite(q)):
            raise ValueError(f"{s.country}: cubic interpolation produced non-finite values")
        if np.any(q <= 0):
            raise ValueError(f"{s.country}: cubic interpolation produced non-positive values")
    return QuarterlySeries(s.country, QuarterStamp(s.start_year, 1), q)
