"""Coordinate charts for T(1,1) and its metric cone, with point sampling.

A single chart per manifold is enough for pointwise residual checks; the
coordinate singularities of the T(1,1) chart at theta in {0, pi} are excluded
from sampling by a configurable margin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

__all__ = [
    "Chart",
    "ChartPoint",
    "t11_chart",
    "cone_chart",
    "sample_points",
    "cone_point",
    "base_point",
]

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Chart:
    """An ordered coordinate system with sampling ranges and singular margins.

    `margins[i]` shrinks coordinate i's sampling interval on both sides; it is
    nonzero only for coordinates that hit a metric degeneracy at the interval
    endpoints (the polar angles of T(1,1)).
    """

    name: str
    coords: tuple[str, ...]
    ranges: tuple[tuple[float, float], ...]
    margins: tuple[float, ...]
    periodic: tuple[bool, ...] = ()
    base: Optional["Chart"] = field(default=None, repr=False)

    def __post_init__(self):
        if not self.periodic:
            object.__setattr__(self, "periodic", (False,) * len(self.coords))
        if not (len(self.coords) == len(self.ranges) == len(self.margins)
                == len(self.periodic)):
            raise ValueError("coords, ranges, margins must have equal length")
        for (lo, hi), m in zip(self.ranges, self.margins):
            if not lo < hi:
                raise ValueError(f"empty range ({lo}, {hi})")
            if m < 0 or 2 * m >= hi - lo:
                raise ValueError(f"margin {m} does not fit range ({lo}, {hi})")

    @property
    def dim(self) -> int:
        return len(self.coords)

    def index(self, coord: str) -> int:
        return self.coords.index(coord)

    def sampling_intervals(self) -> list[tuple[float, float]]:
        return [(lo + m, hi - m)
                for (lo, hi), m in zip(self.ranges, self.margins)]

    def contains(self, values) -> bool:
        return all(lo <= v <= hi for v, (lo, hi) in zip(values, self.ranges))

    def wrap(self, values) -> tuple[float, ...]:
        """Fold periodic coordinates back into their fundamental range."""
        out = []
        for v, (lo, hi), per in zip(values, self.ranges, self.periodic):
            if per:
                width = hi - lo
                v = lo + math.fmod(v - lo, width)
                if v < lo:
                    v += width
            out.append(float(v))
        return tuple(out)


@dataclass(frozen=True)
class ChartPoint:
    """A point of a chart, given by one real value per coordinate."""

    chart: Chart
    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.values) != self.chart.dim:
            raise ValueError("wrong number of coordinate values")
        if not self.chart.contains(self.values):
            raise ValueError(f"values {self.values} outside chart ranges")

    def coord(self, name: str) -> float:
        return self.values[self.chart.index(name)]


def t11_chart(margin: float = 0.2) -> Chart:
    """The 5-dimensional chart (theta1, phi1, theta2, phi2, psi_angle).

    Polar angles sample inside [margin, pi - margin]; the fibre angles are
    2*pi-periodic and need no margin.
    """
    return Chart(
        name="t11",
        coords=("theta1", "phi1", "theta2", "phi2", "psi_angle"),
        ranges=((0.0, math.pi), (0.0, TWO_PI), (0.0, math.pi),
                (0.0, TWO_PI), (0.0, TWO_PI)),
        margins=(margin, 0.0, margin, 0.0, 0.0),
        periodic=(False, True, False, True, True),
    )


def cone_chart(base: Chart, r_range: tuple[float, float] = (0.5, 2.0)) -> Chart:
    """Prepend the radial coordinate r to a base chart.

    The r-range excludes the cone apex r = 0; the default [0.5, 2.0] brackets
    the r = 1 embedding of the base (metric homogeneity in r makes wider
    ranges redundant).
    """
    lo, hi = r_range
    if not 0.0 < lo < hi:
        raise ValueError(f"invalid r range ({lo}, {hi})")
    return Chart(
        name=f"cone({base.name})",
        coords=("r",) + base.coords,
        ranges=((lo, hi),) + base.ranges,
        margins=(0.0,) + base.margins,
        periodic=(False,) + base.periodic,
        base=base,
    )


def sample_points(chart: Chart, n: int, seed: int) -> list[ChartPoint]:
    """Draw n points uniformly per coordinate inside the margin-shrunk ranges.

    Deterministic for fixed (chart, n, seed).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    los = np.array([lo for lo, _ in chart.sampling_intervals()])
    his = np.array([hi for _, hi in chart.sampling_intervals()])
    draws = rng.uniform(los, his, size=(n, chart.dim))
    return [ChartPoint(chart, tuple(float(v) for v in row)) for row in draws]


def cone_point(base_pt: ChartPoint, r: float, cone: Chart) -> ChartPoint:
    """Embed a base point at radius r in the cone chart."""
    if cone.base is not base_pt.chart and cone.base != base_pt.chart:
        raise ValueError("cone chart does not extend the point's chart")
    return ChartPoint(cone, (r,) + base_pt.values)


def base_point(cone_pt: ChartPoint) -> ChartPoint:
    """Restrict a cone point to the base chart (drop r)."""
    base = cone_pt.chart.base
    if base is None:
        raise ValueError("point's chart has no base")
    return ChartPoint(base, cone_pt.values[1:])
