"""Toric data of the moment cone and the momentum maps for T(1,1).

Facet normals transform as v -> T v under a unimodular change of torus basis,
the Reeb vector the same way, and momenta contravariantly (y -> T^{-T} y) so
that every pairing <., y> is preserved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .chart import ChartPoint

__all__ = [
    "ToricData",
    "UnimodularTransform",
    "conifold_toric_data",
    "apply_transform",
    "transform_momentum",
    "is_gorenstein",
    "facet_functions",
    "momentum_map_t11",
    "in_cone_interior",
]


@dataclass(frozen=True)
class ToricData:
    """Integer facet normals of the moment cone plus an optional Reeb vector."""

    n: int
    normals: tuple[tuple[int, ...], ...]
    reeb: Optional[tuple[float, ...]] = None

    def __post_init__(self):
        if len(self.normals) < self.n:
            raise ValueError("need at least n facet normals")
        for v in self.normals:
            if len(v) != self.n:
                raise ValueError(f"normal {v} has wrong dimension")
            if math.gcd(*(abs(c) for c in v)) != 1:
                raise ValueError(f"normal {v} is not primitive")
        if self.reeb is not None and len(self.reeb) != self.n:
            raise ValueError("Reeb vector has wrong dimension")

    @property
    def normal_matrix(self) -> np.ndarray:
        return np.array(self.normals, dtype=float)

    @property
    def normal_sum(self) -> np.ndarray:
        return np.sum(self.normal_matrix, axis=0)


@dataclass(frozen=True)
class UnimodularTransform:
    """An integer basis change of the torus lattice, det = +-1."""

    matrix: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.shape[0] != m.shape[1]:
            raise ValueError("transform must be square")
        if round(abs(np.linalg.det(m))) != 1:
            raise ValueError("transform is not unimodular (det != +-1)")

    @property
    def array(self) -> np.ndarray:
        return np.array(self.matrix, dtype=int)

    @property
    def inverse(self) -> "UnimodularTransform":
        inv = np.linalg.inv(self.array)
        return UnimodularTransform(
            tuple(tuple(int(round(x)) for x in row) for row in inv))


CONIFOLD_RAW_NORMALS = ((-1, 0, 1), (0, -1, 1), (1, 0, 0), (0, 1, 0))
CONIFOLD_NORMALS = ((1, 1, 1), (1, 0, 1), (1, 0, 0), (1, 1, 0))
CONIFOLD_TRANSFORM = ((1, 1, 2), (0, 1, 1), (0, 0, 1))
CONIFOLD_REEB = (3.0, 1.5, 1.5)


def conifold_toric_data() -> tuple[ToricData, ToricData, UnimodularTransform]:
    """(raw, Gorenstein-normalized, basis change) for the cone over T(1,1).

    The raw Reeb vector is the pullback of (3, 3/2, 3/2) through the basis
    change, so pairings agree between the two presentations.
    """
    t = UnimodularTransform(CONIFOLD_TRANSFORM)
    reeb_raw = tuple(
        float(x) for x in t.inverse.array @ np.array(CONIFOLD_REEB))
    raw = ToricData(3, CONIFOLD_RAW_NORMALS, reeb=reeb_raw)
    normalized = ToricData(3, CONIFOLD_NORMALS, reeb=CONIFOLD_REEB)
    return raw, normalized, t


def apply_transform(t: UnimodularTransform, td: ToricData) -> ToricData:
    """Map normals and Reeb vector to the new basis: v -> T v."""
    m = t.array
    if m.shape[0] != td.n:
        raise ValueError("dimension mismatch")
    normals = tuple(tuple(int(x) for x in m @ np.array(v))
                    for v in td.normals)
    reeb = None
    if td.reeb is not None:
        reeb = tuple(float(x) for x in m @ np.array(td.reeb))
    return ToricData(td.n, normals, reeb=reeb)


def transform_momentum(t: UnimodularTransform, y) -> np.ndarray:
    """Momenta transform dually (T^{-T}) so <v, y> and <B, y> are invariant."""
    inv_t = np.linalg.inv(t.array.astype(float)).T
    return inv_t @ np.asarray(y, dtype=float)


def is_gorenstein(td) -> bool:
    """True iff every facet normal has first component +1.

    Accepts a ToricData or a bare iterable of normal vectors.
    """
    normals = td.normals if isinstance(td, ToricData) else td
    return all(v[0] == 1 for v in normals)


@dataclass(frozen=True)
class FacetFunctions:
    """Evaluators of the affine functions cut out by the toric data."""

    td: ToricData

    def facets(self, y) -> np.ndarray:
        """l_A(y) = <v_A, y> for every facet normal."""
        return self.td.normal_matrix @ np.asarray(y, dtype=float)

    def reeb(self, y) -> float:
        if self.td.reeb is None:
            raise ValueError("toric data has no Reeb vector set")
        return float(np.dot(self.td.reeb, y))

    def boundary(self, y) -> float:
        """l_infinity(y) = <sum_A v_A, y>."""
        return float(np.dot(self.td.normal_sum, y))


def facet_functions(td: ToricData) -> FacetFunctions:
    return FacetFunctions(td)


def momentum_map_t11(p: ChartPoint, basis: str = "transformed") -> np.ndarray:
    """Momentum map of a cone point, in the original or transformed basis.

    original:    (r^2 (cos t1 + 1)/6, r^2 (cos t2 + 1)/6, r^2/3)
    transformed: (r^2 (cos t1 + 1)/6, r^2 (cos t2 - cos t1)/6,
                  -r^2 (cos t1 + cos t2)/6)
    """
    ch = p.chart
    if ch.base is None:
        raise ValueError("momentum map needs a cone-chart point")
    r = p.coord("r")
    c1 = math.cos(p.coord("theta1"))
    c2 = math.cos(p.coord("theta2"))
    r2 = r * r
    if basis == "original":
        return np.array([r2 * (c1 + 1) / 6, r2 * (c2 + 1) / 6, r2 / 3])
    if basis == "transformed":
        return np.array([r2 * (c1 + 1) / 6, r2 * (c2 - c1) / 6,
                         -r2 * (c1 + c2) / 6])
    raise ValueError(f"unknown basis {basis!r}")


def in_cone_interior(td: ToricData, y, eps: float | None = None) -> bool:
    """True iff every facet function exceeds eps (default 1e-9 relative)."""
    y = np.asarray(y, dtype=float)
    if eps is None:
        eps = 1e-9 * float(np.linalg.norm(y))
    elif eps <= 0:
        raise ValueError("eps must be positive")
    return bool(np.all(facet_functions(td).facets(y) > eps))
