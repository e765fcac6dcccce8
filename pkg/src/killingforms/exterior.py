"""Complex-coefficient exterior algebra on a chart.

Forms are evaluators, not expression trees: a `DiffForm` of degree p maps
chart coordinates to a sparse dictionary over strictly increasing index
tuples.  Components at permuted or repeated indices are derived on access.
All coefficient functions must accept dual-number coordinates, which is what
lets the exterior derivative (and towers like d of star) run at machine
precision.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from . import ad
from .chart import Chart, ChartPoint

__all__ = [
    "ScalarField",
    "VectorField",
    "DiffForm",
    "ChartMismatchError",
    "form_from_components",
    "coordinate_differential",
    "constant_form",
    "wedge",
    "exterior_derivative",
    "interior_product",
    "musical_flat",
    "hodge_star",
    "codifferential",
    "scale_form",
    "add_forms",
    "permutation_sign",
]


class ChartMismatchError(ValueError):
    """Operands of an algebraic operation live on different charts."""


def _require_same_chart(*objs):
    charts = {o.chart.name for o in objs}
    if len(charts) > 1:
        raise ChartMismatchError(f"mixed charts: {sorted(charts)}")


def _coords_of(p):
    return list(p.values) if isinstance(p, ChartPoint) else list(p)


def permutation_sign(indices: Sequence[int]) -> int:
    """Sign of the permutation sorting `indices`; 0 if any index repeats."""
    idx = list(indices)
    if len(set(idx)) != len(idx):
        return 0
    sign = 1
    for i in range(len(idx)):
        for j in range(i + 1, len(idx)):
            if idx[i] > idx[j]:
                sign = -sign
    return sign


@dataclass(frozen=True)
class ScalarField:
    """A complex scalar field with jet evaluation up to second order."""

    chart: Chart
    fn: Callable
    label: str = ""

    def value(self, p):
        return self.fn(_coords_of(p))

    def jet1(self, p):
        """(value, gradient) honoring the active derivative mode."""
        coords = _coords_of(p)
        cfg = ad.get_config()
        if cfg.mode == "fd":
            return self.fn(coords), np.array(
                ad.fd_gradient(self.fn, coords, cfg.step))
        res = self.fn(ad.seed1(coords))
        n = len(coords)
        return ad.value_of(res), np.array(
            [ad.partial_of(res, i) for i in range(n)])

    def jet2(self, p):
        """(value, gradient, hessian)."""
        coords = _coords_of(p)
        cfg = ad.get_config()
        if cfg.mode == "fd":
            val, grad = self.jet1(coords)
            return val, grad, np.array(ad.fd_hessian(self.fn, coords, cfg.step))
        res = self.fn(ad.seed2(coords))
        n = len(coords)
        val = ad.deep_value(res)
        grad = np.array([ad.value_of(ad.partial_of(ad.value_of(res), i))
                         for i in range(n)])
        hess = np.array([[ad.hessian_entry(res, i, j) for j in range(n)]
                         for i in range(n)])
        return val, grad, hess


@dataclass(frozen=True)
class VectorField:
    """Components of a vector field in the chart's coordinate frame."""

    chart: Chart
    fn: Callable
    label: str = ""

    def values(self, p) -> np.ndarray:
        comps = self.fn(_coords_of(p))
        if len(comps) != self.chart.dim:
            raise ValueError("component count != chart dimension")
        return np.asarray([complex(c) for c in comps])


@dataclass(frozen=True)
class DiffForm:
    """Degree-p form given by a sparse evaluator over increasing index tuples.

    `coeff_fn(coords)` returns a mapping {increasing index tuple: value};
    missing tuples are zero.  The evaluator must be pure and accept dual
    coordinates.
    """

    chart: Chart
    degree: int
    coeff_fn: Callable
    label: str = ""

    def __post_init__(self):
        if not 0 <= self.degree <= self.chart.dim:
            raise ValueError(f"degree {self.degree} out of range")

    def coeffs(self, coords) -> dict:
        return self.coeff_fn(list(coords))

    def at(self, p) -> dict:
        """Numeric components at a point, complex-valued, increasing tuples."""
        return {k: complex(ad.deep_value(v))
                for k, v in self.coeffs(_coords_of(p)).items()}

    def component(self, p, indices: Sequence[int]):
        """Component at an arbitrary index tuple (sign-aware, 0 on repeats)."""
        sign = permutation_sign(indices)
        if sign == 0:
            return 0.0 + 0.0j
        key = tuple(sorted(indices))
        return sign * self.at(p).get(key, 0.0 + 0.0j)

    def dense(self, p) -> np.ndarray:
        """Fully antisymmetric dense array of shape (dim,) * degree."""
        return dense_from_sparse(self.at(p), self.chart.dim, self.degree)

    def max_abs(self, points: Iterable) -> float:
        m = 0.0
        for p in points:
            vals = self.at(p)
            if vals:
                m = max(m, max(abs(v) for v in vals.values()))
        return m


def dense_from_sparse(sparse: Mapping, dim: int, degree: int) -> np.ndarray:
    arr = np.zeros((dim,) * degree, dtype=complex)
    if degree == 0:
        return np.asarray(sparse.get((), 0.0), dtype=complex)
    for key, v in sparse.items():
        if v == 0:
            continue
        for perm in itertools.permutations(range(degree)):
            sign = permutation_sign(perm)
            arr[tuple(key[q] for q in perm)] = sign * v
    return arr


def form_from_components(chart: Chart, degree: int, components: Mapping,
                         label: str = "") -> DiffForm:
    """Build a form from {increasing tuple: constant or coords->value}."""
    comps = dict(components)
    for key in comps:
        if list(key) != sorted(set(key)) or len(key) != degree:
            raise ValueError(f"component key {key} is not increasing "
                             f"of length {degree}")

    def coeff_fn(coords):
        out = {}
        for key, c in comps.items():
            out[key] = c(coords) if callable(c) else c
        return out

    return DiffForm(chart, degree, coeff_fn, label=label)


def coordinate_differential(chart: Chart, index: int) -> DiffForm:
    """The 1-form dx^index."""
    return form_from_components(chart, 1, {(index,): 1.0},
                                label=f"d{chart.coords[index]}")


def constant_form(chart: Chart, value) -> DiffForm:
    return DiffForm(chart, 0, lambda coords: {(): value}, label="const")


def scale_form(a: DiffForm, scalar, label: str = "") -> DiffForm:
    """Multiply a form by a constant or by a scalar evaluator coords->value."""
    if callable(scalar):
        def coeff_fn(coords):
            s = scalar(coords)
            return {k: s * v for k, v in a.coeffs(coords).items()}
    else:
        def coeff_fn(coords):
            return {k: scalar * v for k, v in a.coeffs(coords).items()}
    return DiffForm(a.chart, a.degree, coeff_fn, label=label or a.label)


def add_forms(a: DiffForm, b: DiffForm, label: str = "") -> DiffForm:
    _require_same_chart(a, b)
    if a.degree != b.degree:
        raise ValueError("cannot add forms of different degree")

    def coeff_fn(coords):
        out = dict(a.coeffs(coords))
        for k, v in b.coeffs(coords).items():
            out[k] = out.get(k, 0.0) + v
        return out

    return DiffForm(a.chart, a.degree, coeff_fn, label=label)


def _merge_sign(left: tuple, right: tuple) -> int:
    """Sign from sorting the concatenation of two increasing tuples."""
    sign = 1
    for i in left:
        for j in right:
            if i == j:
                return 0
            if i > j:
                sign = -sign
    return sign


def wedge(a: DiffForm, b: DiffForm, label: str = "") -> DiffForm:
    """Wedge product; bilinear and graded-commutative by construction."""
    _require_same_chart(a, b)
    degree = a.degree + b.degree
    if degree > a.chart.dim:
        raise ValueError("wedge degree exceeds chart dimension")

    def coeff_fn(coords):
        ca = a.coeffs(coords)
        cb = b.coeffs(coords)
        out = {}
        for ka, va in ca.items():
            for kb, vb in cb.items():
                sign = _merge_sign(ka, kb)
                if sign == 0:
                    continue
                key = tuple(sorted(ka + kb))
                term = sign * va * vb
                out[key] = out.get(key, 0.0) + term
        return out

    return DiffForm(a.chart, degree, coeff_fn,
                    label=label or f"{a.label}^{b.label}")


def exterior_derivative(a: DiffForm, label: str = "") -> DiffForm:
    """The exterior derivative; uses the active derivative mode for partials."""
    if a.degree >= a.chart.dim:
        raise ValueError("exterior derivative of a top-degree form; "
                         "the result is identically zero")
    n = a.chart.dim

    def coeff_fn(coords):
        cfg = ad.get_config()
        if cfg.mode == "fd":
            partials = _fd_coeff_partials(a, coords, cfg.step)
        else:
            seeded = ad.seed1(coords)
            raw = a.coeffs(seeded)
            partials = {k: [ad.partial_of(v, i) for i in range(n)]
                        for k, v in raw.items()}
        out = {}
        for key, dvals in partials.items():
            for i in range(n):
                dv = dvals[i]
                if isinstance(dv, (int, float, complex)) and dv == 0:
                    continue
                if i in key:
                    continue
                pos = sum(1 for k in key if k < i)
                sign = (-1) ** pos
                new_key = tuple(sorted(key + (i,)))
                out[new_key] = out.get(new_key, 0.0) + sign * dv
        return out

    return DiffForm(a.chart, a.degree + 1, coeff_fn,
                    label=label or f"d{a.label}")


def _fd_coeff_partials(a: DiffForm, coords, step):
    n = a.chart.dim
    keys = set()
    shifted = {}
    for i in range(n):
        for s in (+1, -1):
            cs = list(coords)
            cs[i] = cs[i] + s * step
            d = a.coeffs(cs)
            shifted[(i, s)] = d
            keys.update(d.keys())
    return {k: [(shifted[(i, 1)].get(k, 0.0) - shifted[(i, -1)].get(k, 0.0))
                / (2.0 * step) for i in range(n)] for k in keys}


def interior_product(x: VectorField, a: DiffForm, label: str = "") -> DiffForm:
    """Contraction of the first slot of a form with a vector field."""
    _require_same_chart(x, a)
    if a.degree < 1:
        raise ValueError("interior product needs degree >= 1")

    def coeff_fn(coords):
        xv = x.fn(list(coords))
        ca = a.coeffs(coords)
        out = {}
        for key, v in ca.items():
            for m, j in enumerate(key):
                rest = key[:m] + key[m + 1:]
                term = ((-1) ** m) * xv[j] * v
                out[rest] = out.get(rest, 0.0) + term
        return out

    return DiffForm(a.chart, a.degree - 1, coeff_fn,
                    label=label or f"{x.label}_contract_{a.label}")


def musical_flat(g, x: VectorField, label: str = "") -> DiffForm:
    """Index-lowering: the 1-form with components g_ij X^j."""
    _require_same_chart(g, x)
    n = g.chart.dim

    def coeff_fn(coords):
        gm = g.fn(list(coords))
        xv = x.fn(list(coords))
        out = {}
        for i in range(n):
            acc = 0.0
            for j in range(n):
                gij = gm[i][j]
                if isinstance(gij, (int, float)) and gij == 0.0:
                    continue
                acc = acc + gij * xv[j]
            out[(i,)] = acc
        return out

    return DiffForm(g.chart, 1, coeff_fn, label=label or f"{x.label}_flat")


def _increasing_tuples(n: int, p: int):
    return list(itertools.combinations(range(n), p))


def _submatrix_det(ginv, rows: tuple, cols: tuple):
    sub = [[ginv[r][c] for c in cols] for r in rows]
    k = len(rows)
    if k == 0:
        return 1.0
    if k == 1:
        return sub[0][0]
    if k == 2:
        return sub[0][0] * sub[1][1] - sub[0][1] * sub[1][0]
    if k == 3:
        return (sub[0][0] * (sub[1][1] * sub[2][2] - sub[1][2] * sub[2][1])
                - sub[0][1] * (sub[1][0] * sub[2][2] - sub[1][2] * sub[2][0])
                + sub[0][2] * (sub[1][0] * sub[2][1] - sub[1][1] * sub[2][0]))
    return ad.mat_det(sub)


def hodge_star(g, a: DiffForm, label: str = "") -> DiffForm:
    """Hodge dual with respect to a Riemannian metric.

    Raising the p indices of an antisymmetric form is the p-th compound matrix
    of the inverse metric acting on the increasing components, so the star is
    a complement-with-sign of that, times sqrt(det g).
    """
    _require_same_chart(g, a)
    n = g.chart.dim
    p = a.degree
    full = tuple(range(n))

    def coeff_fn(coords):
        gm = g.fn(list(coords))
        det = ad.mat_det(gm)
        if ad.deep_value(det) <= 0.0:
            raise ad.SingularMatrixError("metric not positive at point")
        ginv = ad.mat_inv(gm)
        sq = ad.sqrt(det)
        ca = a.coeffs(coords)
        out = {}
        for key_in in _increasing_tuples(n, p):
            # raised component a^I
            acc = 0.0
            for key_j, v in ca.items():
                acc = acc + _submatrix_det(ginv, key_in, key_j) * v
            if isinstance(acc, (int, float, complex)) and acc == 0.0:
                continue
            comp = tuple(sorted(set(full) - set(key_in)))
            sign = permutation_sign(key_in + comp)
            out[comp] = out.get(comp, 0.0) + sign * sq * acc
        return out

    return DiffForm(g.chart, n - p, coeff_fn, label=label or f"star_{a.label}")


def codifferential(g, a: DiffForm, label: str = "") -> DiffForm:
    """Adjoint of d: (-1)^(n(p+1)+1) star d star on p-forms, Riemannian."""
    if a.degree < 1:
        raise ValueError("codifferential needs degree >= 1")
    n = g.chart.dim
    sign = (-1.0) ** (n * (a.degree + 1) + 1)
    inner = hodge_star(g, a)
    d_inner = exterior_derivative(inner)
    outer = hodge_star(g, d_inner)
    return scale_form(outer, sign, label=label or f"codiff_{a.label}")
