"""Metric fields, Levi-Civita connection, curvature, and the T(1,1) metric.

Curvature is computed in coordinates from Christoffel symbols and their first
derivatives; all metric derivatives come from the dual-number machinery (or
finite differences in cross-check mode).  Matrix inversion goes through
Cholesky so a degenerate metric fails loudly instead of being regularized.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import ad
from .chart import Chart, ChartPoint, cone_chart, t11_chart
from .exterior import DiffForm, VectorField, dense_from_sparse
from .report import ResidualReport, from_samples

__all__ = [
    "MetricField",
    "SingularMetricError",
    "t11_metric",
    "cone_metric",
    "flat_metric",
    "round_sphere_metric",
    "christoffel",
    "christoffel_generic",
    "metric_inverse",
    "covariant_derivative_form",
    "covariant_derivative_vector",
    "covariant_derivative_tensor02",
    "covariant_derivative_tensor11",
    "ricci",
    "einstein_residual",
]


class SingularMetricError(ArithmeticError):
    """The metric degenerated at an evaluation point."""


def _coords_of(p):
    return list(p.values) if isinstance(p, ChartPoint) else list(p)


@dataclass(frozen=True)
class MetricField:
    """Symmetric 2-tensor field; `fn(coords)` returns an n x n nested list.

    The evaluator must be symmetric, pure, and accept dual coordinates so that
    first and second derivatives are available.
    """

    chart: Chart
    fn: Callable
    label: str = ""

    def matrix(self, p) -> np.ndarray:
        m = np.array([[ad.deep_value(x) for x in row]
                      for row in self.fn(_coords_of(p))], dtype=float)
        if not np.array_equal(m, m.T):
            raise ValueError("metric evaluator returned a non-symmetric matrix")
        return m

    def jet1(self, p):
        """(g, dg) with dg[k, i, j] = d_k g_ij."""
        coords = _coords_of(p)
        n = self.chart.dim
        cfg = ad.get_config()
        if cfg.mode == "fd":
            g = self.matrix(coords)
            dg = np.empty((n, n, n))
            for k in range(n):
                cp, cm = list(coords), list(coords)
                cp[k] += cfg.step
                cm[k] -= cfg.step
                dg[k] = (self.matrix(cp) - self.matrix(cm)) / (2 * cfg.step)
            return g, dg
        raw = self.fn(ad.seed1(coords))
        g = np.array([[ad.value_of(x) for x in row] for row in raw])
        dg = np.array([[[ad.partial_of(raw[i][j], k) for j in range(n)]
                        for i in range(n)] for k in range(n)])
        return g, dg

    def jet2(self, p):
        """(g, dg, ddg) with ddg[k, l, i, j] = d_k d_l g_ij."""
        coords = _coords_of(p)
        n = self.chart.dim
        cfg = ad.get_config()
        if cfg.mode == "fd":
            g, dg = self.jet1(coords)
            ddg = np.empty((n, n, n, n))
            for k in range(n):
                cp, cm = list(coords), list(coords)
                cp[k] += cfg.step
                cm[k] -= cfg.step
                ddg[k] = (self.jet1(cp)[1] - self.jet1(cm)[1]) / (2 * cfg.step)
            return g, dg, ddg
        raw = self.fn(ad.seed2(coords))
        g = np.array([[ad.deep_value(x) for x in row] for row in raw])
        dg = np.empty((n, n, n))
        ddg = np.empty((n, n, n, n))
        for i in range(n):
            for j in range(n):
                entry = raw[i][j]
                for k in range(n):
                    outer = ad.partial_of(entry, k)
                    dg[k, i, j] = ad.deep_value(outer)
                    for l in range(n):
                        ddg[k, l, i, j] = ad.value_of(ad.partial_of(outer, l))
        return g, dg, ddg


def metric_inverse(g_matrix: np.ndarray) -> np.ndarray:
    """Inverse after a Cholesky positivity check."""
    try:
        np.linalg.cholesky(g_matrix)
    except np.linalg.LinAlgError as exc:
        raise SingularMetricError("metric not positive definite") from exc
    return np.linalg.inv(g_matrix)


def t11_metric(chart: Chart | None = None,
               round_coeff: float = 1.0 / 6.0,
               fiber_coeff: float = 1.0 / 9.0) -> MetricField:
    """The homogeneous Sasaki-Einstein metric on T(1,1).

    ds^2 = round_coeff * (dtheta1^2 + sin^2 theta1 dphi1^2
                          + dtheta2^2 + sin^2 theta2 dphi2^2)
         + fiber_coeff * (dpsi + cos theta1 dphi1 + cos theta2 dphi2)^2

    The coefficient arguments exist as a debug hook for negative controls;
    the Einstein property holds only at the defaults (1/6, 1/9).
    """
    ch = chart or t11_chart()
    a, b = round_coeff, fiber_coeff

    def fn(coords):
        th1, _, th2, _, _ = coords
        s1, c1 = ad.sin(th1), ad.cos(th1)
        s2, c2 = ad.sin(th2), ad.cos(th2)
        g = [[0.0] * 5 for _ in range(5)]
        g[0][0] = a
        g[2][2] = a
        g[1][1] = a * s1 * s1 + b * c1 * c1
        g[3][3] = a * s2 * s2 + b * c2 * c2
        g[4][4] = b
        g[1][4] = g[4][1] = b * c1
        g[3][4] = g[4][3] = b * c2
        g[1][3] = g[3][1] = b * c1 * c2
        return g

    return MetricField(ch, fn, label="t11")


def cone_metric(g: MetricField,
                r_range: tuple[float, float] = (0.5, 2.0)) -> MetricField:
    """The metric dr^2 + r^2 g on the cone chart over g's chart."""
    cone = cone_chart(g.chart, r_range)
    n = g.chart.dim

    def fn(coords):
        r = coords[0]
        r2 = r * r
        base = g.fn(coords[1:])
        out = [[0.0] * (n + 1) for _ in range(n + 1)]
        out[0][0] = 1.0
        for i in range(n):
            for j in range(n):
                bij = base[i][j]
                if isinstance(bij, (int, float)) and bij == 0.0:
                    continue
                out[i + 1][j + 1] = r2 * bij
        return out

    return MetricField(cone, fn, label=f"cone({g.label})")


def flat_metric(chart: Chart) -> MetricField:
    n = chart.dim

    def fn(coords):
        return [[1.0 if i == j else 0.0 for j in range(n)] for i in range(n)]

    return MetricField(chart, fn, label="flat")


def round_sphere_metric(chart: Chart) -> MetricField:
    """Unit 2-sphere metric dtheta^2 + sin^2 theta dphi^2 (test fixture)."""

    def fn(coords):
        th = coords[0]
        s = ad.sin(th)
        return [[1.0, 0.0], [0.0, s * s]]

    return MetricField(chart, fn, label="sphere2")


def christoffel(g: MetricField, p) -> np.ndarray:
    """Gamma^k_ij of the Levi-Civita connection at a point (float path)."""
    gm, dg = g.jet1(p)
    ginv = metric_inverse(gm)
    # bracket[l, i, j] = d_i g_jl + d_j g_il - d_l g_ij
    bracket = (np.einsum("ijl->lij", dg) + np.einsum("jil->lij", dg) - dg)
    return 0.5 * np.einsum("kl,lij->kij", ginv, bracket)


def christoffel_generic(g: MetricField, coords) -> list:
    """Christoffel symbols as nested lists, valid for dual coordinates."""
    n = g.chart.dim
    raw = g.fn(ad.seed1(list(coords)))
    gm = [[ad.value_of(raw[i][j]) for j in range(n)] for i in range(n)]
    ginv = ad.mat_inv(gm)
    dg = [[[ad.partial_of(raw[i][j], k) for j in range(n)] for i in range(n)]
          for k in range(n)]
    gamma = [[[0.0] * n for _ in range(n)] for _ in range(n)]
    for k in range(n):
        for i in range(n):
            for j in range(i, n):
                acc = 0.0
                for l in range(n):
                    acc = acc + ginv[k][l] * (dg[i][j][l] + dg[j][i][l]
                                              - dg[l][i][j])
                acc = 0.5 * acc
                gamma[k][i][j] = acc
                gamma[k][j][i] = acc
    return gamma


def _christoffel_with_derivative(g: MetricField, p):
    """(Gamma, dGamma) with dGamma[m, k, i, j] = d_m Gamma^k_ij."""
    gm, dg, ddg = g.jet2(p)
    ginv = metric_inverse(gm)
    bracket = np.einsum("ijl->lij", dg) + np.einsum("jil->lij", dg) - dg
    gamma = 0.5 * np.einsum("kl,lij->kij", ginv, bracket)
    # d_m g^{kl} = -g^{ka} (d_m g_ab) g^{bl}
    dginv = -np.einsum("ka,mab,bl->mkl", ginv, dg, ginv)
    dbracket = (np.einsum("imjl->mlij", ddg) + np.einsum("jmil->mlij", ddg)
                - ddg)
    dgamma = (0.5 * np.einsum("mkl,lij->mkij", dginv, bracket)
              + 0.5 * np.einsum("kl,mlij->mkij", ginv, dbracket))
    return gamma, dgamma


def ricci(g: MetricField, p) -> np.ndarray:
    """Ricci tensor Ric_ij = R^k_ikj from the coordinate formula."""
    gamma, dgamma = _christoffel_with_derivative(g, p)
    term1 = np.einsum("kkij->ij", dgamma)
    term2 = np.einsum("ikkj->ij", dgamma)
    term3 = np.einsum("kkl,lij->ij", gamma, gamma)
    term4 = np.einsum("kil,lkj->ij", gamma, gamma)
    return term1 - term2 + term3 - term4


def covariant_derivative_form(g: MetricField, a: DiffForm, p) -> np.ndarray:
    """nabla a as a dense array D[i, j1..jp] = nabla_i a_{j1..jp}."""
    if a.chart.name != g.chart.name:
        raise ValueError("form and metric live on different charts")
    n = g.chart.dim
    deg = a.degree
    coords = _coords_of(p)
    gamma = christoffel(g, coords)
    cfg = ad.get_config()
    if cfg.mode == "fd":
        darr = np.empty((n,) + (n,) * deg, dtype=complex)
        for k in range(n):
            cp, cm = list(coords), list(coords)
            cp[k] += cfg.step
            cm[k] -= cfg.step
            darr[k] = (a.dense(cp) - a.dense(cm)) / (2 * cfg.step)
    else:
        seeded = ad.seed1(coords)
        raw = a.coeffs(seeded)
        darr = np.zeros((n,) + (n,) * deg, dtype=complex)
        for k in range(n):
            sparse_k = {key: ad.partial_of(v, k) for key, v in raw.items()}
            darr[k] = dense_from_sparse(
                {key: complex(ad.deep_value(v)) for key, v in sparse_k.items()},
                n, deg)
    dense0 = a.dense(coords)
    nabla = darr.copy()
    for slot in range(deg):
        # contract Gamma^l_{i j_slot} with a_{.. l ..}; result axes come out
        # as (i, j_slot, j_0 .. without slot ..), so restore the slot order
        contracted = np.tensordot(gamma, dense0, axes=([0], [slot]))
        perm = [0]
        for q in range(deg):
            if q == slot:
                perm.append(1)
            elif q < slot:
                perm.append(2 + q)
            else:
                perm.append(1 + q)
        nabla -= np.transpose(contracted, axes=perm)
    return nabla


def covariant_derivative_vector(g: MetricField, x: VectorField, coords):
    """nabla X as nested lists D[i][k] = nabla_i X^k, dual-capable."""
    n = g.chart.dim
    seeded = ad.seed1(list(coords))
    raw = x.fn(seeded)
    vals = [ad.value_of(v) for v in raw]
    gamma = christoffel_generic(g, coords)
    out = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for k in range(n):
            acc = ad.partial_of(raw[k], i)
            for l in range(n):
                acc = acc + gamma[k][i][l] * vals[l]
            out[i][k] = acc
    return out


def covariant_derivative_tensor02(g: MetricField, t_fn: Callable, p):
    """nabla T for a (0,2)-tensor evaluator; returns D[k, i, j] (floats)."""
    n = g.chart.dim
    coords = _coords_of(p)
    gamma = christoffel(g, coords)
    seeded = ad.seed1(coords)
    raw = t_fn(seeded)
    t0 = np.array([[ad.deep_value(ad.value_of(raw[i][j])) for j in range(n)]
                   for i in range(n)], dtype=complex)
    dt = np.array([[[ad.deep_value(ad.partial_of(raw[i][j], k))
                     for j in range(n)] for i in range(n)] for k in range(n)],
                  dtype=complex)
    corr1 = np.einsum("lki,lj->kij", gamma, t0)
    corr2 = np.einsum("lkj,il->kij", gamma, t0)
    return dt - corr1 - corr2


def covariant_derivative_tensor11(g: MetricField, j_fn: Callable, p):
    """nabla J for a (1,1)-tensor evaluator J[i][j] = J^i_j; D[k, i, j]."""
    n = g.chart.dim
    coords = _coords_of(p)
    gamma = christoffel(g, coords)
    seeded = ad.seed1(coords)
    raw = j_fn(seeded)
    j0 = np.array([[ad.deep_value(ad.value_of(raw[i][j])) for j in range(n)]
                   for i in range(n)], dtype=complex)
    dj = np.array([[[ad.deep_value(ad.partial_of(raw[i][j], k))
                     for j in range(n)] for i in range(n)] for k in range(n)],
                  dtype=complex)
    up = np.einsum("ikl,lj->kij", gamma, j0)
    down = np.einsum("lkj,il->kij", gamma, j0)
    return dj + up - down


def einstein_residual(g: MetricField, lam: float, points,
                      tolerance: float = 1e-7) -> ResidualReport:
    """Statistics of max_ij |Ric_ij - lam * g_ij| over sample points."""
    residuals = []
    for p in points:
        ric = ricci(g, p)
        gm = g.matrix(p)
        residuals.append(np.max(np.abs(ric - lam * gm)))
    return from_samples(f"einstein(lambda={lam:g})", residuals, tolerance,
                        n_points=len(residuals))
