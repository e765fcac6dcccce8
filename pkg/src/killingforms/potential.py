"""Symplectic potential from toric data and the route to complex coordinates.

The potential is the canonical log-affine expression plus the Reeb correction

    G(y) = 1/2 sum_A l_A log l_A + 1/2 l_B log l_B - 1/2 l_inf log l_inf + h

with l_A = <v_A, y>, l_B = <B, y>, l_inf = <sum v_A, y>.  For the conifold the
extra term h vanishes.  Its gradient gives the real parts of the complex
coordinates, its Hessian the toric metric, and Ricci-flatness of the cone is
the statement that log det G_ij + 2 x^1 is constant on the momentum domain.
The Reeb vector is recovered numerically by minimizing the variance of that
combination.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import optimize

from . import ad
from .chart import Chart, ChartPoint, cone_chart, sample_points, t11_chart
from .exterior import ScalarField
from .toric import ToricData, facet_functions, is_gorenstein, momentum_map_t11

__all__ = [
    "SymplecticPotential",
    "OutOfDomainError",
    "ReebSearchError",
    "eval_G",
    "grad_G",
    "hessian_G",
    "legendre_F",
    "newton_invert_gradient",
    "ricci_flat_residual",
    "reeb_search",
    "complex_coords_t11",
    "complex_coordinate_fields",
    "conifold_momenta",
]


class OutOfDomainError(ValueError):
    """Momentum left the cone interior (some affine function l <= 0)."""


class ReebSearchError(RuntimeError):
    """The Reeb optimizer failed to reach the requested tolerance."""


@dataclass(frozen=True)
class SymplecticPotential:
    """Toric symplectic potential; `extra` is an optional degree-1 term.

    No solver for `extra` is provided: for the conifold the log-affine part
    already satisfies the Ricci-flatness condition, so it defaults to absent.
    """

    td: ToricData
    extra: Optional[Callable] = None

    def __post_init__(self):
        if self.td.reeb is None:
            raise ValueError("toric data needs a Reeb vector")

    def _affine_values(self, y):
        f = facet_functions(self.td)
        ls = f.facets(y)
        lb = f.reeb(y)
        linf = f.boundary(y)
        if np.any(ls <= 0.0) or lb <= 0.0 or linf <= 0.0:
            raise OutOfDomainError(
                f"momentum {np.asarray(y)!r} outside the cone interior")
        return ls, lb, linf


def eval_G(sp: SymplecticPotential, y) -> float:
    """G(y); raises OutOfDomainError off the cone interior."""
    ls, lb, linf = sp._affine_values(y)
    val = 0.5 * float(np.sum(ls * np.log(ls)))
    val += 0.5 * lb * math.log(lb) - 0.5 * linf * math.log(linf)
    if sp.extra is not None:
        val += sp.extra(y)
    return val


def grad_G(sp: SymplecticPotential, y) -> np.ndarray:
    """x^i = dG/dy^i, with all additive constants carried exactly."""
    ls, lb, linf = sp._affine_values(y)
    vm = sp.td.normal_matrix
    b = np.asarray(sp.td.reeb)
    vs = sp.td.normal_sum
    x = 0.5 * vm.T @ (1.0 + np.log(ls))
    x += 0.5 * b * (1.0 + math.log(lb))
    x -= 0.5 * vs * (1.0 + math.log(linf))
    if sp.extra is not None:
        x = x + _fd_grad(sp.extra, y)
    return x


def hessian_G(sp: SymplecticPotential, y) -> tuple[np.ndarray, np.ndarray]:
    """(G_ij, F_ij) with F the inverse Hessian.

    Raises OutOfDomainError off the domain and ValueError if the Hessian is
    not positive definite (a symptom of a bad Reeb vector).
    """
    ls, lb, linf = sp._affine_values(y)
    vm = sp.td.normal_matrix
    b = np.asarray(sp.td.reeb)
    vs = sp.td.normal_sum
    g = 0.5 * np.einsum("ai,aj,a->ij", vm, vm, 1.0 / ls)
    g += 0.5 * np.outer(b, b) / lb
    g -= 0.5 * np.outer(vs, vs) / linf
    if sp.extra is not None:
        g = g + _fd_hess(sp.extra, y)
    try:
        np.linalg.cholesky(g)
    except np.linalg.LinAlgError as exc:
        raise ValueError("Hessian not positive definite at this momentum; "
                         "check the Reeb vector and the domain") from exc
    return g, np.linalg.inv(g)


def _fd_grad(fn, y, h: float = 1e-7):
    y = np.asarray(y, dtype=float)
    out = np.empty_like(y)
    for i in range(y.size):
        e = np.zeros_like(y)
        e[i] = h
        out[i] = (fn(y + e) - fn(y - e)) / (2 * h)
    return out


def _fd_hess(fn, y, h: float = 1e-5):
    y = np.asarray(y, dtype=float)
    n = y.size
    out = np.empty((n, n))
    for i in range(n):
        e = np.zeros(n)
        e[i] = h
        out[i] = (_fd_grad(fn, y + e) - _fd_grad(fn, y - e)) / (2 * h)
    return 0.5 * (out + out.T)


def legendre_F(sp: SymplecticPotential, y) -> tuple[float, np.ndarray]:
    """(F, x) with x = grad G(y) and F(x) = <x, y> - G(y).

    The duality F + G = <x, y> holds by construction and is asserted.
    """
    y = np.asarray(y, dtype=float)
    x = grad_G(sp, y)
    g = eval_G(sp, y)
    f = float(np.dot(x, y)) - g
    assert abs(f + g - float(np.dot(x, y))) < 1e-12 * max(1.0, abs(f) + abs(g))
    return f, x


def newton_invert_gradient(sp: SymplecticPotential, x_target, y0,
                           tol: float = 1e-12, max_iter: int = 50) -> np.ndarray:
    """Solve grad G(y) = x_target by Newton iteration from y0."""
    y = np.asarray(y0, dtype=float).copy()
    for _ in range(max_iter):
        resid = grad_G(sp, y) - np.asarray(x_target)
        if np.max(np.abs(resid)) < tol:
            return y
        g, _ = hessian_G(sp, y)
        y = y - np.linalg.solve(g, resid)
    raise RuntimeError("Newton inversion of the momentum map did not converge")


def ricci_flat_residual(sp: SymplecticPotential, momenta,
                        tolerance: float = 1e-8):
    """Deviation of s(y) = log det G_ij + 2 x^1 from its mean over momenta.

    Constancy of s is the Ricci-flatness condition for this log-affine
    ansatz; the fitted constant is -c = mean(s).
    """
    from .report import from_samples

    values = []
    for y in momenta:
        g, _ = hessian_G(sp, y)
        x = grad_G(sp, y)
        values.append(math.log(np.linalg.det(g)) + 2.0 * x[0])
    values = np.asarray(values)
    mean = float(values.mean())
    dev = np.abs(values - mean)
    return from_samples("ricci-flat-potential", dev, tolerance,
                        n_points=len(values), fitted={"constant": -mean})


def _constancy_defect(sp: SymplecticPotential, momenta) -> float:
    vals = []
    for y in momenta:
        g, _ = hessian_G(sp, y)
        vals.append(math.log(np.linalg.det(g)) + 2.0 * grad_G(sp, y)[0])
    return float(np.var(vals))


def reeb_search(td: ToricData, fixed_first: float = 3.0,
                momenta=None, seed: int = 0, n_samples: int = 64,
                start: tuple[float, float] | None = None,
                tol: float = 1e-10, max_iter: int = 500):
    """Recover the Reeb vector by minimizing the Ricci-flatness defect.

    The first component is pinned (the Calabi-Yau normalization in the
    Gorenstein basis); the remaining components minimize the variance of
    log det G_ij + 2 x^1 over a fixed momentum sample.  Returns
    (reeb, objective, n_iterations).
    """
    if not is_gorenstein(td):
        raise ValueError("reeb_search expects Gorenstein-normalized data")
    if momenta is None:
        momenta = conifold_momenta(n_samples, seed)
    momenta = [np.asarray(y, dtype=float) for y in momenta]

    def objective(params):
        cand = ToricData(td.n, td.normals,
                         reeb=(fixed_first, *map(float, params)))
        sp = SymplecticPotential(cand)
        try:
            return _constancy_defect(sp, momenta)
        except (OutOfDomainError, ValueError):
            return 1e6

    x0 = np.asarray(start if start is not None
                    else [fixed_first / 2.0] * (td.n - 1), dtype=float)
    res = optimize.minimize(objective, x0, method="Nelder-Mead",
                            options={"xatol": 1e-8, "fatol": 1e-14,
                                     "maxiter": max_iter})
    best = float(res.fun)
    if best > tol:
        raise ReebSearchError(
            f"variance {best:.3e} above tolerance {tol:.1e} "
            f"after {res.nit} iterations")
    reeb = np.array([fixed_first, *res.x])
    return reeb, best, int(res.nit)


def conifold_momenta(n: int, seed: int,
                     chart: Chart | None = None) -> list[np.ndarray]:
    """Momentum-map images of sampled cone points (transformed basis)."""
    cone = chart or cone_chart(t11_chart())
    return [momentum_map_t11(p, basis="transformed")
            for p in sample_points(cone, n, seed)]


# ---------------------------------------------------------------------------
# Complex coordinates on the cone over T(1,1).

def _z_values(r, th1, th2, ph1, ph2, psi, phi1_sign: float):
    """The three complex coordinates; dual-capable.

    The imaginary parts are the torus action angles
    (psi, (phi1_sign*phi1 + phi2 + psi)/2, (-phi1 - phi2 + psi)/2); the
    angle-consistent choice is phi1_sign = -1, which is the one that makes
    the holomorphic volume form parallel (see the display diagnostics for
    the sign discrepancy in the published coordinate patch).
    """
    logr = ad.log(r)
    z1 = (3.0 * logr + ad.log(ad.sin(th1)) + ad.log(ad.sin(th2))
          + 1j * psi)
    z2 = (1.5 * logr + ad.log(ad.sin(0.5 * th1)) + ad.log(ad.cos(0.5 * th2))
          + 0.5j * (psi + phi1_sign * ph1 + ph2))
    z3 = (1.5 * logr + ad.log(ad.sin(0.5 * th1)) + ad.log(ad.sin(0.5 * th2))
          + 0.5j * (psi - ph1 - ph2))
    return z1, z2, z3


def complex_coords_t11(p: ChartPoint, phi1_sign: float = -1.0) -> np.ndarray:
    """z = x + i Phi at a cone point, additive constants dropped."""
    if p.chart.base is None:
        raise ValueError("complex coordinates need a cone-chart point")
    r, th1, ph1, th2, ph2, psi = p.values
    return np.array(_z_values(r, th1, th2, ph1, ph2, psi, phi1_sign))


def complex_coordinate_fields(cone: Chart,
                              phi1_sign: float = -1.0) -> tuple[ScalarField, ...]:
    """The z^i as scalar fields on the cone chart (for exterior calculus)."""

    def make(i):
        def fn(coords):
            r, th1, ph1, th2, ph2, psi = coords
            return _z_values(r, th1, th2, ph1, ph2, psi, phi1_sign)[i]
        return ScalarField(cone, fn, label=f"z{i + 1}")

    return tuple(make(i) for i in range(3))
