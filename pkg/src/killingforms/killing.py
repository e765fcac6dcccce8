"""Killing-form candidates on T(1,1) and the cone correspondence.

Builds the contact one-form and Reeb field, the canonical forms eta ^ d(eta)
etc., the holomorphic volume form of the cone from the complex coordinates,
and the lift/extraction pair that exchanges special Killing forms on the base
with parallel forms on the cone.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import ad
from .chart import Chart, ChartPoint, cone_chart, sample_points, t11_chart
from .exterior import (DiffForm, VectorField, dense_from_sparse,
                       exterior_derivative, interior_product, scale_form,
                       wedge)
from .metric import MetricField, metric_inverse, t11_metric
from .potential import complex_coordinate_fields

__all__ = [
    "KillingCandidate",
    "StackelKillingTensor",
    "ShapeAssumptionError",
    "contact_form_t11",
    "reeb_field_t11",
    "canonical_forms",
    "re_im_psi_closed_forms",
    "holomorphic_volume_form",
    "cone_lift",
    "extract_base_form",
    "stackel_killing",
    "stackel_matrix_fast",
    "all_candidates",
    "fit_global_scale",
    "angular_part",
    "reference_one_forms",
    "bracketed_psi_display",
    "COMPONENT_DESCRIPTIONS",
]


class ShapeAssumptionError(RuntimeError):
    """A cone form did not have the lift shape r^p dr ^ psi + r^(p+1)/(p+1) d psi."""


@dataclass(frozen=True)
class KillingCandidate:
    """A labeled candidate form together with its expected equation class."""

    form: DiffForm
    degree: int
    kind: str  # "special_killing" | "closed_conformal"
    label: str

    def __post_init__(self):
        if self.kind not in ("special_killing", "closed_conformal"):
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.degree != self.form.degree:
            raise ValueError("degree does not match the form")


def contact_form_t11(chart: Chart | None = None) -> DiffForm:
    """eta = 1/3 (dpsi + cos theta1 dphi1 + cos theta2 dphi2)."""
    ch = chart or t11_chart()

    def coeffs(c):
        return {(4,): 1.0 / 3.0,
                (1,): ad.cos(c[0]) / 3.0,
                (3,): ad.cos(c[2]) / 3.0}

    return DiffForm(ch, 1, coeffs, label="eta")


def reeb_field_t11(chart: Chart | None = None) -> VectorField:
    """B = 3 d/dpsi, the unit Reeb field dual to the contact form."""
    ch = chart or t11_chart()
    return VectorField(ch, lambda c: [0.0, 0.0, 0.0, 0.0, 3.0], label="B")


def canonical_forms(eta: DiffForm) -> dict[str, DiffForm]:
    """{Psi1: eta^deta, Psi2: eta^(deta)^2, Phi1: deta, Phi2: (deta)^2}."""
    deta = exterior_derivative(eta, label="Phi1")
    phi2 = wedge(deta, deta, label="Phi2")
    return {
        "Psi1": wedge(eta, deta, label="Psi1"),
        "Psi2": wedge(eta, phi2, label="Psi2"),
        "Phi1": deta,
        "Phi2": phi2,
    }


def re_im_psi_closed_forms(chart: Chart | None = None) -> tuple[DiffForm, DiffForm]:
    """The two explicit special Killing 2-forms (real and imaginary parts).

    Component tables, in increasing index order (theta1, phi1, theta2, phi2,
    psi_angle):

        Re: cos(psi) dth1^dth2 + sin(th2) sin(psi) dth1^dph2
            - sin(th1) sin(psi) dth2^dph1 - sin(th1) sin(th2) cos(psi) dph1^dph2
        Im: sin(psi) dth1^dth2 - sin(th2) cos(psi) dth1^dph2
            + sin(th1) cos(psi) dth2^dph1 - sin(th1) sin(th2) sin(psi) dph1^dph2
    """
    ch = chart or t11_chart()

    def re_coeffs(c):
        th1, th2, psi = c[0], c[2], c[4]
        s1, s2 = ad.sin(th1), ad.sin(th2)
        sp, cp = ad.sin(psi), ad.cos(psi)
        return {(0, 2): cp,
                (0, 3): s2 * sp,
                (1, 2): s1 * sp,      # -sin th1 sin psi dth2^dph1
                (1, 3): -s1 * s2 * cp}

    def im_coeffs(c):
        th1, th2, psi = c[0], c[2], c[4]
        s1, s2 = ad.sin(th1), ad.sin(th2)
        sp, cp = ad.sin(psi), ad.cos(psi)
        return {(0, 2): sp,
                (0, 3): -s2 * cp,
                (1, 2): -s1 * cp,     # +sin th1 cos psi dth2^dph1
                (1, 3): -s1 * s2 * sp}

    return (DiffForm(ch, 2, re_coeffs, label="RePsi"),
            DiffForm(ch, 2, im_coeffs, label="ImPsi"))


def holomorphic_volume_form(cone: Chart | None = None,
                            phi1_sign: float = -1.0) -> DiffForm:
    """Omega = exp(z1) dz1 ^ dz2 ^ dz3 on the cone chart."""
    cc = cone or cone_chart(t11_chart())
    z1f, z2f, z3f = complex_coordinate_fields(cc, phi1_sign=phi1_sign)
    dz = [exterior_derivative(DiffForm(cc, 0, lambda c, f=f: {(): f.fn(c)}),
                              label=f"d{f.label}") for f in (z1f, z2f, z3f)]
    body = wedge(wedge(dz[0], dz[1]), dz[2])
    return scale_form(body, lambda c: ad.exp(z1f.fn(c)), label="Omega")


def cone_lift(psi: DiffForm, cone: Chart | None = None) -> DiffForm:
    """r^p dr ^ psi + r^(p+1)/(p+1) d(psi), base components pulled back."""
    cc = cone or cone_chart(psi.chart)
    if cc.base is None or cc.base.name != psi.chart.name:
        raise ValueError("cone chart does not extend the form's chart")
    p = psi.degree
    dpsi = None
    if p < psi.chart.dim:
        dpsi = exterior_derivative(psi)

    def coeffs(coords):
        r = coords[0]
        base = coords[1:]
        rp = r ** p
        out = {}
        for key, v in psi.coeffs(base).items():
            out[(0,) + tuple(i + 1 for i in key)] = rp * v
        if dpsi is not None:
            scale = r ** (p + 1) / (p + 1)
            for key, v in dpsi.coeffs(base).items():
                out[tuple(i + 1 for i in key)] = scale * v
        return out

    return DiffForm(cc, p + 1, coeffs, label=f"lift_{psi.label}")


def extract_base_form(theta: DiffForm, check_points=None,
                      tol: float = 1e-8, n_check: int = 20,
                      seed: int = 2024) -> DiffForm:
    """Invert the cone lift: psi = r^-p (dr-contraction of theta) at r = 1.

    Verifies the shape assumption by reconstructing the lift from the
    extracted form and measuring the residual at sample points; raises
    ShapeAssumptionError when the input is not a lifted form.
    """
    cc = theta.chart
    base = cc.base
    if base is None:
        raise ValueError("extraction needs a form on a cone chart")
    p = theta.degree - 1

    def coeffs(base_coords):
        cone_coords = [1.0] + list(base_coords)
        out = {}
        for key, v in theta.coeffs(cone_coords).items():
            if key and key[0] == 0:
                out[tuple(i - 1 for i in key[1:])] = v
        return out

    extracted = DiffForm(base, p, coeffs, label=f"extract_{theta.label}")

    points = check_points
    if points is None:
        points = sample_points(cc, n_check, seed)
    lifted = cone_lift(extracted, cc)
    worst = 0.0
    for q in points:
        a = theta.at(q)
        b = lifted.at(q)
        keys = set(a) | set(b)
        if keys:
            worst = max(worst, max(abs(a.get(k, 0.0) - b.get(k, 0.0))
                                   for k in keys))
    if worst > tol:
        raise ShapeAssumptionError(
            f"input is not a lifted form: reconstruction residual {worst:.3e}")
    return extracted


@dataclass(frozen=True)
class StackelKillingTensor:
    """Symmetric rank-2 tensor field K_ij built from a pair of equal-degree forms."""

    chart: Chart
    fn: Callable  # coords -> nested lists, dual-capable
    label: str = ""

    def matrix(self, p) -> np.ndarray:
        coords = list(p.values) if isinstance(p, ChartPoint) else list(p)
        raw = self.fn(coords)
        n = self.chart.dim
        return np.array([[ad.deep_value(raw[i][j]) for j in range(n)]
                         for i in range(n)], dtype=float)


def _component(sparse, indices):
    """Sign-aware dense component from an increasing-tuple dictionary."""
    sign = 1
    idx = list(indices)
    for i in range(len(idx)):
        for j in range(i + 1, len(idx)):
            if idx[i] == idx[j]:
                return 0.0
            if idx[i] > idx[j]:
                sign = -sign
    return sign * sparse.get(tuple(sorted(idx)), 0.0)


def stackel_killing(psi: DiffForm, sigma: DiffForm,
                    metric: MetricField | None = None) -> StackelKillingTensor:
    """K_ij = psi_{i k...} sigma_j^{k...} + sigma_{i k...} psi_j^{k...}.

    Trailing indices are raised with the metric (default: the T(1,1) metric)
    and contracted with unit weight.
    """
    if psi.degree != sigma.degree:
        raise ValueError("Stackel pairing needs forms of equal degree")
    if psi.chart.name != sigma.chart.name:
        raise ValueError("forms live on different charts")
    g = metric or t11_metric(chart=psi.chart)
    n = psi.chart.dim
    p = psi.degree
    trailing = list(itertools.product(range(n), repeat=p - 1))

    def fn(coords):
        sp = psi.coeffs(coords)
        ss = sigma.coeffs(coords)
        ginv = ad.mat_inv(g.fn(coords))

        def raised(sparse, j, kk):
            # sparse_{j m...} g^{m k1} g^{m k2} ... summed over m-tuples
            acc = 0.0
            for mm in trailing:
                v = _component(sparse, (j,) + mm)
                if isinstance(v, (int, float, complex)) and v == 0.0:
                    continue
                w = v
                for a, b in zip(kk, mm):
                    w = w * ginv[a][b]
                acc = acc + w
            return acc

        out = [[0.0] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                acc = 0.0
                for kk in trailing:
                    a = _component(sp, (i,) + kk)
                    b = _component(ss, (i,) + kk)
                    if not (isinstance(a, (int, float, complex)) and a == 0.0):
                        acc = acc + a * raised(ss, j, kk)
                    if not (isinstance(b, (int, float, complex)) and b == 0.0):
                        acc = acc + b * raised(sp, j, kk)
                out[i][j] = acc
                out[j][i] = acc
        return out

    return StackelKillingTensor(psi.chart, fn,
                                label=f"K({psi.label},{sigma.label})")


def stackel_matrix_fast(psi: DiffForm, sigma: DiffForm, g: MetricField,
                        p: ChartPoint) -> np.ndarray:
    """Dense numpy evaluation of the Stackel pairing at a point."""
    deg = psi.degree
    a = psi.dense(p)
    b = sigma.dense(p)
    if deg == 1:
        k = np.outer(a, b) + np.outer(b, a)
    else:
        ginv = metric_inverse(g.matrix(p))
        left = "abcdefg"[:deg - 1]
        right = "mnopqrs"[:deg - 1]
        raises = ",".join(f"{u}{v}" for u, v in zip(left, right))
        sub = f"i{left},{raises},j{right}->ij"
        gs = (ginv,) * (deg - 1)
        k = np.einsum(sub, a, *gs, b) + np.einsum(sub, b, *gs, a)
    return np.ascontiguousarray(np.real(k))


def all_candidates(chart: Chart | None = None) -> list[KillingCandidate]:
    """The seven labeled candidates on T(1,1)."""
    ch = chart or t11_chart()
    eta = contact_form_t11(ch)
    canon = canonical_forms(eta)
    re_psi, im_psi = re_im_psi_closed_forms(ch)
    return [
        KillingCandidate(eta, 1, "special_killing", "eta"),
        KillingCandidate(canon["Psi1"], 3, "special_killing", "Psi1"),
        KillingCandidate(canon["Psi2"], 5, "special_killing", "Psi2"),
        KillingCandidate(re_psi, 2, "special_killing", "RePsi"),
        KillingCandidate(im_psi, 2, "special_killing", "ImPsi"),
        KillingCandidate(canon["Phi1"], 2, "closed_conformal", "Phi1"),
        KillingCandidate(canon["Phi2"], 4, "closed_conformal", "Phi2"),
    ]


def fit_global_scale(a: DiffForm, b: DiffForm, points) -> tuple[complex, float]:
    """Least-squares complex scale: minimize sum |scale * a - b|^2.

    Returns (scale, max residual of scale * a - b over points/components).
    """
    num = 0.0 + 0.0j
    den = 0.0
    samples = []
    for p in points:
        ca, cb = a.at(p), b.at(p)
        keys = set(ca) | set(cb)
        samples.append((ca, cb, keys))
        for k in keys:
            va = ca.get(k, 0.0)
            num += np.conj(va) * cb.get(k, 0.0)
            den += abs(va) ** 2
    if den == 0.0:
        raise ValueError("cannot fit a scale against a vanishing form")
    scale = num / den
    resid = 0.0
    for ca, cb, keys in samples:
        for k in keys:
            resid = max(resid, abs(scale * ca.get(k, 0.0) - cb.get(k, 0.0)))
    return complex(scale), float(resid)


def angular_part(a: DiffForm) -> DiffForm:
    """Drop every component carrying the radial index (cone-chart forms)."""
    if a.chart.base is None:
        raise ValueError("angular part applies to cone-chart forms")

    def coeffs(coords):
        return {k: v for k, v in a.coeffs(coords).items() if 0 not in k}

    return DiffForm(a.chart, a.degree, coeffs, label=f"angular_{a.label}")


def reference_one_forms(cone: Chart | None = None) -> dict[str, DiffForm]:
    """The published angular one-form tables T1, T2, T3 on the cone chart.

    Cone-chart indices: r=0, theta1=1, phi1=2, theta2=3, phi2=4, psi=5.
    """
    cc = cone or cone_chart(t11_chart())

    def t1(c):
        th1, th2 = c[1], c[3]
        return {(1,): ad.cot(th1), (3,): ad.cot(th2), (5,): 1j}

    def t2(c):
        th1, th2 = c[1], c[3]
        return {(1,): 0.5 * ad.cot(0.5 * th1), (3,): -0.5 * ad.tan(0.5 * th2),
                (5,): 0.5j, (2,): -0.5j, (4,): 0.5j}

    def t3(c):
        th1, th2 = c[1], c[3]
        return {(1,): 0.5 * ad.cot(0.5 * th1), (3,): 0.5 * ad.cot(0.5 * th2),
                (5,): 0.5j, (2,): -0.5j, (4,): -0.5j}

    return {"T1": DiffForm(cc, 1, t1, label="T1_display"),
            "T2": DiffForm(cc, 1, t2, label="T2_display"),
            "T3": DiffForm(cc, 1, t3, label="T3_display")}


def bracketed_psi_display(chart: Chart | None = None) -> DiffForm:
    """The published bracketed complex 2-form, as printed.

    Its second term sits on dth1^dth2 in the source; the recomputed form puts
    it on dth1^dph2 (see the display diagnostics).
    """
    ch = chart or t11_chart()

    def coeffs(c):
        th1, th2, psi = c[0], c[2], c[4]
        phase = ad.exp(1j * psi)
        s1, s2 = ad.sin(th1), ad.sin(th2)
        return {(0, 2): phase * (2.0 - 2.0j * s2),
                (1, 2): -2.0j * s1 * phase,   # +2i sin th1 dth2^dph1
                (1, 3): -2.0 * s1 * s2 * phase}

    return DiffForm(ch, 2, coeffs, label="bracketed_psi_display")


# Fixed coefficient descriptions for the report/emission layer, keyed by the
# presentation ordering (theta1, theta2, phi1, phi2, psi_angle).
COMPONENT_DESCRIPTIONS: dict[str, dict[str, str]] = {
    "eta": {
        "dpsi": "1/3",
        "dphi1": "cos(theta1)/3",
        "dphi2": "cos(theta2)/3",
    },
    "Phi1": {
        "dtheta1^dphi1": "-sin(theta1)/3",
        "dtheta2^dphi2": "-sin(theta2)/3",
    },
    "Phi2": {
        "dtheta1^dtheta2^dphi1^dphi2": "-(2/9) sin(theta1) sin(theta2)",
    },
    "Psi1": {
        "dtheta1^dphi1^dpsi": "-sin(theta1)/9",
        "dtheta2^dphi2^dpsi": "-sin(theta2)/9",
        "dtheta2^dphi1^dphi2": "cos(theta1) sin(theta2)/9",
        "dtheta1^dphi1^dphi2": "-cos(theta2) sin(theta1)/9",
    },
    "Psi2": {
        "dtheta1^dtheta2^dphi1^dphi2^dpsi": "-(2/27) sin(theta1) sin(theta2)",
    },
    "RePsi": {
        "dtheta1^dtheta2": "cos(psi)",
        "dtheta1^dphi2": "sin(theta2) sin(psi)",
        "dtheta2^dphi1": "-sin(theta1) sin(psi)",
        "dphi1^dphi2": "-sin(theta1) sin(theta2) cos(psi)",
    },
    "ImPsi": {
        "dtheta1^dtheta2": "sin(psi)",
        "dtheta1^dphi2": "-sin(theta2) cos(psi)",
        "dtheta2^dphi1": "sin(theta1) cos(psi)",
        "dphi1^dphi2": "-sin(theta1) sin(theta2) sin(psi)",
    },
}
