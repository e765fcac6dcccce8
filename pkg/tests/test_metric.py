"""Metric fields, connection, covariant derivatives, and curvature."""

import math

import numpy as np
import pytest

from killingforms import ad
from killingforms.chart import Chart, ChartPoint, sample_points
from killingforms.killing import contact_form_t11
from killingforms.metric import (MetricField, SingularMetricError, christoffel,
                                 christoffel_generic, cone_metric,
                                 covariant_derivative_form,
                                 covariant_derivative_tensor02,
                                 einstein_residual, flat_metric,
                                 metric_inverse, ricci, round_sphere_metric,
                                 t11_metric)
from killingforms.exterior import form_from_components


@pytest.fixture(scope="module")
def sphere():
    ch = Chart("s2", ("theta", "phi"), ((0.0, math.pi), (0.0, 2 * math.pi)),
               (0.15, 0.0), periodic=(False, True))
    return round_sphere_metric(ch)


def test_t11_metric_components(g_base, base_points):
    for p in base_points[:10]:
        g = g_base.matrix(p)
        th1, th2 = p.coord("theta1"), p.coord("theta2")
        assert g[0, 0] == pytest.approx(1 / 6)
        assert g[2, 2] == pytest.approx(1 / 6)
        assert g[4, 4] == pytest.approx(1 / 9)
        assert g[1, 4] == pytest.approx(math.cos(th1) / 9)
        assert g[3, 4] == pytest.approx(math.cos(th2) / 9)
        assert np.array_equal(g, g.T)
        np.linalg.cholesky(g)  # positive definite inside the margins


def test_t11_metric_g_phi1_psi_vanishes_at_equator(base_chart):
    g = t11_metric(base_chart)
    p = ChartPoint(base_chart, (math.pi / 2, 1.0, 1.0, 2.0, 3.0))
    assert g.matrix(p)[1, 4] == pytest.approx(0.0, abs=1e-16)


def test_cone_metric_blocks(g_base, g_cone, cone_points):
    for p in cone_points[:10]:
        gm = g_cone.matrix(p)
        r = p.coord("r")
        base = g_base.matrix(ChartPoint(g_base.chart, p.values[1:]))
        assert gm[0, 0] == 1.0
        assert np.max(np.abs(gm[0, 1:])) == 0.0
        assert np.max(np.abs(gm[1:, 1:] - r * r * base)) < 1e-15


def test_cone_metric_scaling_value(g_base, g_cone):
    p = ChartPoint(g_cone.chart, (2.0, 1.0, 0.5, 1.2, 4.0, 2.0))
    assert g_cone.matrix(p)[1, 1] == pytest.approx(4 / 6)


def test_christoffel_flat_zero(base_chart, base_points):
    g = flat_metric(base_chart)
    assert np.max(np.abs(christoffel(g, base_points[0]))) == 0.0


def test_christoffel_round_sphere(sphere):
    p = ChartPoint(sphere.chart, (math.pi / 4, 0.3))
    gamma = christoffel(sphere, p)
    # Gamma^theta_phi phi = -sin cos; Gamma^phi_theta phi = cot
    assert gamma[0, 1, 1] == pytest.approx(-0.5)
    assert gamma[1, 0, 1] == pytest.approx(1.0 / math.tan(math.pi / 4))
    assert np.max(np.abs(gamma - np.transpose(gamma, (0, 2, 1)))) == 0.0


def test_christoffel_generic_matches_fast(g_base, base_points):
    for p in base_points[:3]:
        fast = christoffel(g_base, p)
        gen = np.array([[[ad.deep_value(x) for x in row] for row in plane]
                        for plane in christoffel_generic(g_base,
                                                         list(p.values))])
        assert np.max(np.abs(fast - gen)) < 1e-13


def test_metric_compatibility(g_base, g_cone, base_points, cone_points):
    for g, pts in ((g_base, base_points), (g_cone, cone_points)):
        worst = 0.0
        for p in pts[:20]:
            nabla_g = covariant_derivative_tensor02(g, g.fn, p)
            worst = max(worst, np.max(np.abs(nabla_g)))
        assert worst < 1e-9


def test_christoffel_fd_mode_cross_check(g_base, base_points):
    p = base_points[0]
    analytic = christoffel(g_base, p)
    with ad.derivative_mode("fd", 1e-5):
        fd = christoffel(g_base, p)
    assert np.max(np.abs(analytic - fd)) < 1e-4


def test_covariant_derivative_constant_form_flat(base_chart, base_points):
    g = flat_metric(base_chart)
    a = form_from_components(base_chart, 2, {(0, 3): 2.0, (1, 2): -1.5})
    nabla = covariant_derivative_form(g, a, base_points[0])
    assert np.max(np.abs(nabla)) == 0.0


def test_contact_form_covariant_derivative_antisymmetric(g_base, base_points):
    eta = contact_form_t11(g_base.chart)
    worst = 0.0
    for p in base_points[:20]:
        nabla = np.real(covariant_derivative_form(g_base, eta, p))
        worst = max(worst, np.max(np.abs(0.5 * (nabla + nabla.T))))
    assert worst < 1e-7


def test_ricci_flat_zero(base_chart, base_points):
    g = flat_metric(base_chart)
    assert np.max(np.abs(ricci(g, base_points[0]))) == 0.0


def test_ricci_round_sphere_equals_metric(sphere):
    for p in sample_points(sphere.chart, 10, 4):
        assert np.max(np.abs(ricci(sphere, p) - sphere.matrix(p))) < 1e-12


def test_ricci_symmetry(g_base, base_points):
    for p in base_points[:10]:
        r = ricci(g_base, p)
        assert np.max(np.abs(r - r.T)) < 1e-9


def test_t11_is_einstein_lambda_four(g_base, base_points):
    rep = einstein_residual(g_base, 4.0, base_points, tolerance=1e-7)
    assert rep.passed
    assert rep.max_abs < 1e-10


def test_cone_is_ricci_flat(g_cone, cone_points):
    rep = einstein_residual(g_cone, 0.0, cone_points, tolerance=1e-6)
    assert rep.passed


def test_wrong_einstein_constant_fails(g_base, base_points):
    rep = einstein_residual(g_base, 0.0, base_points[:10], tolerance=1e-7)
    assert not rep.passed
    assert rep.max_abs > 0.1


def test_perturbed_metric_not_einstein(base_chart, base_points):
    g = t11_metric(base_chart, round_coeff=0.2)
    rep = einstein_residual(g, 4.0, base_points[:10], tolerance=1e-7)
    assert not rep.passed


def test_metric_inverse_rejects_indefinite():
    with pytest.raises(SingularMetricError):
        metric_inverse(np.array([[1.0, 0.0], [0.0, -1.0]]))


def test_ricci_fd_mode_cross_check(g_base, base_points):
    p = base_points[0]
    analytic = ricci(g_base, p)
    with ad.derivative_mode("fd", 1e-4):
        fd = ricci(g_base, p)
    assert np.max(np.abs(analytic - fd)) < 1e-4
