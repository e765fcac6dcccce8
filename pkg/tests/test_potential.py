"""Symplectic potential, Legendre structure, Reeb search, complex coordinates.

Expected values are produced by independent oracles inside the tests: direct
log-affine arithmetic for G, central finite differences for gradients and
Hessians, and a Newton solve for the Legendre inversion.
"""

import math

import numpy as np
import pytest

from killingforms.chart import ChartPoint, cone_chart, sample_points, t11_chart
from killingforms.potential import (OutOfDomainError, ReebSearchError,
                                    SymplecticPotential, complex_coords_t11,
                                    complex_coordinate_fields,
                                    conifold_momenta, eval_G, grad_G,
                                    hessian_G, legendre_F,
                                    newton_invert_gradient, reeb_search,
                                    ricci_flat_residual)
from killingforms.toric import ToricData, conifold_toric_data, momentum_map_t11

Y_REF = np.array([1 / 6, 0.0, 0.0])
LOG2 = math.log(2.0)


@pytest.fixture(scope="module")
def sp():
    _, normalized, _ = conifold_toric_data()
    return SymplecticPotential(normalized)


@pytest.fixture(scope="module")
def momenta():
    return conifold_momenta(200, 3)


def test_eval_G_reference_value(sp):
    # all four facet functions equal 1/6 there; l_B = 1/2, l_inf = 2/3
    expected = (0.5 * 4 * (1 / 6) * math.log(1 / 6)
                + 0.5 * 0.5 * math.log(0.5) - 0.5 * (2 / 3) * math.log(2 / 3))
    assert eval_G(sp, Y_REF) == pytest.approx(expected, abs=1e-15)
    assert expected == pytest.approx(-0.6353849155, abs=1e-9)


def test_eval_G_out_of_domain(sp):
    with pytest.raises(OutOfDomainError):
        eval_G(sp, [0.0, 0.0, 0.0])   # on the apex
    with pytest.raises(OutOfDomainError):
        eval_G(sp, [1 / 6, 0.0, -1 / 6])  # on the first facet


def test_grad_G_matches_finite_differences(sp, momenta):
    h = 1e-7
    for y in momenta[:10]:
        x = grad_G(sp, y)
        fd = np.empty(3)
        for i in range(3):
            e = np.zeros(3)
            e[i] = h
            fd[i] = (eval_G(sp, y + e) - eval_G(sp, y - e)) / (2 * h)
        assert np.max(np.abs(x - fd)) < 1e-6


def test_grad_G_reference_values(sp):
    # frozen from the closed-form reduction of the log-affine gradient at
    # the momentum of (r=1, th1=th2=pi/2); the first component carries the
    # constant 3/2 - 11/2 log 2, the others 3/4 - 7/4 log 2 - log 2
    x = grad_G(sp, Y_REF)
    assert x[0] == pytest.approx(1.5 - 5.5 * LOG2, abs=1e-14)
    assert x[1] == pytest.approx(0.75 - 2.75 * LOG2, abs=1e-14)
    assert x[2] == pytest.approx(0.75 - 2.75 * LOG2, abs=1e-14)
    assert x[0] == pytest.approx(-2.3123094931, abs=1e-9)
    assert x[1] == pytest.approx(-1.1561547465, abs=1e-9)


def test_hessian_reeb_relation(sp, momenta):
    b = np.array(sp.td.reeb)
    for y in momenta:
        g, _ = hessian_G(sp, y)
        assert np.max(np.abs(2 * g @ y - b)) < 1e-9


def test_hessian_inverse_and_positivity(sp, momenta):
    for y in momenta:
        g, f = hessian_G(sp, y)
        assert np.max(np.abs(f @ g - np.eye(3))) < 1e-10
        np.linalg.cholesky(g)


def test_hessian_matches_finite_differences(sp):
    y = np.array([0.21, 0.04, -0.02])
    g, _ = hessian_G(sp, y)
    h = 1e-6
    fd = np.empty((3, 3))
    for i in range(3):
        e = np.zeros(3)
        e[i] = h
        fd[i] = (grad_G(sp, y + e) - grad_G(sp, y - e)) / (2 * h)
    assert np.max(np.abs(g - fd)) < 1e-5


def test_hessian_homogeneity_degree_minus_one(sp, momenta):
    y = np.asarray(momenta[0])
    g1, _ = hessian_G(sp, y)
    for t in (0.5, 2.0, 7.0):
        g2, _ = hessian_G(sp, t * y)
        assert np.max(np.abs(g2 - g1 / t)) < 1e-9


def test_legendre_duality(sp, momenta):
    for y in momenta:
        f, x = legendre_F(sp, y)
        assert abs(f + eval_G(sp, y) - float(x @ np.asarray(y))) < 1e-12


def test_legendre_newton_roundtrip(sp, momenta):
    for y in momenta[:20]:
        y = np.asarray(y)
        x = grad_G(sp, y)
        rec_true = newton_invert_gradient(sp, x, y)
        rec_perturbed = newton_invert_gradient(sp, x, y * 1.15)
        assert np.max(np.abs(rec_true - y)) < 1e-9
        assert np.max(np.abs(rec_perturbed - y)) < 1e-9


def test_legendre_hessian_duality_via_inverse_map(sp):
    # Hessian of F in x is the inverse Hessian of G, probed by finite
    # differences of the Newton-inverted map y(x)
    y0 = np.array([0.19, 0.03, -0.01])
    _, f_inv = hessian_G(sp, y0)
    x0 = grad_G(sp, y0)
    h = 1e-6
    fd = np.empty((3, 3))
    for i in range(3):
        e = np.zeros(3)
        e[i] = h
        yp = newton_invert_gradient(sp, x0 + e, y0)
        ym = newton_invert_gradient(sp, x0 - e, y0)
        fd[i] = (yp - ym) / (2 * h)
    assert np.max(np.abs(fd - f_inv)) < 1e-5


def test_ricci_flat_constancy(sp, momenta):
    rep = ricci_flat_residual(sp, momenta)
    assert rep.passed
    assert rep.max_abs < 1e-8


def test_ricci_flat_single_point_trivial(sp, momenta):
    rep = ricci_flat_residual(sp, momenta[:1])
    assert rep.max_abs == 0.0


def test_ricci_flat_fails_for_perturbed_reeb(momenta):
    _, normalized, _ = conifold_toric_data()
    bad = SymplecticPotential(ToricData(3, normalized.normals,
                                        reeb=(3.0, 1.6, 1.5)))
    rep = ricci_flat_residual(bad, momenta)
    assert not rep.passed
    assert rep.max_abs > 1e-3


def test_reeb_search_recovers_conifold_vector():
    _, normalized, _ = conifold_toric_data()
    data = ToricData(3, normalized.normals)
    reeb, objective, _ = reeb_search(data)
    assert np.max(np.abs(reeb - np.array([3.0, 1.5, 1.5]))) < 1e-4
    assert objective < 1e-16


def test_reeb_search_from_far_start():
    _, normalized, _ = conifold_toric_data()
    data = ToricData(3, normalized.normals)
    reeb, objective, _ = reeb_search(data, start=(1.0, 2.0))
    assert np.max(np.abs(reeb - np.array([3.0, 1.5, 1.5]))) < 1e-4
    assert objective < 1e-12


def test_reeb_objective_separates_true_from_perturbed(sp, momenta):
    from killingforms.potential import _constancy_defect
    _, normalized, _ = conifold_toric_data()
    true_obj = _constancy_defect(sp, momenta[:60])
    bad = SymplecticPotential(ToricData(3, normalized.normals,
                                        reeb=(3.0, 1.6, 1.5)))
    bad_obj = _constancy_defect(bad, momenta[:60])
    assert true_obj < 1e-16
    assert bad_obj > 1e-6


def test_reeb_search_requires_gorenstein():
    raw, _, _ = conifold_toric_data()
    with pytest.raises(ValueError):
        reeb_search(ToricData(3, raw.normals))


def test_complex_coords_reference_point():
    cc = cone_chart(t11_chart())
    p = ChartPoint(cc, (1.0, math.pi / 2, 0.0, math.pi / 2, 0.0, 0.0))
    z = complex_coords_t11(p)
    assert abs(z[0]) < 1e-15
    assert z[1] == pytest.approx(-LOG2, abs=1e-15)
    assert z[2] == pytest.approx(-LOG2, abs=1e-15)


def test_exp_z1_closed_form():
    cc = cone_chart(t11_chart())
    for p in sample_points(cc, 20, 21):
        z = complex_coords_t11(p)
        r = p.coord("r")
        expected = (r ** 3 * math.sin(p.coord("theta1"))
                    * math.sin(p.coord("theta2"))
                    * np.exp(1j * p.coord("psi_angle")))
        assert abs(np.exp(z[0]) - expected) < 1e-13


def test_real_parts_match_gradient_up_to_constant(sp):
    cc = cone_chart(t11_chart())
    diffs = []
    for p in sample_points(cc, 100, 22):
        y = momentum_map_t11(p, "transformed")
        diffs.append(np.real(complex_coords_t11(p)) - grad_G(sp, y))
    diffs = np.asarray(diffs)
    spread = np.max(np.abs(diffs - diffs.mean(axis=0)))
    assert spread < 1e-9
    # the dropped additive constants, from the same reduction as grad_G
    assert diffs[:, 0].mean() == pytest.approx(-(1.5 - 5.5 * LOG2), abs=1e-12)
    assert diffs[:, 1].mean() == pytest.approx(-(0.75 - 1.75 * LOG2), abs=1e-12)


def test_imaginary_parts_are_action_angles():
    cc = cone_chart(t11_chart())
    for p in sample_points(cc, 20, 23):
        z = complex_coords_t11(p)
        _, th1, ph1, th2, ph2, psi = p.values
        assert np.imag(z[0]) == pytest.approx(psi, abs=1e-15)
        assert np.imag(z[1]) == pytest.approx((psi - ph1 + ph2) / 2, abs=1e-15)
        assert np.imag(z[2]) == pytest.approx((psi - ph1 - ph2) / 2, abs=1e-15)


def test_complex_coordinate_fields_jets_match_fd():
    from killingforms import ad
    cc = cone_chart(t11_chart())
    fields = complex_coordinate_fields(cc)
    p = sample_points(cc, 1, 24)[0]
    for f in fields:
        _, grad = f.jet1(p)
        fd = np.array(ad.fd_gradient(f.fn, list(p.values), 1e-5))
        assert np.max(np.abs(grad - fd)) < 1e-6


def test_complex_coords_requires_cone_point():
    p = sample_points(t11_chart(), 1, 1)[0]
    with pytest.raises(ValueError):
        complex_coords_t11(p)
