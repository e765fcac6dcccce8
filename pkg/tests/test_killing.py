"""Candidate forms, the holomorphic volume form, and the cone correspondence."""

import math

import numpy as np
import pytest

from killingforms.chart import ChartPoint, cone_chart, sample_points, t11_chart
from killingforms.exterior import (add_forms, coordinate_differential,
                                   exterior_derivative, form_from_components,
                                   interior_product, scale_form, wedge)
from killingforms.killing import (ShapeAssumptionError, all_candidates,
                                  canonical_forms, cone_lift,
                                  contact_form_t11, extract_base_form,
                                  fit_global_scale, holomorphic_volume_form,
                                  re_im_psi_closed_forms, reeb_field_t11,
                                  stackel_killing, stackel_matrix_fast)
from killingforms.metric import (covariant_derivative_tensor02, t11_metric)
from killingforms.exterior import VectorField

from conftest import max_component, max_component_diff


@pytest.fixture(scope="module")
def chart():
    return t11_chart()


@pytest.fixture(scope="module")
def cone(chart):
    return cone_chart(chart)


@pytest.fixture(scope="module")
def points(chart):
    return sample_points(chart, 30, 31)


@pytest.fixture(scope="module")
def cpoints(cone):
    return sample_points(cone, 30, 32)


@pytest.fixture(scope="module")
def forms(chart):
    eta = contact_form_t11(chart)
    canon = canonical_forms(eta)
    return {"eta": eta, **canon}


def test_contact_form_components(chart, points):
    eta = contact_form_t11(chart)
    for p in points[:10]:
        comps = eta.at(p)
        assert comps[(4,)] == pytest.approx(1 / 3)
        assert comps[(1,)] == pytest.approx(math.cos(p.coord("theta1")) / 3)
        assert comps[(3,)] == pytest.approx(math.cos(p.coord("theta2")) / 3)


def test_reeb_pairing_is_one(chart, points):
    eta = contact_form_t11(chart)
    b = reeb_field_t11(chart)
    for p in points:
        assert interior_product(b, eta).at(p)[()] == pytest.approx(1.0)


def test_phi1_components(forms, points):
    for p in points[:10]:
        s1 = math.sin(p.coord("theta1"))
        s2 = math.sin(p.coord("theta2"))
        comps = forms["Phi1"].at(p)
        assert comps[(0, 1)] == pytest.approx(-s1 / 3, abs=1e-15)
        assert comps[(2, 3)] == pytest.approx(-s2 / 3, abs=1e-15)


def test_phi2_single_component(forms, points):
    # on the canonical key (th1, ph1, th2, ph2): +2/9 s1 s2, equivalently
    # -2/9 s1 s2 on dth1^dth2^dph1^dph2
    for p in points[:10]:
        s1 = math.sin(p.coord("theta1"))
        s2 = math.sin(p.coord("theta2"))
        comps = {k: v for k, v in forms["Phi2"].at(p).items() if abs(v) > 1e-16}
        assert set(comps) == {(0, 1, 2, 3)}
        assert comps[(0, 1, 2, 3)] == pytest.approx(2 / 9 * s1 * s2, abs=1e-15)
        assert forms["Phi2"].component(p, (0, 2, 1, 3)) == pytest.approx(
            -2 / 9 * s1 * s2, abs=1e-15)


def test_psi1_components(forms, points):
    # eta ^ d(eta) expanded by hand: the overall sign follows from
    # d(cos) = -sin and the wedge reordering signs
    for p in points[:10]:
        th1, th2 = p.coord("theta1"), p.coord("theta2")
        s1, s2 = math.sin(th1), math.sin(th2)
        c1, c2 = math.cos(th1), math.cos(th2)
        comps = forms["Psi1"].at(p)
        assert comps[(0, 1, 4)] == pytest.approx(-s1 / 9, abs=1e-15)
        assert comps[(2, 3, 4)] == pytest.approx(-s2 / 9, abs=1e-15)
        # +c1 s2/9 on dth2^dph1^dph2 reorders to -c1 s2/9 on the canonical key
        assert comps[(1, 2, 3)] == pytest.approx(-c1 * s2 / 9, abs=1e-15)
        assert comps[(0, 1, 3)] == pytest.approx(-c2 * s1 / 9, abs=1e-15)


def test_psi2_top_component(forms, points):
    # -2/27 s1 s2 on dpsi^dth1^dth2^dph1^dph2, i.e. +2/27 s1 s2 canonically
    for p in points[:10]:
        s1 = math.sin(p.coord("theta1"))
        s2 = math.sin(p.coord("theta2"))
        comps = forms["Psi2"].at(p)
        assert comps[(0, 1, 2, 3, 4)] == pytest.approx(2 / 27 * s1 * s2,
                                                       abs=1e-15)
        assert forms["Psi2"].component(p, (4, 0, 2, 1, 3)) == pytest.approx(
            -2 / 27 * s1 * s2, abs=1e-15)


def test_contact_nondegeneracy(forms, points):
    # eta ^ (d eta)^2 never vanishes inside the margins
    for p in points:
        val = abs(forms["Psi2"].at(p)[(0, 1, 2, 3, 4)])
        s1 = math.sin(p.coord("theta1"))
        s2 = math.sin(p.coord("theta2"))
        assert val == pytest.approx(2 / 27 * s1 * s2, abs=1e-15)
        assert val > 1e-3


def test_re_im_psi_reference_values(chart):
    re_psi, im_psi = re_im_psi_closed_forms(chart)
    p = ChartPoint(chart, (math.pi / 2, 0.0, math.pi / 2, 0.0, 0.0))
    comps = {k: v for k, v in re_psi.at(p).items() if abs(v) > 1e-16}
    assert comps == {(0, 2): pytest.approx(1.0),
                     (1, 3): pytest.approx(-1.0)}
    assert abs(im_psi.component(p, (0, 2))) < 1e-16

    q = ChartPoint(chart, (1.0, 0.0, 1.2, 0.0, math.pi / 2))
    assert re_psi.component(q, (0, 2)) == pytest.approx(0.0, abs=1e-16)
    assert re_psi.component(q, (0, 3)) == pytest.approx(math.sin(1.2))


def test_holomorphic_volume_form_closed(cone, cpoints):
    omega = holomorphic_volume_form(cone)
    d_omega = exterior_derivative(omega)
    assert max_component(d_omega, cpoints[:10]) < 1e-8


def test_cone_lift_of_contact_form(cone, chart, cpoints):
    eta = contact_form_t11(chart)
    lift = cone_lift(eta, cone)
    assert lift.degree == 2
    for p in cpoints[:10]:
        r = p.coord("r")
        comps = lift.at(p)
        # r dr^eta part: dr^dpsi coefficient r/3
        assert comps[(0, 5)] == pytest.approx(r / 3, abs=1e-15)
        # r^2/2 d(eta) part
        s1 = math.sin(p.coord("theta1"))
        assert comps[(1, 2)] == pytest.approx(-r * r * s1 / 6, abs=1e-14)


def test_cone_lift_top_degree(cone, chart, forms):
    lift = cone_lift(forms["Psi2"], cone)
    assert lift.degree == 6


def test_radial_contraction_recovers_scaled_form(cone, chart, forms, cpoints):
    # dr-contraction of a lift gives r^p times the base form
    psi = forms["Psi1"]
    lift = cone_lift(psi, cone)
    ddr = VectorField(cone, lambda c: [1.0] + [0.0] * 5)
    contracted = interior_product(ddr, lift)
    for p in cpoints[:5]:
        r = p.coord("r")
        base_p = ChartPoint(chart, p.values[1:])
        got = contracted.at(p)
        want = {tuple(i + 1 for i in k): r ** 3 * v
                for k, v in psi.at(base_p).items()}
        for k in set(got) | set(want):
            assert abs(got.get(k, 0.0) - want.get(k, 0.0)) < 1e-13


def test_extract_inverts_lift_for_all_candidates(cone, chart, points):
    for cand in all_candidates(chart):
        lift = cone_lift(cand.form, cone)
        back = extract_base_form(lift)
        assert back.degree == cand.degree
        assert max_component_diff(back, cand.form, points[:10]) < 1e-10


def test_extract_omega_matches_tables_up_to_global_scale(cone, chart, points):
    omega = holomorphic_volume_form(cone)
    extracted = extract_base_form(omega)
    re_psi, im_psi = re_im_psi_closed_forms(chart)
    target = add_forms(re_psi, scale_form(im_psi, 1j))
    scale, resid = fit_global_scale(extracted, target, points)
    assert resid < 1e-9
    assert scale == pytest.approx(2.0 / 3.0, abs=1e-12)


def test_extract_rejects_non_lift_shape(cone):
    bad = form_from_components(cone, 2, {(0, 1): 1.0}, label="dr^dth1")
    with pytest.raises(ShapeAssumptionError):
        extract_base_form(bad)


def test_stackel_contact_pair(chart, points):
    g = t11_metric(chart)
    eta = contact_form_t11(chart)
    k = stackel_killing(eta, eta, g)
    p = ChartPoint(chart, (math.pi / 2, 1.0, math.pi / 2, 2.0, 3.0))
    km = k.matrix(p)
    # K_ij = 2 eta_i eta_j; at the equator eta = (0, 0, 0, 0, 1/3)
    assert km[4, 4] == pytest.approx(2 / 9, abs=1e-15)
    assert np.max(np.abs(km - 2 * np.outer([0, 0, 0, 0, 1 / 3],
                                           [0, 0, 0, 0, 1 / 3]))) < 1e-15


def test_stackel_pairing_symmetric_in_arguments(chart, points):
    g = t11_metric(chart)
    re_psi, im_psi = re_im_psi_closed_forms(chart)
    k1 = stackel_killing(re_psi, im_psi, g)
    k2 = stackel_killing(im_psi, re_psi, g)
    for p in points[:5]:
        assert np.max(np.abs(k1.matrix(p) - k2.matrix(p))) < 1e-14
        assert np.max(np.abs(k1.matrix(p) - k1.matrix(p).T)) == 0.0


def test_stackel_degree_mismatch_rejected(chart):
    g = t11_metric(chart)
    eta = contact_form_t11(chart)
    re_psi, _ = re_im_psi_closed_forms(chart)
    with pytest.raises(ValueError):
        stackel_killing(eta, re_psi, g)


def test_stackel_fast_path_matches_generic(chart, points):
    g = t11_metric(chart)
    re_psi, im_psi = re_im_psi_closed_forms(chart)
    canon = canonical_forms(contact_form_t11(chart))
    pairs = [(re_psi, re_psi), (re_psi, im_psi),
             (canon["Psi1"], canon["Psi1"])]
    for a, b in pairs:
        k = stackel_killing(a, b, g)
        for p in points[:3]:
            assert np.max(np.abs(k.matrix(p)
                                 - stackel_matrix_fast(a, b, g, p))) < 1e-12


def test_stackel_tensor_satisfies_killing_equation(chart, points):
    g = t11_metric(chart)
    re_psi, _ = re_im_psi_closed_forms(chart)
    k = stackel_killing(re_psi, re_psi, g)
    worst = 0.0
    for p in points[:15]:
        d = covariant_derivative_tensor02(g, k.fn, p)
        perms = [(0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1),
                 (2, 1, 0)]
        sym = sum(np.transpose(d, q) for q in perms) / 6
        worst = max(worst, np.max(np.abs(sym)))
    assert worst < 1e-7


def test_fit_global_scale_recovers_known_scale(chart, points):
    re_psi, _ = re_im_psi_closed_forms(chart)
    scaled = scale_form(re_psi, 0.25 - 1.5j)
    scale, resid = fit_global_scale(re_psi, scaled, points[:10])
    assert scale == pytest.approx(0.25 - 1.5j, abs=1e-14)
    assert resid < 1e-14


def test_fit_global_scale_rejects_zero_source(chart, points):
    zero = form_from_components(chart, 2, {})
    re_psi, _ = re_im_psi_closed_forms(chart)
    with pytest.raises(ValueError):
        fit_global_scale(zero, re_psi, points[:5])
