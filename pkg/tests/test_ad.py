"""Dual-number arithmetic against closed forms and finite differences."""

import math

import numpy as np
import pytest

from killingforms import ad


def f_mixed(c):
    x, y, z = c
    return ad.sin(x) * ad.cos(y) + ad.exp(0.3 * z) * x * x + ad.log(2.0 + y)


def grad_exact(c):
    x, y, z = c
    return np.array([
        math.cos(x) * math.cos(y) + 2 * x * math.exp(0.3 * z),
        -math.sin(x) * math.sin(y) + 1.0 / (2.0 + y),
        0.3 * math.exp(0.3 * z) * x * x,
    ])


X0 = [0.7, -0.3, 1.1]


def test_first_order_jet_exact():
    res = f_mixed(ad.seed1(X0))
    assert abs(ad.value_of(res) - f_mixed(X0)) < 1e-15
    for i in range(3):
        assert abs(ad.partial_of(res, i) - grad_exact(X0)[i]) < 1e-14


def test_second_order_jet_matches_fd():
    res = f_mixed(ad.seed2(X0))
    hess_fd = np.array(ad.fd_hessian(f_mixed, X0, 1e-5))
    hess = np.array([[ad.hessian_entry(res, i, j) for j in range(3)]
                     for i in range(3)])
    assert np.allclose(hess, hess.T, atol=1e-14)
    assert np.max(np.abs(hess - hess_fd)) < 1e-5


def test_fd_gradient_matches_analytic():
    g_fd = np.array(ad.fd_gradient(f_mixed, X0, 1e-5))
    assert np.max(np.abs(g_fd - grad_exact(X0))) < 1e-9


def test_division_and_powers():
    def g(c):
        x, = c
        return (x ** 3 + 2.0) / (1.0 + x * x) + x ** -2 + ad.sqrt(x)

    x = 1.37
    res = g(ad.seed1([x]))
    h = 1e-6
    fd = (g([x + h]) - g([x - h])) / (2 * h)
    assert abs(ad.partial_of(res, 0) - fd) < 1e-8


def test_complex_dual_chain():
    def g(c):
        return ad.exp(1j * c[0]) * ad.sin(c[1])

    res = g(ad.seed1([0.4, 0.9]))
    assert abs(ad.partial_of(res, 0) - 1j * np.exp(0.4j) * np.sin(0.9)) < 1e-15
    assert abs(ad.partial_of(res, 1) - np.exp(0.4j) * np.cos(0.9)) < 1e-15


def test_nested_seeding_tower():
    # the tower pattern used by the exterior derivative: an inner seeding
    # wraps the (possibly dual) outer value, so levels stay separated
    def inner_derivative(x):
        res = (lambda c: c[0] ** 3)(ad.seed1([x]))
        return ad.partial_of(res, 0)  # 3 x^2, at the caller's level

    outer = (lambda c: c[0] * inner_derivative(c[0]))(ad.seed1([2.0]))
    # value = 3 x^3, derivative = 9 x^2 = 36
    assert abs(ad.value_of(outer) - 24.0) < 1e-13
    assert abs(ad.partial_of(outer, 0) - 36.0) < 1e-13


def test_cot():
    x = 0.8
    res = ad.cot(ad.seed1([x])[0])
    assert abs(ad.value_of(res) - math.cos(x) / math.sin(x)) < 1e-15
    assert abs(ad.partial_of(res, 0) + 1.0 / math.sin(x) ** 2) < 1e-13


@pytest.mark.parametrize("n", [2, 3, 5])
def test_mat_inv_det_against_numpy(n):
    rng = np.random.default_rng(n)
    m = rng.uniform(-1, 1, (n, n)) + n * np.eye(n)
    inv = np.array(ad.mat_inv([list(r) for r in m]))
    det = ad.mat_det([list(r) for r in m])
    assert np.max(np.abs(inv - np.linalg.inv(m))) < 1e-12
    assert abs(det - np.linalg.det(m)) < 1e-12 * abs(np.linalg.det(m)) + 1e-14


def test_mat_inv_with_duals_differentiates_inverse():
    # d/dt inv([[1+t, 0],[0, 2]])[0][0] = -1 at t = 0
    t = ad.seed1([0.0])[0]
    inv = ad.mat_inv([[1.0 + t, 0.0], [0.0, 2.0]])
    assert abs(ad.value_of(inv[0][0]) - 1.0) < 1e-15
    assert abs(ad.partial_of(inv[0][0], 0) + 1.0) < 1e-15


def test_mat_inv_singular_raises():
    with pytest.raises(ad.SingularMatrixError):
        ad.mat_inv([[1.0, 2.0], [2.0, 4.0]])


def test_derivative_mode_context():
    assert ad.get_config().mode == "analytic"
    with ad.derivative_mode("fd", 1e-4):
        assert ad.get_config().mode == "fd"
        assert ad.get_config().step == 1e-4
    assert ad.get_config().mode == "analytic"


def test_diffconfig_validation():
    with pytest.raises(ValueError):
        ad.DiffConfig(mode="nonsense")
    with pytest.raises(ValueError):
        ad.DiffConfig(step=-1.0)
