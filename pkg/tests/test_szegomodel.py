import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rhasym.branches import BranchError
from rhasym.szegomodel import (a_factor, a_factor_boundary, build_model, cosine_coefficients,
                               model_N, model_N_boundary, phi, phi_boundary, quarter_z2m1,
                               quarter_z2m1_boundary, sqrt_phi, sqrt_phi_boundary, szego_D,
                               szego_D_boundary, szego_D_quadrature)
from rhasym.szegomodel import model_growth
from rhasym.weights import WeightSpec, eval_weight, shipped_weights

GRID_X = np.linspace(-0.95, 0.95, 39)
OFF = np.array([2.0, 2 + 1j, -0.3 + 0.4j, 0.7 - 0.2j, -3 - 2j, 0.1 + 1e-3j, 50j])


def test_phi_examples():
    assert abs(phi(2.0) - (2 + math.sqrt(3))) < 1e-15
    z = 1e6 * np.exp(1j * np.array([0.3, 2.0, -1.0]))
    assert np.max(np.abs(phi(z) / (2 * z) - 1)) < 1e-6
    assert abs(phi_boundary(0.0, 1) - 1j) < 1e-16 and abs(phi_boundary(0.0, -1) + 1j) < 1e-16
    assert abs(phi(1e-8j) - 1j) < 1e-7 and abs(phi(-1e-8j) + 1j) < 1e-7
    with pytest.raises(BranchError):
        phi(0.5)


@given(st.floats(-0.999, 0.999))
def test_boundary_identities(x):
    assert abs(phi_boundary(x, 1) * phi_boundary(x, -1) - 1) < 1e-15
    assert abs(quarter_z2m1_boundary(x, 1) - 1j * quarter_z2m1_boundary(x, -1)) < 1e-15
    assert abs(sqrt_phi_boundary(x, 1) * sqrt_phi_boundary(x, -1) - 1) < 1e-15
    assert abs(sqrt_phi_boundary(x, 1) ** 2 - phi_boundary(x, 1)) < 1e-15


def test_boundary_values_are_limits():
    x = np.array([-0.7, 0.0, 0.4])
    for side in (1, -1):
        z = x + side * 1e-12j
        for f, fb in ((phi, phi_boundary), (sqrt_phi, sqrt_phi_boundary),
                      (quarter_z2m1, quarter_z2m1_boundary), (a_factor, a_factor_boundary)):
            assert np.max(np.abs(f(z) - fb(x, side))) < 1e-5


@given(st.floats(-4, 4), st.floats(-4, 4))
def test_a_identities(x, y):
    z = complex(x, y)
    if abs(y) < 1e-3 and abs(x) <= 1.001:
        return
    a = a_factor(z)
    pref = math.sqrt(2) * quarter_z2m1(z)
    assert abs((a + 1 / a) / 2 - sqrt_phi(z) / pref) < 1e-12 * (1 + abs(a) + 1 / abs(a))
    assert abs((a - 1 / a) / 2j - 1j / (sqrt_phi(z) * pref)) < 1e-12 * (1 + abs(a) + 1 / abs(a))


def test_a_examples():
    assert abs(a_factor(1e8) - 1) < 1e-7
    z = 2 + 1j
    a = a_factor(z)
    q = quarter_z2m1(z)
    assert abs((a + 1 / a) / 2 - phi(z) ** 0.5 / (math.sqrt(2) * q)) < 1e-12
    assert abs((a - 1 / a) / 2j - 1j * phi(z) ** -0.5 / (math.sqrt(2) * q)) < 1e-12


def test_cosine_coefficients():
    c = cosine_coefficients(lambda t: np.exp(0.5 * np.cos(t)))
    from scipy.special import iv
    want = np.array([iv(0, 0.5)] + [2 * iv(k, 0.5) for k in range(1, c.size)])
    assert np.max(np.abs(c - want)) < 1e-15


def test_D_examples(legendre_model):
    assert np.max(np.abs(szego_D(legendre_model, OFF) - 1)) < 1e-15
    assert np.max(np.abs(szego_D_boundary(legendre_model, 0.3, 1) - 1)) < 1e-15
    cheb = build_model(WeightSpec.chebyshev())
    assert abs(cheb.D_inf - math.sqrt(2)) < 1e-14
    assert abs(abs(szego_D_boundary(cheb, 0.5, 1)) ** 2 - eval_weight(WeightSpec.chebyshev(), 0.5)) < 1e-8


@pytest.mark.parametrize("w", shipped_weights(), ids=lambda w: w.name)
def test_D_identities_all_shipped(w):
    m = build_model(w)
    rho = eval_weight(w, GRID_X)
    dp, dm = szego_D_boundary(m, GRID_X, 1), szego_D_boundary(m, GRID_X, -1)
    assert np.max(np.abs(dp * dm - rho) / rho) < 1e-12
    assert np.max(np.abs(np.abs(dp) ** 2 - rho) / rho) < 1e-12
    d = szego_D(m, OFF)
    assert np.max(np.abs(szego_D(m, OFF.conj()) - d.conj())) < 1e-13 * np.max(np.abs(d))
    assert np.max(np.abs(szego_D_quadrature(m, OFF[:-2]) / d[:-2] - 1)) < 1e-10
    assert abs(szego_D(m, 1e9) / m.D_inf - 1) < 1e-8


def test_D_against_mpmath():
    w = WeightSpec.custom("exp_linear", 0.5, sigma_plus=0.2)
    m = build_model(w)
    mp.mp.dps = 25
    z = mp.mpc(0.4, 0.7)
    lr = lambda t: -0.2 * mp.log(2 * mp.sin(t / 2) ** 2) + 0.5 * mp.cos(t)
    integral = mp.quad(lambda t: lr(t) / (z - mp.cos(t)), [0, mp.pi])
    want = mp.exp(mp.sqrt(z - 1) * mp.sqrt(z + 1) * integral / (2 * mp.pi))
    assert abs(szego_D(m, complex(z)) - complex(want)) < 1e-12 * abs(complex(want))
    d_inf = mp.exp(mp.quad(lr, [0, mp.pi]) / (2 * mp.pi))
    assert abs(m.D_inf - float(d_inf)) < 1e-13


@pytest.mark.parametrize("w", shipped_weights(), ids=lambda w: w.name)
def test_model_N_identities(w):
    m = build_model(w)
    n = model_N(m, OFF)
    assert np.max(np.abs(np.linalg.det(n) - 1)) < 1e-12
    npl, nmi = model_N_boundary(m, GRID_X, 1), model_N_boundary(m, GRID_X, -1)
    rho = eval_weight(w, GRID_X)
    jump = np.zeros(GRID_X.shape + (2, 2))
    jump[:, 0, 1] = rho
    jump[:, 1, 0] = -1 / rho
    scale = np.linalg.norm(nmi, axis=(-2, -1)) * np.linalg.norm(jump, axis=(-2, -1))
    assert np.max(np.linalg.norm(npl - nmi @ jump, axis=(-2, -1)) / scale) < 1e-13
    assert np.max(np.abs(np.linalg.det(npl) - 1)) < 1e-12


def test_model_N_examples(legendre_model):
    assert np.max(np.abs(model_N(legendre_model, 1e8) - np.eye(2))) < 1e-7
    assert abs(np.linalg.det(model_N(legendre_model, 2 + 1j)) - 1) < 1e-10
    m = legendre_model
    r = model_N_boundary(m, 0.2, 1) - model_N_boundary(m, 0.2, -1) @ np.array([[0, 1], [-1, 0]])
    assert np.max(np.abs(r)) < 1e-6


def test_model_growth_reported():
    m = build_model(WeightSpec.endpoint_power(0.1))
    g = model_growth(m, 1)
    # quarter-root endpoint behaviour of A plus the weight's own D^-1 growth
    assert 0.2 < -g < 0.35
