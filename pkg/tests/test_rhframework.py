import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rhasym.rhframework import (JumpData, SingularOperatorError, R_boundary, cauchy_boundary,
                                cauchy_boundary_fft, cauchy_integral, circle_contour, circle_grid,
                                graded_panels, hilbert_matrix, holder_diagnostics, laurent_theta,
                                lemma_ratio, lens_contour, lp_norm, reconstruct_R,
                                refine_samples, roundtrip_check, solve_sie, spectral_derivative)
from rhasym.weights import Lens, WeightSpec
from rhasym.szegomodel import build_model

CIRCLE = circle_contour()


def scalar_exp(c=0.3):
    return JumpData(CIRCLE, lambda k: np.exp(c * (k + 1 / k)))


def nilpotent(h):
    def v(k):
        out = np.zeros(np.shape(k) + (2, 2), dtype=complex)
        out[..., 0, 0] = out[..., 1, 1] = 1
        out[..., 0, 1] = h(k)
        return out
    return JumpData(CIRCLE, v)


IDENTITY = JumpData(CIRCLE, lambda k: np.broadcast_to(np.eye(2, dtype=complex),
                                                      np.shape(k) + (2, 2)).copy())


def test_cauchy_integral_examples():
    g = circle_grid(64)
    k = g.nodes
    one = np.ones(64)
    assert abs(cauchy_integral(g, one, 0.0) - 1) < 1e-15
    assert abs(cauchy_integral(g, one, 2.0)) < 1e-15
    assert abs(cauchy_integral(g, 1 / k, 2.0) + 0.5) < 1e-15
    assert abs(cauchy_integral(g, k, 0.0)) < 1e-15


def test_cauchy_integral_near_contour_decay():
    g = circle_grid(128)
    f = np.exp(0.3 * g.nodes)
    errs = []
    for d in (0.05, 0.1, 0.2):
        for r in (1 - d, 1 + d):
            z = r * np.exp(0.4j)
            want = np.exp(0.3 * z) if r < 1 else 0
            errs.append(abs(cauchy_integral(g, f, z) - want))
            assert errs[-1] < 10 * math.exp(-128 * d)
    assert errs[-1] < 1e-11


def test_boundary_operator_examples():
    g = circle_grid(32)
    k = g.nodes
    one = np.ones(32)
    assert np.allclose(cauchy_boundary(g, one, 1), 1, atol=1e-14)
    assert np.allclose(cauchy_boundary(g, one, -1), 0, atol=1e-14)
    f = k + 1 / k
    assert np.max(np.abs(cauchy_boundary(g, f, 1) - cauchy_boundary(g, f, -1) - f)) < 1e-10
    assert np.max(np.abs(cauchy_boundary(g, k ** 2, 1) - k ** 2)) < 1e-13
    assert np.max(np.abs(cauchy_boundary(g, k ** 2, -1))) < 1e-13


@given(st.integers(32, 64), st.floats(-1, 1), st.floats(-1, 1))
def test_boundary_operator_matches_fft_projection(m, a, b):
    g = circle_grid(m)
    f = np.exp(a * g.nodes + b / g.nodes)
    for side in (1, -1):
        assert np.max(np.abs(cauchy_boundary(g, f, side) - cauchy_boundary_fft(g, f, side))) < 1e-9


def test_hilbert_matrix_is_involution():
    h = hilbert_matrix(circle_grid(33))
    assert np.max(np.abs(h @ h - np.eye(33))) < 1e-11


def test_spectral_tools():
    g = circle_grid(32, 0.5, 2.0)
    k = g.nodes
    assert np.max(np.abs(spectral_derivative(g, k ** 3) - 3 * k ** 2)) < 1e-11
    fine = refine_samples(np.cos(g.theta), 2)
    assert np.max(np.abs(fine - np.cos(g.refined().theta))) < 1e-14


def test_sie_identity_jump():
    sol = solve_sie(IDENTITY, circle_grid(16))
    assert np.max(np.abs(sol.phi)) == 0
    assert np.max(np.abs(reconstruct_R(sol, np.array([0.3, 3.0])) - np.eye(2))) == 0
    rep = roundtrip_check(IDENTITY, circle_grid(16))
    assert rep.residual_jump == 0 and rep.residual_sie == 0
    assert all(np.all(t == 0) for t in laurent_theta(sol, 3))


def test_sie_nilpotent_jump():
    h = lambda k: k + 0.5 / k + 0.2 / k ** 2
    j = nilpotent(h)
    g = circle_grid(32)
    sol = solve_sie(j, g)
    k = g.nodes
    c_minus = -(0.5 / k + 0.2 / k ** 2)
    want = np.zeros((32, 2, 2), dtype=complex)
    want[:, 0, 1] = c_minus
    assert np.max(np.abs(sol.phi - want)) < 1e-13
    z = np.array([3.0, 0.2j])
    r = reconstruct_R(sol, z)
    cz = np.where(np.abs(z) < 1, z, -(0.5 / z + 0.2 / z ** 2))
    assert np.max(np.abs(r[:, 0, 1] - cz)) < 1e-13
    assert np.max(np.abs(r[:, [0, 1, 1], [0, 0, 1]] - np.array([1, 0, 1]))) < 1e-14
    rep = roundtrip_check(j, g)
    assert rep.residual_jump < 1e-12 and rep.residual_sie < 1e-12
    th = laurent_theta(sol, 2)
    # theta_1 = -(1/2 pi i) int h dk = -0.5
    assert abs(th[0][0, 1] + 0.5) < 1e-14 and abs(th[1][0, 1] + 0.2) < 1e-14


def test_sie_scalar_exponential_jump():
    g = circle_grid(64)
    sol = solve_sie(scalar_exp(), g)
    k = g.nodes
    assert np.max(np.abs(sol.phi[:, 0, 0] - (np.exp(-0.3 / k) - 1))) < 1e-14
    assert abs(reconstruct_R(sol, 2.0)[0, 0] - math.exp(-0.15)) < 1e-14
    assert np.max(np.abs(R_boundary(sol, 1)[:, 0, 0] - np.exp(0.3 * k))) < 1e-13
    th = laurent_theta(sol, 2)
    assert abs(th[0][0, 0] + 0.3) < 1e-14 and abs(th[1][0, 0] - 0.045) < 1e-14
    # theta_1 against a finite-difference far-field fit
    zs = np.array([200.0, 400.0])
    r = np.array([reconstruct_R(sol, z)[0, 0] for z in zs])
    fit = (zs * (r - 1))
    assert abs((2 * fit[1] - fit[0]) - th[0][0, 0]) < 1e-5


def test_roundtrip_spectral_convergence():
    res = [roundtrip_check(scalar_exp(), circle_grid(m)) for m in (4, 8, 16, 32)]
    worst = [max(r.residual_jump, r.residual_sie) for r in res]
    for a, b in zip(worst, worst[1:]):
        assert b <= a / 10 or b < 1e-13
    big = roundtrip_check(scalar_exp(), circle_grid(512))
    assert max(big.residual_jump, big.residual_sie) <= 1e-8
    assert big.to_json().startswith("{")


def test_singular_operator_detected():
    # v = -1 makes I - C_w non-invertible on the circle
    j = JumpData(CIRCLE, lambda k: -np.ones_like(k) + 0 * k)
    with pytest.raises(SingularOperatorError):
        solve_sie(j, circle_grid(16), cond_limit=1e8)


def test_lens_contour_pieces():
    c = lens_contour(Lens(0.3))
    s1 = c.piece("sigma1")
    z, dz = s1.sample(np.array([0.0, 0.5, 1.0]))
    assert abs(z[0] + 1) < 1e-15 and abs(z[1] - 0.3j) < 1e-15 and abs(z[2] - 1) < 1e-15
    assert dz[1].real > 0
    t = np.linspace(0, 1, 2001)
    zz, _ = s1.sample(t)
    num = np.diff(zz) / np.diff(t)
    assert np.max(np.abs(num - s1.dz(0.5 * (t[1:] + t[:-1])))) < 1e-5


def test_graded_panels_integrate_endpoint_singularity():
    t, w = graded_panels(panels=24)
    assert abs(np.sum(w * t ** -0.5 * (1 - t) ** -0.25) - 2.3962804694711837) < 1e-7


def test_lp_norm():
    w = np.full(4, 0.25)
    assert lp_norm([1, 2, 3, 4], w, math.inf) == 4
    assert abs(lp_norm([1, 1, 1, 1], w, 3.0) - 1) < 1e-15


def test_holder_diagnostics_zero_jump():
    n = 10
    s = np.broadcast_to(np.eye(2), (n, 2, 2))
    w = np.zeros((n, 2, 2))
    rep = holder_diagnostics(s, w, s, np.full(n, 0.1), np.ones(n), np.zeros(n), np.ones(n),
                             (2.0, math.inf, 2.0, math.inf))
    assert rep["lhs_L1"] == 0 and rep["phi_Ltau"] == 0 and rep["holds"]
    assert rep["S_Lp"] > 0 and rep["rho_inv_Ltheta"] == 1


def test_lemma_ratio_finite():
    rep = lemma_ratio(build_model(WeightSpec.custom("exp_sqrt", 1.0)))
    assert 0 < rep["ratio"] < math.inf
