import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rhasym.asymlab import (DegenerateFit, ExponentBudget, InadmissibleExponents,
                            error_sweep, exponent_budget, fit_decay, holder_report,
                            lambda_exponent, lens_neighbourhood, parametrix_residual,
                            predict_pn_lens, predict_pn_lens_scaled, predict_pn_outer,
                            predict_pn_outer_scaled, tau_norm_rate)
from rhasym.orthocore import build_system, eval_pn
from rhasym.szegomodel import build_model, phi
from rhasym.weights import WeightSpec

INF = math.inf


# -- exponents -------------------------------------------------------------------

def test_lambda_examples():
    assert lambda_exponent(10, INF) == (Fraction(3, 10), True)
    assert lambda_exponent(INF, INF) == (Fraction(1, 2), True)
    assert lambda_exponent(6, 16) == (Fraction(1, 24), True)
    lam, ok = lambda_exponent(2, INF)
    assert lam == Fraction(-1, 2) and not ok
    # nu_+ in (4, 8) needs nu_- beyond 4 nu_+/(nu_+ - 4) = 12
    assert not lambda_exponent(6, 12)[1]
    assert not lambda_exponent(6, 10)[1]
    # nu_0 = nu_- in (4, 8) is not covered by the second condition
    assert not lambda_exponent(16, 6)[1]
    with pytest.raises(ValueError):
        lambda_exponent(1, INF)


@given(st.floats(1.01, 1e4), st.floats(1.01, 1e4), st.floats(1.0, 50.0))
def test_lambda_monotone(a, b, bump):
    lam, _ = lambda_exponent(a, b)
    assert lambda_exponent(a + bump, b)[0] >= lam
    assert lambda_exponent(a, b + bump)[0] >= lam
    assert lambda_exponent(INF, b)[0] >= lam


@given(st.floats(1.01, 1e4), st.floats(1.01, 1e4))
def test_lambda_positive_when_admissible(a, b):
    lam, ok = lambda_exponent(a, b)
    if ok:
        assert lam > 0


def test_budget_examples():
    b = exponent_budget(INF, INF)
    assert (b.p, b.theta, b.omega, b.tau) == (2, INF, INF, 2)
    b = exponent_budget(10, INF)
    assert (b.p, b.theta, b.omega, b.tau) == (Fraction(20, 11), INF, 20, Fraction(5, 2))
    assert b.reciprocal_sum() == 1
    b = exponent_budget(6, 16)
    assert b.tau == Fraction(192, 52) and b.reciprocal_sum() == 1
    assert b.chi == Fraction(1, 2) and b.r == 0 and b.s == b.lam == Fraction(1, 24)
    with pytest.raises(InadmissibleExponents):
        exponent_budget(2, INF)


@given(st.fractions(Fraction(81, 10), Fraction(10 ** 4)),
       st.one_of(st.just(INF), st.fractions(Fraction(81, 10), Fraction(10 ** 4))))
def test_budget_identities_exact(a, b):
    bud = exponent_budget(a, b)
    assert bud.reciprocal_sum() == 1
    assert 2 / bud.tau - Fraction(1, 2) == bud.lam
    assert bud.p > 1 and 1 / bud.p + 1 / bud.q == 1
    nu0 = min(a, b)
    assert bud.nu0 == nu0
    assert bud.p == 2 * Fraction(nu0) / (1 + nu0)


def test_budget_records():
    b = exponent_budget(10, INF)
    rec = b.to_record()
    assert rec["tau"] == "5/2" and rec["theta"] == "inf"
    assert b.as_floats()["p"] == pytest.approx(20 / 11, rel=1e-15)
    assert isinstance(b, ExponentBudget)


def test_float_inputs_are_exact():
    assert lambda_exponent(10.0, INF)[0] == Fraction(3, 10)
    assert lambda_exponent(0.5 ** -3, 0.25 ** -2)[0] == Fraction(1, 2) - Fraction(2, 8) - Fraction(2, 16)
    assert lambda_exponent("10", "inf") == (Fraction(3, 10), True)


# -- predictions ------------------------------------------------------------------

def test_outer_prediction_closed_form(legendre_model):
    ph = (2 + math.sqrt(3))
    for n in (0, 5, 20):
        want = ph ** (n + 0.5) / (math.sqrt(2) * 3 ** 0.25)
        assert abs(predict_pn_outer(legendre_model, n, 2.0) / want - 1) < 1e-14
    r = predict_pn_outer(legendre_model, 11, 2 + 1j) / predict_pn_outer(legendre_model, 10, 2 + 1j)
    assert abs(r - phi(2 + 1j)) < 1e-13 * abs(r)
    assert abs(predict_pn_outer_scaled(legendre_model, 2.0) - 1 / (math.sqrt(2) * 3 ** 0.25)
               * math.sqrt(ph)) < 1e-15
    with pytest.raises(ValueError):
        predict_pn_outer(legendre_model, 3, 0.5 + 0.01j)


def test_outer_prediction_against_oracle(legendre_sys, legendre_model):
    pn = eval_pn(legendre_sys, 50, 2.0)
    assert abs(pn / predict_pn_outer(legendre_model, 50, 2.0) - 1) <= 0.05


def test_outer_prediction_schwarz_symmetric(shipped_models):
    z = np.array([1.5 + 0.7j, -2 + 0.3j, 0.2 + 1j])
    for m in shipped_models:
        a = predict_pn_outer_scaled(m, z)
        b = predict_pn_outer_scaled(m, z.conj())
        assert np.max(np.abs(a - b.conj())) < 1e-12 * np.max(np.abs(a))


def test_lens_prediction_sign_consistency(shipped_models):
    x = np.array([-0.8, -0.3, 0.0, 0.3, 0.85])
    for m in shipped_models:
        p = predict_pn_lens(m, 12, x, sign=1)
        q = predict_pn_lens(m, 12, x, sign=-1)
        assert np.max(np.abs(p - q) / np.abs(p)) <= 1e-8
        assert np.max(np.abs(p.imag) / np.abs(p)) <= 1e-8


def test_lens_prediction_against_oracle(legendre_sys, legendre_model):
    x = 0.3
    err = abs(eval_pn(legendre_sys, 40, x) - predict_pn_lens(legendre_model, 40, x))
    assert err <= 0.1


def test_lens_prediction_off_axis(legendre_sys, legendre_model):
    z = np.array([0.3 + 0.05j, -0.4 - 0.08j])
    pred = predict_pn_lens(legendre_model, 60, z)
    orac = np.array([eval_pn(legendre_sys, 60, w) for w in z])
    assert np.max(np.abs(orac / pred - 1)) < 0.05
    back = predict_pn_lens(legendre_model, 60, z.conj())
    assert np.max(np.abs(back - pred.conj())) < 1e-12 * np.max(np.abs(pred))
    assert np.allclose(predict_pn_lens_scaled(legendre_model, 60, z) * phi(z) ** 60, pred,
                       rtol=1e-12)


def test_lens_region_checks(legendre_model):
    with pytest.raises(ValueError):
        predict_pn_lens(legendre_model, 10, 0.95)
    with pytest.raises(ValueError):
        predict_pn_lens(legendre_model, 10, 0.3 + 2j)
    with pytest.raises(ValueError):
        predict_pn_lens(legendre_model, 10, np.array([0.3, 0.3 + 0.05j]))


def test_lens_neighbourhood():
    pts = lens_neighbourhood(0.3)
    assert pts.size == 5 and np.all(pts.imag == 0)
    pts = lens_neighbourhood(0.3 + 0.05j)
    assert np.all(pts.imag > 0)


# -- fitting and sweeps -----------------------------------------------------------

def test_fit_decay_exact_power():
    ns = np.array([10, 20, 40, 80, 160])
    e, start, c = fit_decay(ns, 3.0 * ns ** -0.7)
    assert abs(e - 0.7) < 1e-12 and start == 0 and c < -0.999


def test_fit_decay_drops_transient():
    ns = np.array([10, 14, 20, 28, 40, 57, 80, 113, 160])
    err = ns ** -1.0
    err[0] *= 1e4
    e, start, _ = fit_decay(ns, err)
    assert start == 1 and abs(e - 1.0) < 1e-10
    # the window never shrinks below a decade
    e, start, _ = fit_decay(ns, np.where(ns < 57, 1.0, ns ** -1.0), corr=0.9999)
    assert ns[-1] / ns[start] >= 10


def test_fit_decay_degenerate():
    with pytest.raises(DegenerateFit):
        fit_decay([10, 20, 40], [1, 0.5, 0.25])
    with pytest.raises(DegenerateFit):
        fit_decay([10, 11, 12, 13, 14], [1, 0.9, 0.8, 0.7, 0.6])


def test_sweep_legendre_outer(legendre_sys, legendre_model):
    rep = error_sweep(legendre_sys, legendre_model, 2.0)
    assert rep.exponent >= 0.45 and rep.passed and rep.admissible
    assert all(e >= 0 for e in rep.errors)
    assert len(rep.rows()) == len(rep.ns)
    assert rep.to_record()["points"] == [[2.0, 0.0]]


@pytest.mark.parametrize("weight,floor", [
    (WeightSpec.custom("exp_sqrt", 1.0), 0.45),
    (WeightSpec.endpoint_power(0.1), 0.25),
])
def test_sweep_outer_shipped(weight, floor):
    rep = error_sweep(build_system(weight, 160), build_model(weight), 2.0)
    assert rep.exponent >= floor and rep.passed


def test_sweep_lens(legendre_sys, legendre_model):
    rep = error_sweep(legendre_sys, legendre_model, 0.3, region="lens")
    assert rep.exponent >= 0.45 and rep.passed
    with pytest.raises(ValueError):
        error_sweep(legendre_sys, legendre_model, 0.3, region="inner")


def test_sweep_rescaling_invariance():
    w = WeightSpec.custom("exp_linear", 0.5)
    a = error_sweep(build_system(w, 160), build_model(w), 2.0)
    w7 = w.scaled(7.0)
    b = error_sweep(build_system(w7, 160), build_model(w7), 2.0)
    assert abs(a.exponent - b.exponent) <= 1e-6
    assert np.max(np.abs(np.array(a.errors) - np.array(b.errors))) <= 1e-6 * max(a.errors)


# -- parametrix ---------------------------------------------------------------------

def test_parametrix_legendre(legendre_sys, legendre_model):
    rep = parametrix_residual(legendre_sys, legendre_model, delta=0.2)
    assert rep.decreasing and rep.exponent >= 0.3 and rep.passed
    assert max(rep.det_errors) <= 1e-6
    assert rep.samples == 64


def test_parametrix_delta_probe(legendre_sys, legendre_model):
    small = parametrix_residual(legendre_sys, legendre_model, ns=(20,), delta=0.1)
    big = parametrix_residual(legendre_sys, legendre_model, ns=(20,), delta=0.2)
    assert big.residuals[0] <= 2 * small.residuals[0]
    with pytest.raises(ValueError):
        parametrix_residual(legendre_sys, legendre_model, delta=0.5)


def test_parametrix_left_endpoint(legendre_sys, legendre_model):
    rep = parametrix_residual(legendre_sys, legendre_model, ns=(10, 20, 40), center=-1.0)
    assert rep.decreasing and max(rep.det_errors) <= 1e-6


# -- Hoelder budget ----------------------------------------------------------------

@pytest.mark.parametrize("nus", [(INF, INF), (10, INF), (6, 16)])
def test_tau_norm_rate_tracks_lambda(nus):
    bud = exponent_budget(*nus)
    ns = (40, 80, 160, 320, 640, 1280)
    norms, expo = tau_norm_rate(bud, ns)
    assert np.all(np.diff(norms) < 0)
    assert abs(expo - float(bud.lam)) < 0.02


def test_holder_report_legendre(legendre_sys, legendre_model):
    bud = exponent_budget(INF, INF)
    lhs = []
    for n in (10, 20, 40):
        rep = holder_report(legendre_sys, legendre_model, n, bud)
        assert rep["holds"]
        lhs.append(rep["lhs_L1"])
    slope = -np.polyfit(np.log([10, 20, 40]), np.log(lhs), 1)[0]
    assert slope >= 0.45
