"""Exponent budget, leading-order predictions for p_n and error sweeps.

The decay exponent for the new weight class is

    lambda = 1/2 - 2/nu_0 - 2/nu_-,       nu_0 = min(nu_+, nu_-),

and the Hoelder exponents behind it are

    p = 2 nu_0/(1 + nu_0),  theta = nu_-,  omega = 2 nu_0,
    tau = 2 nu_0 nu_- / (nu_0 nu_- - 2 (nu_0 + nu_-)),

so that 1/p + 1/theta + 1/tau + 1/omega = 1 and lambda = 2/tau - 1/2.
All exponent arithmetic is carried out on reciprocals in exact rationals
(an infinite exponent has reciprocal 0).

Errors of the asymptotic formulas are always measured after division by
phi(z)^n, which keeps every quantity bounded in n.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from .branches import (phi, phi_boundary, quarter_z2m1, quarter_z2m1_boundary, sqrt_phi,
                       sqrt_phi_boundary)
from .orthocore import (CauchyAccuracyWarning, OrthoSystem, S_from_X, _all_pn,
                        _segment_distance, eval_pn_scaled)
from .rhframework import graded_panels, holder_diagnostics
from .szegomodel import ModelSolution, model_N, szego_D, szego_D_boundary
from .weights import Lens, eval_weight, eval_weight_complex

__all__ = [
    "CHI", "DEFAULT_NS", "PARAMETRIX_NS", "InadmissibleExponents", "DegenerateFit",
    "ExponentBudget", "AsymptoticReport", "ParametrixReport", "lambda_exponent",
    "exponent_budget", "predict_pn_outer", "predict_pn_outer_scaled", "predict_pn_lens",
    "predict_pn_lens_scaled", "fit_decay", "error_sweep", "lens_neighbourhood",
    "parametrix_residual", "tau_norm_rate", "holder_report",
]

CHI = Fraction(1, 2)
DEFAULT_NS = (10, 14, 20, 28, 40, 57, 80, 113, 160)
PARAMETRIX_NS = (10, 14, 20, 28, 40, 57, 80)
_SQRT2 = math.sqrt(2.0)


class InadmissibleExponents(ValueError):
    """(nu_+, nu_-) satisfies neither admissibility condition."""


class DegenerateFit(ValueError):
    """Fewer than five usable points for a decay fit."""


# -- exponent arithmetic --------------------------------------------------------

def _recip(nu) -> Fraction:
    """Exact reciprocal of an exponent; floats are read via their shortest repr."""
    if isinstance(nu, str):
        nu = math.inf if nu.strip().lower() in ("inf", "infinity") else Fraction(nu)
    if isinstance(nu, float):
        if math.isinf(nu):
            if nu < 0:
                raise ValueError("exponent must exceed 1")
            return Fraction(0)
        nu = Fraction(repr(nu))
    nu = Fraction(nu)
    if nu <= 1:
        raise ValueError("exponent must exceed 1")
    return 1 / nu


def _from_recip(r: Fraction):
    return math.inf if r == 0 else 1 / r


def lambda_exponent(nu_plus, nu_minus):
    """Return ``(lam, admissible)``.

    ``lam = 1/2 - 2/nu_0 - 2/nu_-`` as an exact Fraction.  The pair is
    admissible when nu_0 > 8, or when nu_0 = nu_+ lies in (4, 8) and
    nu_- > 4 nu_+/(nu_+ - 4).  The value is returned either way.
    """
    rp, rm = _recip(nu_plus), _recip(nu_minus)
    r0 = max(rp, rm)
    lam = Fraction(1, 2) - 2 * r0 - 2 * rm
    cond1 = r0 < Fraction(1, 8)
    # nu_- > 4 nu_+/(nu_+ - 4)  <=>  1/nu_- < 1/4 - 1/nu_+
    cond2 = (r0 == rp and Fraction(1, 8) < rp < Fraction(1, 4)
             and rm < Fraction(1, 4) - rp)
    return lam, bool(cond1 or cond2)


@dataclass(frozen=True)
class ExponentBudget:
    """Hoelder exponents for the L^1 bound of S_- w_S N^-1.

    Finite exponents are Fractions, infinite ones ``math.inf``.  ``r`` is
    the a priori exponent (0 for this problem) and ``s`` the net decay.
    """

    p: object
    theta: object
    tau: object
    omega: object
    q: object
    chi: Fraction
    r: Fraction
    s: Fraction
    nu0: object
    nu_plus: object
    nu_minus: object
    lam: Fraction

    def reciprocal_sum(self) -> Fraction:
        return sum((_recip_ext(v) for v in (self.p, self.theta, self.tau, self.omega)),
                   Fraction(0))

    def as_floats(self) -> dict:
        return {k: float(v) for k, v in asdict(self).items()}

    def to_record(self) -> dict:
        """JSON-friendly form; exact values as strings."""
        return {k: ("inf" if v == math.inf else str(v)) for k, v in asdict(self).items()}


def _recip_ext(v) -> Fraction:
    return Fraction(0) if v == math.inf else 1 / Fraction(v)


def exponent_budget(nu_plus, nu_minus) -> ExponentBudget:
    lam, ok = lambda_exponent(nu_plus, nu_minus)
    if not ok:
        raise InadmissibleExponents(
            f"(nu+, nu-) = ({nu_plus}, {nu_minus}) is not admissible (lambda = {lam})")
    rp, rm = _recip(nu_plus), _recip(nu_minus)
    r0 = max(rp, rm)
    inv_p = (1 + r0) / 2
    inv_tau = Fraction(1, 2) - r0 - rm
    return ExponentBudget(
        p=1 / inv_p, theta=_from_recip(rm), tau=1 / inv_tau, omega=_from_recip(r0 / 2),
        q=_from_recip(1 - inv_p), chi=CHI, r=Fraction(0), s=lam,
        nu0=_from_recip(r0), nu_plus=_from_recip(rp), nu_minus=_from_recip(rm), lam=lam)


# -- predictions ----------------------------------------------------------------

def _outer_checked(z, margin: float):
    z = np.asarray(z, dtype=complex)
    if np.any(_segment_distance(z) < margin):
        raise ValueError(f"outer prediction needs distance >= {margin} from [-1, 1]")
    return z


def _ret(v):
    return v if np.ndim(v) else complex(v)


def predict_pn_outer_scaled(m: ModelSolution, z, margin: float = 0.05):
    """Leading term of p_n(z)/phi(z)^n off the segment (independent of n)."""
    z = _outer_checked(z, margin)
    val = m.D_inf * np.asarray(sqrt_phi(z)) / (
        _SQRT2 * np.asarray(szego_D(m, z)) * np.asarray(quarter_z2m1(z)))
    return _ret(val)


def predict_pn_outer(m: ModelSolution, n: int, z, margin: float = 0.05):
    """Leading term D_inf phi^(n+1/2) / (sqrt2 D (z^2-1)^(1/4))."""
    z = _outer_checked(z, margin)
    val = np.asarray(predict_pn_outer_scaled(m, z, margin)) * np.exp(n * np.log(phi(z)))
    return _ret(val)


def _lens_checked(m: ModelSolution, z, margin: float):
    z = np.asarray(z, dtype=complex)
    if np.any(~m.weight.lens.contains(z)) or np.any(np.abs(z.real) > 1 - margin):
        raise ValueError(f"lens prediction needs z inside the lens with |Re z| <= {1 - margin}")
    return z


def _lens_terms(m: ModelSolution, z, sign):
    """(first, second) with p_n/phi^n ~ first + second * phi^(-2n)."""
    z = np.asarray(z, dtype=complex)
    on_axis = z.imag == 0
    if np.any(on_axis) and not np.all(on_axis):
        raise ValueError("mix of real and non-real points; split the call")
    if np.all(on_axis):
        if sign not in (1, -1):
            raise ValueError("sign must be +1 or -1 on (-1, 1)")
        x = z.real
        q = np.asarray(quarter_z2m1_boundary(x, sign))
        d = np.asarray(szego_D_boundary(m, x, sign))
        sp = np.asarray(sqrt_phi_boundary(x, sign))
        rho = np.asarray(eval_weight(m.weight, x))
        s = np.full(z.shape, float(sign))
    else:
        half = np.sign(z.imag)
        if sign is not None and np.any(half != sign):
            raise ValueError("sign must match the half plane of z")
        q = np.asarray(quarter_z2m1(z))
        d = np.asarray(szego_D(m, z))
        sp = np.asarray(sqrt_phi(z))
        rho = np.asarray(eval_weight_complex(m.weight, z))
        s = half
    pref = 1.0 / (_SQRT2 * q)
    first = pref * m.D_inf / d * sp
    second = pref * s * 1j * m.D_inf * d / (rho * sp)
    return first, second, z


def _phi_any(z, sign):
    z = np.asarray(z, dtype=complex)
    if np.all((z.imag == 0) & (np.abs(z.real) < 1)):
        return np.asarray(phi_boundary(z.real, sign))
    return np.asarray(phi(z))


def predict_pn_lens_scaled(m: ModelSolution, n: int, z, sign=None, margin: float = 0.1):
    """Two-term lens prediction divided by phi(z)^n.

    Off the axis ``sign`` defaults to the half plane of ``z``; on (-1, 1)
    it selects which boundary values are used (+1 by default).
    """
    z = _lens_checked(m, z, margin)
    if sign is None and np.all(z.imag == 0):
        sign = 1
    first, second, z = _lens_terms(m, z, sign)
    ph = _phi_any(z, sign)
    return _ret(first + second * np.exp(-2 * n * np.log(ph)))


def predict_pn_lens(m: ModelSolution, n: int, z, sign=None, margin: float = 0.1):
    """Two-term lens prediction
    (D_inf/D phi^(n+1/2) +/- i D_inf D/rho phi^(-n-1/2)) / (sqrt2 (z^2-1)^(1/4))."""
    z = _lens_checked(m, z, margin)
    if sign is None and np.all(z.imag == 0):
        sign = 1
    first, second, z = _lens_terms(m, z, sign)
    lph = n * np.log(_phi_any(z, sign))
    return _ret(first * np.exp(lph) + second * np.exp(-lph))


# -- fitting ---------------------------------------------------------------------

def fit_decay(ns, errors, min_points: int = 5, corr: float = 0.98, span: float = 10.0):
    """Least-squares decay exponent of ``errors`` against ``ns``.

    The smallest n are dropped one by one until the correlation of
    (log n, log e) exceeds ``corr`` in magnitude, while keeping at least
    ``min_points`` points spanning a factor ``span`` in n.  If no admissible
    window reaches ``corr`` the best-correlated one is used.
    Returns ``(exponent, start_index, correlation)`` with exponent = -slope.
    """
    ns = np.asarray(ns, dtype=float)
    e = np.asarray(errors, dtype=float)
    ok = np.isfinite(e) & (e > 0)
    ns, e = ns[ok], e[ok]
    if ns.size < min_points:
        raise DegenerateFit(f"only {ns.size} usable points")
    if ns[-1] / ns[0] < span:
        raise DegenerateFit(f"n range {ns[0]:g}..{ns[-1]:g} spans less than {span:g}x")
    ln, le = np.log(ns), np.log(e)
    best = None
    for start in range(ns.size - min_points + 1):
        if ns[-1] / ns[start] < span:
            break
        x, y = ln[start:], le[start:]
        c = float(np.corrcoef(x, y)[0, 1]) if np.ptp(y) > 0 else 0.0
        slope = float(np.polyfit(x, y, 1)[0])
        if best is None or abs(c) > abs(best[2]):
            best = (-slope, start, c)
        if abs(c) > corr:
            return -slope, start, c
    return best


@dataclass
class AsymptoticReport:
    weight: str
    region: str
    points: list
    ns: list
    errors: list
    predictions: list
    oracles: list
    exponent: float
    window_start: int
    correlation: float
    lam: float
    slack: float
    admissible: bool = True
    passed: bool = False

    def rows(self):
        """CSV rows (n, error, prediction, oracle) at the first point."""
        return [(n, e, p, o) for n, e, p, o in
                zip(self.ns, self.errors, self.predictions, self.oracles)]

    def to_record(self) -> dict:
        rec = asdict(self)
        rec["points"] = [[complex(p).real, complex(p).imag] for p in self.points]
        rec["predictions"] = [[complex(p).real, complex(p).imag] for p in self.predictions]
        rec["oracles"] = [[complex(p).real, complex(p).imag] for p in self.oracles]
        return rec


def lens_neighbourhood(z, radius: float = 0.05, count: int = 5):
    """Small compact set V around z used for lens sweeps.

    For real z this is ``count`` points on the segment; otherwise a cross
    of ``count`` points in the same half plane.
    """
    z = complex(z)
    off = radius * np.linspace(-1.0, 1.0, count)
    if z.imag == 0:
        return z.real + off + 0j
    pts = np.concatenate([z + off, z + 1j * off[np.abs(off) > 0] * min(1.0, abs(z.imag) / (2 * radius))])
    return pts


def _oracle_scaled(sys: OrthoSystem, n: int, z, sign):
    """p_n(z)/phi(z)^n from the oracle recurrence."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    ph = _phi_any(z, sign)
    if np.all(np.abs(ph) > 1.5):
        return np.atleast_1d(eval_pn_scaled(sys, n, z))
    sys._check_degree(n)
    arg = z.real if np.all(z.imag == 0) else z
    return _all_pn(sys.rec, n, arg)[n] * np.exp(-n * np.log(ph))


def error_sweep(sys: OrthoSystem, m: ModelSolution, z, ns=DEFAULT_NS, region: str = "outer",
                neighbourhood=None, lam=None, slack: float = 0.05) -> AsymptoticReport:
    """Compare the oracle with the leading-order prediction over ``ns``.

    ``region`` is ``"outer"`` (z off the segment) or ``"lens"``.  For the
    lens the error at each n is the maximum over ``neighbourhood`` (by
    default :func:`lens_neighbourhood` of z), so isolated zeros of the error
    do not distort the fit.  The report passes when the fitted exponent is
    at least ``lam - slack``; ``lam`` defaults to the weight's exponent.
    """
    ns = [int(n) for n in ns]
    for n in ns:
        sys._check_degree(n)
    if region == "outer":
        pts = np.atleast_1d(np.asarray(z, dtype=complex))
        pred0 = np.asarray(predict_pn_outer_scaled(m, pts))
        preds = [pred0] * len(ns)
        oracles = [_oracle_scaled(sys, n, pts, None) for n in ns]
    elif region == "lens":
        pts = lens_neighbourhood(z) if neighbourhood is None else \
            np.atleast_1d(np.asarray(neighbourhood, dtype=complex))
        sign = 1 if np.all(pts.imag == 0) else None
        preds = [np.atleast_1d(predict_pn_lens_scaled(m, n, pts, sign)) for n in ns]
        oracles = [_oracle_scaled(sys, n, pts, sign) for n in ns]
    else:
        raise ValueError("region must be 'outer' or 'lens'")
    errors = [float(np.max(np.abs(o - p))) for o, p in zip(oracles, preds)]
    lam_w, admissible = lambda_exponent(m.weight.nu_plus, m.weight.nu_minus)
    lam = float(lam_w) if lam is None else lam
    expo, start, c = fit_decay(ns, errors)
    return AsymptoticReport(
        weight=m.weight.name, region=region, points=list(pts), ns=ns, errors=errors,
        predictions=[complex(p[0]) for p in preds], oracles=[complex(o[0]) for o in oracles],
        exponent=expo, window_start=start, correlation=c, lam=float(lam), slack=slack,
        admissible=admissible, passed=bool(expo >= lam - slack))


# -- exact solution as local parametrix -----------------------------------------------

@dataclass
class ParametrixReport:
    weight: str
    center: float
    delta: float
    samples: int
    ns: list
    residuals: list
    det_errors: list
    exponent: float
    window_start: int
    correlation: float
    lam: float
    slack: float
    decreasing: bool
    passed: bool

    def to_record(self) -> dict:
        return asdict(self)


def _inv2(a):
    out = np.empty_like(a)
    out[..., 0, 0] = a[..., 1, 1]
    out[..., 1, 1] = a[..., 0, 0]
    out[..., 0, 1] = -a[..., 0, 1]
    out[..., 1, 0] = -a[..., 1, 0]
    det = a[..., 0, 0] * a[..., 1, 1] - a[..., 0, 1] * a[..., 1, 0]
    return out / det[..., None, None]


def parametrix_residual(sys: OrthoSystem, m: ModelSolution, ns=PARAMETRIX_NS,
                        delta: float = 0.2, samples: int = 64, center: float = 1.0,
                        contour: Lens | None = None, lam=None, slack: float = 0.2,
                        rise: float = 1.05) -> ParametrixReport:
    """max over k on |k - center| = delta of ||S(k, n) N(k)^-1 - I||_2.

    Samples sit half a step off the real axis.  ``decreasing`` allows each
    step to rise by the factor ``rise`` (quadrature noise near the cut).
    """
    if not 0.1 <= delta <= 0.3:
        raise ValueError("delta must lie in [0.1, 0.3]")
    contour = Lens(0.3) if contour is None else contour
    theta = 2 * math.pi * (np.arange(samples) + 0.5) / samples
    k = center + delta * np.exp(1j * theta)
    n_inv = _inv2(np.asarray(model_N(m, k)))
    eye = np.eye(2)
    res, dets = [], []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", CauchyAccuracyWarning)
        for n in ns:
            s = np.asarray(S_from_X(sys, int(n), k, contour))
            r = s @ n_inv
            res.append(float(np.max(np.linalg.norm(r - eye, ord=2, axis=(-2, -1)))))
            d = r[:, 0, 0] * r[:, 1, 1] - r[:, 0, 1] * r[:, 1, 0]
            dets.append(float(np.max(np.abs(d - 1))))
    if lam is None:
        lam = float(lambda_exponent(m.weight.nu_plus, m.weight.nu_minus)[0])
    try:
        expo, start, c = fit_decay(ns, res, span=1.0)
    except DegenerateFit:
        expo, start, c = math.nan, 0, math.nan
    dec = all(b <= a * rise for a, b in zip(res, res[1:]))
    return ParametrixReport(
        weight=m.weight.name, center=center, delta=delta, samples=samples,
        ns=[int(n) for n in ns], residuals=res, det_errors=dets, exponent=expo,
        window_start=start, correlation=c, lam=float(lam), slack=slack, decreasing=dec,
        passed=bool(dec and expo >= lam - slack and max(dets) <= 1e-6))


# -- Hoelder budget diagnostics ---------------------------------------------------------

def _arc_rule(lens: Lens, panels: int, cut: float = 0.0):
    """Graded nodes on both arcs, restricted to t in [cut, 1 - cut]."""
    t, wt = graded_panels(panels=panels)
    t = cut + (1 - 2 * cut) * t
    wt = wt * (1 - 2 * cut) * lens.arc_speed()
    return t, wt


def tau_norm_rate(budget: ExponentBudget, ns=DEFAULT_NS, lens: Lens | None = None,
                  panels: int = 24):
    """||phi^-2n (z-1)^-1/4 (z+1)^-1/4||_{L^tau} over both arcs of ``lens``.

    Returns ``(norms, exponent)``; the exponent of decay should approach
    2/tau - 1/2 = lambda.
    """
    lens = Lens(0.3) if lens is None else lens
    t, wt = _arc_rule(lens, panels)
    tau = float(budget.tau)
    norms = []
    for n in ns:
        vals = []
        for upper in (True, False):
            z = lens.arc(t, upper)
            f = np.exp(-2 * n * np.log(phi(z))) / np.asarray(quarter_z2m1(z))
            vals.append(np.sum(wt * np.abs(f) ** tau))
        norms.append(float(sum(vals) ** (1 / tau)))
    slope = float(np.polyfit(np.log(np.asarray(ns, float)), np.log(norms), 1)[0])
    return norms, -slope


def holder_report(sys: OrthoSystem, m: ModelSolution, n: int, budget: ExponentBudget,
                  lens: Lens | None = None, cut: float = 0.01, panels: int = 8) -> dict:
    """Generalised Hoelder bound for ||S_- w_S N^-1||_{L^1} on both lens arcs.

    With T = X phi^(-n sigma3), S_- = T [[1, 0], [-f, 1]] on the upper arc
    and S_- = T on the lower one, where f = rho^-1 phi^-2n and w_S = f E21.
    The parameter ``cut`` trims the ends of each arc, where the Cauchy
    transforms are not evaluated; the inequality holds on any subset.
    """
    lens = Lens(0.3) if lens is None else lens
    t, wt = _arc_rule(lens, panels, cut)
    inner = Lens(lens.half_height / 3)
    parts = {k: [] for k in ("s", "w", "ninv", "ds", "rho_inv", "phi", "d")}
    for upper in (True, False):
        z = lens.arc(t, upper)
        tm = np.asarray(S_from_X(sys, n, z, inner))
        logph = np.log(phi(z))
        rho_inv = 1.0 / np.asarray(eval_weight_complex(m.weight, z, check=False))
        f = rho_inv * np.exp(-2 * n * logph)
        if upper:
            tm = tm.copy()
            tm[:, :, 0] = tm[:, :, 0] - f[:, None] * tm[:, :, 1]
        w = np.zeros(z.shape + (2, 2), dtype=complex)
        w[:, 1, 0] = f
        ninv = _inv2(np.asarray(model_N(m, z)))
        d = np.asarray(szego_D(m, z))
        row = np.abs(ninv[:, 0, :]).max(axis=-1) / np.abs(d)
        parts["s"].append(tm)
        parts["w"].append(w)
        parts["ninv"].append(ninv)
        parts["ds"].append(wt)
        parts["rho_inv"].append(np.abs(rho_inv))
        parts["phi"].append(np.abs(np.exp(-2 * n * logph)) * row * math.sqrt(2))
        parts["d"].append(np.abs(d))
    cat = {k: np.concatenate(v) for k, v in parts.items()}
    exps = tuple(float(v) for v in (budget.p, budget.theta, budget.tau, budget.omega))
    return holder_diagnostics(cat["s"], cat["w"], cat["ninv"], cat["ds"], cat["rho_inv"],
                              cat["phi"], cat["d"], exps)
