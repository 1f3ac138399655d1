"""Recurrence-based ground truth for orthogonal polynomials on (-1, 1).

Polynomials are normalised with leading coefficient ``2**n``:

    p_{k+1}(z) = (2z - 2 alpha_k) p_k(z) - 4 beta_k p_{k-1}(z),

where ``alpha``/``beta`` are the monic recurrence coefficients produced by a
discretised Stieltjes procedure.  The quadrature lives in the angle
``theta = arccos(x)``, mapped to a Gauss-Jacobi rule whose exponents absorb
the endpoint powers of the weight, so the rule is spectrally accurate for
every shipped family.
"""
from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi

from .branches import phi
from .ddarith import dd_dot, dd_sum
from .weights import Lens, WeightSpec, eval_weight_complex

TRUST_TOL = 1e-10
DD_THRESHOLD = 60
_MILLER_DIGITS = 39.0  # ln(1e17)
_QUAD_LOSS = 14.0  # max ln-cancellation accepted by the quadrature route


class PrecisionError(ArithmeticError):
    """Requested accuracy not reachable; ``trusted_degree`` is what is."""

    def __init__(self, message: str, trusted_degree: int = -1):
        super().__init__(message)
        self.trusted_degree = trusted_degree


class TieBreakError(ValueError):
    """Point too close to a contour to classify its region."""


class CauchyAccuracyWarning(UserWarning):
    pass


# -- quadrature ----------------------------------------------------------------

@lru_cache(maxsize=32)
def _gauss_jacobi(m: int, alpha: float, beta: float):
    t, lam = roots_jacobi(m, alpha, beta)
    t.flags.writeable = False
    lam.flags.writeable = False
    return t, lam


@dataclass(frozen=True, eq=False)
class MeasureRule:
    """Nodes ``x`` (with endpoint gaps) and log-weights for rho(x) dx."""

    x: np.ndarray
    omx: np.ndarray
    opx: np.ndarray
    logw: np.ndarray

    @property
    def weights(self):
        return np.exp(self.logw)

    @property
    def size(self) -> int:
        return self.x.size

    def integrate(self, f_vals):
        return np.tensordot(self.weights, f_vals, axes=(0, 0))


def measure_rule(w: WeightSpec, m: int) -> MeasureRule:
    """m-point rule for the measure rho(x) dx in the angle variable.

    With x = cos(theta) and theta = pi (1 + t)/2,
    rho(x) dx = c 2^(a+b+1) sin(theta/2)^(2a+1) cos(theta/2)^(2b+1) e^g (pi/2) dt,
    so a Gauss-Jacobi rule in t with exponents (2b+1, 2a+1) carries the
    endpoint behaviour and the rest is entire or smooth in t.
    """
    a, b = w.jacobi_exponents
    t, lam = _gauss_jacobi(int(m), 2 * b + 1, 2 * a + 1)
    u = 0.25 * math.pi * (1 + t)
    v = 0.25 * math.pi * (1 - t)
    su, sv = np.sin(u), np.sin(v)
    x = -np.sin(0.5 * math.pi * t)
    omx, opx = 2 * su * su, 2 * sv * sv
    lq = math.log(0.25 * math.pi)
    logw = (np.log(lam) + (a + b + 1) * math.log(2.0) + math.log(0.5 * math.pi)
            + (2 * a + 1) * (lq + np.log(su / u)) + (2 * b + 1) * (lq + np.log(sv / v))
            + np.real(w.log_smooth(x, omx, opx)))
    return MeasureRule(x, omx, opx, logw)


# -- recurrence ---------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class RecurrenceTable:
    alpha: np.ndarray
    beta: np.ndarray
    nodes: int = 0
    refinement: int = 0
    trusted_degree: int = -1

    @property
    def degree(self) -> int:
        return self.alpha.size - 1

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            out = csv.writer(fh)
            out.writerow(["k", "alpha", "beta"])
            for k, (al, be) in enumerate(zip(self.alpha, self.beta)):
                out.writerow([k, f"{al:.17e}", f"{be:.17e}"])

    @classmethod
    def from_csv(cls, path) -> "RecurrenceTable":
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        alpha = np.array([float(r["alpha"]) for r in rows])
        beta = np.array([float(r["beta"]) for r in rows])
        return cls(alpha, beta, trusted_degree=alpha.size - 1)


def _stieltjes(rule: MeasureRule, n: int, extended: bool):
    """Discretised Stieltjes procedure with orthonormal node vectors."""
    x, wts = rule.x, rule.weights
    dot = dd_dot if extended else (lambda u, v: float(np.dot(u, v)))
    beta0 = sum(dd_sum(wts)) if extended else float(np.sum(wts))
    alpha = np.empty(n + 1)
    beta = np.empty(n + 1)
    beta[0] = beta0
    q_prev = np.zeros_like(x)
    q = np.sqrt(wts / beta0)
    for k in range(n + 1):
        alpha[k] = dot(x * q, q)
        if k == n:
            break
        r = (x - alpha[k]) * q - math.sqrt(beta[k]) * q_prev if k else (x - alpha[k]) * q
        bk = dot(r, r)
        if not bk > 0:
            raise PrecisionError(f"Stieltjes breakdown at degree {k + 1}", k)
        beta[k + 1] = bk
        q_prev, q = q, r / math.sqrt(bk)
    return alpha, beta


def default_nodes(n: int) -> int:
    return int(math.ceil(2.2 * n)) + 64


def build_recurrence(w: WeightSpec, N: int, nodes: int | None = None, check: bool = True,
                     tol: float = TRUST_TOL) -> RecurrenceTable:
    """Monic recurrence coefficients alpha_0..alpha_N, beta_0..beta_N.

    The table is rebuilt with twice the nodes and the largest degree up to
    which both agree within ``tol`` is recorded as ``trusted_degree``.  With
    ``check`` set, a shortfall raises :class:`PrecisionError`.
    """
    if N < 0:
        raise ValueError("degree must be nonnegative")
    m = default_nodes(N) if nodes is None else int(nodes)
    extended = N > DD_THRESHOLD
    alpha, beta = _stieltjes(measure_rule(w, m), N, extended)
    alpha2, beta2 = _stieltjes(measure_rule(w, 2 * m), N, extended)
    bad = (np.abs(alpha - alpha2) > tol) | (np.abs(beta - beta2) > tol * np.abs(beta2))
    trusted = int(np.argmax(bad)) - 1 if bad.any() else N
    if w.is_even:
        if np.max(np.abs(alpha2[: trusted + 1]), initial=0.0) > 1e-12:
            raise PrecisionError("nonzero diagonal coefficient for an even weight", trusted)
        alpha2 = np.zeros_like(alpha2)
    if check and trusted < N:
        raise PrecisionError(
            f"recurrence trusted only up to degree {trusted} (requested {N})", trusted)
    return RecurrenceTable(alpha2, beta2, nodes=2 * m, refinement=1, trusted_degree=trusted)


# -- the system ----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class OrthoSystem:
    """Recurrence table plus norms ``h[n] = ||p_n||^2`` and ``eta[n] = -pi i/h[n]``.

    ``n_max`` is the largest degree guaranteed for evaluation; the table
    extends further to feed the backward recurrence for Cauchy transforms.
    """

    weight: WeightSpec
    rec: RecurrenceTable
    n_max: int
    rule: MeasureRule = field(repr=False)
    log_h: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        n = np.arange(self.rec.degree + 1)
        object.__setattr__(self, "log_h", n * math.log(4.0) + np.cumsum(np.log(self.rec.beta)))

    @property
    def h(self) -> np.ndarray:
        return np.exp(self.log_h)

    @property
    def eta(self) -> np.ndarray:
        return -1j * math.pi / self.h

    def _check_degree(self, n: int):
        if n < 0 or n > self.n_max:
            raise ValueError(f"degree {n} outside trusted range 0..{self.n_max}")


def build_system(w: WeightSpec, n_max: int, table: int | None = None) -> OrthoSystem:
    """Oracle system valid up to ``n_max`` (cached per weight and size)."""
    table = 4 * n_max + 64 if table is None else max(int(table), n_max + 1)
    return _build_system(w, int(n_max), int(table))


@lru_cache(maxsize=16)
def _build_system(w: WeightSpec, n_max: int, table: int) -> OrthoSystem:
    rec = build_recurrence(w, table, check=False)
    if rec.trusted_degree < n_max + 1:
        raise PrecisionError(
            f"recurrence trusted only up to degree {rec.trusted_degree}", rec.trusted_degree)
    return OrthoSystem(w, rec, n_max, measure_rule(w, rec.nodes))


def system_from_table(w: WeightSpec, rec: RecurrenceTable, n_max: int | None = None) -> OrthoSystem:
    n_max = rec.degree - 1 if n_max is None else n_max
    return OrthoSystem(w, rec, n_max, measure_rule(w, max(rec.nodes, default_nodes(rec.degree))))


# -- evaluation ----------------------------------------------------------------

def _all_pn(rec: RecurrenceTable, n: int, z):
    """p_0(z), ..., p_n(z) stacked along a new leading axis."""
    z = np.asarray(z)
    out = np.empty((n + 1,) + z.shape, dtype=np.result_type(z, float))
    out[0] = 1.0
    if n >= 1:
        out[1] = 2 * z - 2 * rec.alpha[0]
    for k in range(1, n):
        out[k + 1] = (2 * z - 2 * rec.alpha[k]) * out[k] - 4 * rec.beta[k] * out[k - 1]
    return out


def eval_pn(sys: OrthoSystem, n: int, z):
    """p_n(z) by forward recurrence."""
    sys._check_degree(n)
    val = _all_pn(sys.rec, n, z)[n]
    if np.any(~np.isfinite(val)):
        raise OverflowError("p_n overflowed; use eval_pn_scaled")
    return val if np.ndim(val) else val.item()


def eval_pn_scaled(sys: OrthoSystem, n: int, z):
    """p_n(z) / phi(z)**n via the ratio recurrence (bounded in n)."""
    sys._check_degree(n)
    z = np.asarray(z, dtype=complex)
    ph = np.asarray(phi(z))
    if np.any(np.abs(ph) <= 1 + 1e-6):
        raise ValueError("eval_pn_scaled needs |phi(z)| > 1 + 1e-6")
    al, be = sys.rec.alpha, sys.rec.beta
    r_prev, r = np.zeros_like(z), np.ones_like(z)
    for k in range(n):
        r_prev, r = r, ((2 * z - 2 * al[k]) / ph) * r - (4 * be[k] / ph ** 2) * r_prev
    return r if r.ndim else complex(r)


def norm_pn(sys: OrthoSystem, n: int) -> float:
    """||p_n|| in L^2(rho dx)."""
    sys._check_degree(n)
    return math.exp(0.5 * sys.log_h[n])


def _segment_distance(z):
    z = np.asarray(z, dtype=complex)
    return np.where(np.abs(z.real) <= 1, np.abs(z.imag),
                    np.minimum(np.abs(z - 1), np.abs(z + 1)))


def _miller(rec: RecurrenceTable, ns, z, depth: int):
    """Q_n(z) = int p_n rho/(z - x) dx by the backward continued fraction."""
    ph = np.asarray(phi(z))
    al, be = rec.alpha, rec.beta
    nmax = max(ns)
    r = 1.0 / ph
    ratios = {}
    for k in range(depth, 0, -1):
        r = 4 * be[k] / ((2 * z - 2 * al[k]) - r)
        if k <= nmax:
            ratios[k] = r
    q = 2 * be[0] / (2 * z - 2 * al[0] - r)
    out = {0: q}
    for k in range(1, nmax + 1):
        q = q * ratios[k]
        out[k] = q
    return np.stack([out[n] for n in ns])


def _quad_route(sys: OrthoSystem, ns, z):
    """Q_n(z) from the difference quotient plus the weighted log integral.

    int p_n rho/(x - z) = sum_j w_j (p_n(x_j) - p_n(z))/(x_j - z) + p_n(z) F0(z)
    with F0 = int (rho(x) - rho(z))/(x - z) dx + rho(z) int dx/(x - z), so
    the near-singular kernel only meets functions smooth across x = z.
    """
    rule, rec = sys.rule, sys.rec
    nmax = max(ns)
    x = rule.x[:, None]
    wts = rule.weights
    pz = _all_pn(rec, nmax, z)
    d_prev = np.zeros((x.size, z.size), dtype=complex)
    d = np.zeros_like(d_prev)
    diffq = {0: d}
    for k in range(nmax):
        nxt = (2 * x - 2 * rec.alpha[k]) * d + 2 * pz[k][None, :]
        if k:
            nxt = nxt - 4 * rec.beta[k] * d_prev
        d_prev, d = d, nxt
        diffq[k + 1] = d
    rho_z = np.asarray(eval_weight_complex(sys.weight, z, check=False))
    inv_rho = np.exp(-np.real(sys.weight.log_rho_parts(rule.x, rule.omx, rule.opx)))
    kern = (1.0 - rho_z[None, :] * inv_rho[:, None]) / (x - z[None, :])
    f0 = wts @ kern + rho_z * (np.log(1 - z) - np.log(-1 - z))
    res = [-(wts @ diffq[n] + pz[n] * f0) for n in ns]
    return np.stack(res)


def second_kind(sys: OrthoSystem, ns, z, floor: float = 1e-3):
    """Q_n(z) = int p_n(x) rho(x)/(z - x) dx for each n in ``ns``.

    Far from the cut the backward recurrence is used; close to it, where
    the minimal solution decays too slowly for the table, the quadrature
    route takes over (this needs z inside the lens of the weight).
    """
    ns = [int(n) for n in np.atleast_1d(ns)]
    for n in ns:
        sys._check_degree(n)
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if np.any(_segment_distance(z) < floor):
        raise ValueError(f"point closer than {floor} to [-1, 1]")
    nmax = max(ns)
    lphi = np.log(np.abs(np.asarray(phi(z))))
    depth = nmax + np.ceil(_MILLER_DIGITS / (2 * lphi)).astype(int) + 8
    in_lens = sys.weight.lens.contains(z)
    use_quad = (2 * nmax * lphi <= _QUAD_LOSS) & in_lens
    too_deep = (depth > sys.rec.degree) & ~use_quad
    if np.any(too_deep):
        use_quad = use_quad | (too_deep & in_lens)
        if np.any(too_deep & ~in_lens):
            raise PrecisionError("point too close to the cut for the recurrence table "
                                 "and outside the lens", sys.rec.trusted_degree)
        warnings.warn("near-cut Cauchy transform computed with cancellation",
                      CauchyAccuracyWarning, stacklevel=2)
    out = np.empty((len(ns), z.size), dtype=complex)
    mill = ~use_quad
    if mill.any():
        out[:, mill] = _miller(sys.rec, ns, z[mill], int(depth[mill].max()))
    if use_quad.any():
        out[:, use_quad] = _quad_route(sys, ns, z[use_quad])
    return out


def cauchy_transform_weighted(sys: OrthoSystem, n: int, z, floor: float = 1e-3):
    """(1/2 pi i) int p_n(x) rho(x)/(x - z) dx."""
    zz = np.asarray(z, dtype=complex)
    val = -second_kind(sys, [n], zz.ravel(), floor)[0] / (2j * math.pi)
    return val.reshape(zz.shape) if zz.ndim else complex(val[0])


def _mat(a11, a12, a21, a22):
    return np.stack([np.stack([a11, a12], -1), np.stack([a21, a22], -1)], -2)


def assemble_X(sys: OrthoSystem, n: int, z, floor: float = 1e-3):
    """The 2x2 solution built from p_n, p_{n-1} and their Cauchy transforms.

    For n = 0 the second row is taken as (0, 1).
    """
    zz = np.asarray(z, dtype=complex)
    zf = zz.ravel()
    if n == 0:
        c0 = -second_kind(sys, [0], zf, floor)[0] / (2j * math.pi)
        one = np.ones_like(zf)
        out = _mat(one, c0, 0 * one, one)
    else:
        ps = _all_pn(sys.rec, n, zf)
        q = second_kind(sys, [n - 1, n], zf, floor) / (-2j * math.pi)
        eta = sys.eta[n - 1]
        out = _mat(ps[n], q[1], eta * ps[n - 1], eta * q[0])
    return out.reshape(zz.shape + (2, 2))


def lens_region(z, contour: Lens):
    """1 outside the lens, 2 in its upper half, 3 in its lower half."""
    z = np.asarray(z, dtype=complex)
    near = (contour.distance_to_arcs(z) < 1e-10) | (
        (np.abs(z.imag) < 1e-10) & (np.abs(z.real) <= 1 + 1e-10))
    if np.any(near):
        raise TieBreakError("point within 1e-10 of the lens contour")
    inside = contour.contains(z)
    return np.where(~inside, 1, np.where(z.imag > 0, 2, 3))


def S_from_X(sys: OrthoSystem, n: int, z, contour: Lens | None = None, floor: float = 1e-3):
    """Transformed solution: X phi^(-n sigma3), times the lens factor
    [[1, 0], [-/+ rho^-1 phi^(-2n), 1]] in the upper/lower lens."""
    contour = Lens(0.3) if contour is None else contour
    if contour.half_height > sys.weight.lens_half_height:
        raise ValueError("lens contour must lie inside the lens of analyticity")
    zz = np.asarray(z, dtype=complex)
    zf = zz.ravel()
    region = lens_region(zf, contour)
    ph = np.asarray(phi(zf))
    logph = np.log(ph)
    if n == 0:
        x = assemble_X(sys, 0, zf, floor)
        s = x.copy()
    else:
        ps_scaled = _all_pn(sys.rec, n, zf)[n - 1:] * np.exp(-n * logph)
        q = second_kind(sys, [n - 1, n], zf, floor) / (-2j * math.pi) * np.exp(n * logph)
        eta = sys.eta[n - 1]
        s = _mat(ps_scaled[1], q[1], eta * ps_scaled[0], eta * q[0])
    lens_pts = region != 1
    if lens_pts.any():
        zl = zf[lens_pts]
        sign = np.where(region[lens_pts] == 2, -1.0, 1.0)
        fac = sign * np.exp(-np.asarray(sys.weight.log_rho_parts(zl, 1 - zl, 1 + zl))
                            - 2 * n * logph[lens_pts])
        s[lens_pts, :, 0] = s[lens_pts, :, 0] + s[lens_pts, :, 1] * fac[:, None]
    return s.reshape(zz.shape + (2, 2))
