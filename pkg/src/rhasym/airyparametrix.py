"""Complex Airy functions and the Airy model Riemann-Hilbert problem.

``airy_ai`` sums the Maclaurin series in complex double-double arithmetic
for |z| <= 8 (so cancellation in the decaying sector costs nothing) and
uses the asymptotic expansion beyond, rotated through the connection
formula when |arg z| > 2 pi/3.

The piecewise solution is ``Upsilon = E C_j`` in sector j with the entire
matrix E = [[Ai(z), Ai(xi^2 z)], [Ai'(z), xi^2 Ai'(xi^2 z)]] e^(pi i sigma3/12)
and constant right factors C_j.  Rays: Sigma_1 = R_+ (outward), Sigma_2 at
angle ``beta`` (inward), Sigma_3 = R_- (inward), Sigma_4 at ``-beta``
(inward); the + side is on the left.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

import numpy as np

from .ddarith import (cdd_add, cdd_from_complex, cdd_mul, cdd_scale, cdd_div_scalar,
                      cdd_to_complex, dd_from_decimal)

XI = complex(-0.5, math.sqrt(3) / 2)
XI2 = complex(-0.5, -math.sqrt(3) / 2)
SERIES_RADIUS = 8.0
_SERIES_TERMS = 40
_C1 = dd_from_decimal("0.355028053887817239260063186004183176397979174")
_C2 = dd_from_decimal("0.258819403792806798405183560189203963479091138")
_INV_2SQRTPI = 1.0 / (2.0 * math.sqrt(math.pi))


class SectorTieError(ValueError):
    """Point within the tie-break distance of a ray."""


class OffRayError(ValueError):
    pass


# -- Airy function -------------------------------------------------------------

def _series(z):
    """Ai, Ai' from the Maclaurin series (complex double-double)."""
    z = np.asarray(z, dtype=complex)
    zc = cdd_from_complex(z)
    z3 = cdd_mul(cdd_mul(zc, zc), zc)
    one = cdd_from_complex(np.ones_like(z))
    t, f = one, one
    s = zc
    g = zc
    u = cdd_div_scalar(cdd_mul(zc, zc), 2.0)
    fp = u
    v, gp = one, one
    for k in range(1, _SERIES_TERMS):
        t = cdd_div_scalar(cdd_mul(t, z3), float((3 * k - 1) * 3 * k))
        f = cdd_add(f, t)
        s = cdd_div_scalar(cdd_mul(s, z3), float(3 * k * (3 * k + 1)))
        g = cdd_add(g, s)
        if k >= 2:
            u = cdd_div_scalar(cdd_mul(u, z3), float((3 * k - 1) * (3 * k - 3)))
            fp = cdd_add(fp, u)
        v = cdd_div_scalar(cdd_mul(v, z3), float(3 * k * (3 * k - 2)))
        gp = cdd_add(gp, v)
    neg_c2 = (-_C2[0], -_C2[1])
    ai = cdd_add(cdd_scale(f, _C1), cdd_scale(g, neg_c2))
    aip = cdd_add(cdd_scale(fp, _C1), cdd_scale(gp, neg_c2))
    return cdd_to_complex(ai), cdd_to_complex(aip)


def _asymptotic_coeffs(count: int = 60):
    u = [1.0]
    for k in range(1, count):
        u.append(u[-1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216 * k))
    u = np.array(u)
    v = np.array([1.0] + [-(6 * k + 1) / (6 * k - 1) * u[k] for k in range(1, count)])
    return u, v


_U, _V = _asymptotic_coeffs()


def _asymptotic(z):
    """Expansion valid for |arg z| <= 2 pi/3, truncated at the smallest term."""
    z = np.asarray(z, dtype=complex)
    zeta = (2.0 / 3.0) * z ** 1.5
    q = -1.0 / zeta
    sa = np.zeros_like(z)
    sb = np.zeros_like(z)
    term = np.ones_like(z)
    prev = np.full(z.shape, np.inf)
    live = np.ones(z.shape, dtype=bool)
    for k in range(_U.size):
        ta, tb = _U[k] * term, _V[k] * term
        mag = np.abs(ta)
        live &= mag < prev
        sa = np.where(live, sa + ta, sa)
        sb = np.where(live, sb + tb, sb)
        live &= mag > 1e-17 * np.abs(sa)
        prev = mag
        term = term * q
        if not live.any():
            break
    ez = np.exp(-zeta)
    q4 = z ** 0.25
    return _INV_2SQRTPI * ez / q4 * sa, -_INV_2SQRTPI * q4 * ez * sb


def _far(z):
    z = np.asarray(z, dtype=complex)
    ai = np.empty_like(z)
    aip = np.empty_like(z)
    direct = np.abs(np.angle(z)) <= 2 * math.pi / 3
    if direct.any():
        ai[direct], aip[direct] = _asymptotic(z[direct])
    rot = ~direct
    if rot.any():
        zr = z[rot]
        a1, d1 = _asymptotic(XI * zr)
        a2, d2 = _asymptotic(XI2 * zr)
        ai[rot] = -XI * a1 - XI2 * a2
        aip[rot] = -XI2 * d1 - XI * d2
    return ai, aip


def airy_ai(z):
    """(Ai(z), Ai'(z)) for complex z (scalars or arrays)."""
    zz = np.asarray(z, dtype=complex)
    flat = zz.ravel()
    ai = np.empty_like(flat)
    aip = np.empty_like(flat)
    near = np.abs(flat) <= SERIES_RADIUS
    if near.any():
        ai[near], aip[near] = _series(flat[near])
    if (~near).any():
        ai[~near], aip[~near] = _far(flat[~near])
    ai, aip = ai.reshape(zz.shape), aip.reshape(zz.shape)
    if zz.ndim == 0:
        return complex(ai), complex(aip)
    return ai, aip


def check_connection(z):
    """|Ai(z) + xi Ai(xi z) + xi^2 Ai(xi^2 z)| relative to the largest term."""
    zz = np.asarray(z, dtype=complex)
    terms = np.stack([airy_ai(zz)[0], XI * airy_ai(XI * zz)[0], XI2 * airy_ai(XI2 * zz)[0]])
    scale = np.max(np.abs(terms), axis=0)
    res = np.abs(terms.sum(axis=0)) / np.where(scale > 0, scale, 1.0)
    return res if res.ndim else float(res)


# -- the entire matrix E ----------------------------------------------------------

_TWELFTH = np.exp(1j * math.pi / 12)
DET_E = np.exp(1j * math.pi / 6) / (2 * math.pi)


def _mat(a11, a12, a21, a22):
    return np.stack([np.stack([a11, a12], -1), np.stack([a21, a22], -1)], -2)


def entire_E(z):
    zz = np.asarray(z, dtype=complex)
    a, ap = airy_ai(zz)
    b, bp = airy_ai(XI2 * zz)
    return _mat(a * _TWELFTH, b / _TWELFTH, ap * _TWELFTH, XI2 * bp / _TWELFTH)


# -- sectors and jumps -------------------------------------------------------------

# Gaussian-integer matrices as nested tuples of Python complex with integer parts.
V_A = {
    1: ((1, -1j), (0, 1)),
    2: ((1, 0), (1j, 1)),
    3: ((0, -1j), (-1j, 0)),
    4: ((1, 0), (1j, 1)),
}
SECTOR_FACTOR = {
    1: ((1, 0), (0, 1)),
    2: ((1, 0), (-1j, 1)),
    3: ((0, 1j), (1j, 1)),
    4: ((1, 1j), (0, 1)),
}


@dataclass(frozen=True)
class AirySectorLayout:
    """Four rays at angles 0, beta, pi, -beta with beta in (pi/2, pi)."""

    beta: float = 3 * math.pi / 4
    tie: float = 1e-12

    def __post_init__(self):
        if not math.pi / 2 < self.beta < math.pi:
            raise ValueError("ray angle must lie strictly between pi/2 and pi")

    @property
    def angles(self):
        return {1: 0.0, 2: self.beta, 3: math.pi, 4: -self.beta}

    @property
    def outward(self):
        return {1: True, 2: False, 3: False, 4: False}

    def ray_distance(self, z):
        z = np.asarray(z, dtype=complex)
        d = np.full(z.shape, np.inf)
        for ang in self.angles.values():
            rel = z * np.exp(-1j * ang)
            d = np.minimum(d, np.where(rel.real > 0, np.abs(rel.imag), np.abs(z)))
        return d

    def classify(self, z):
        z = np.asarray(z, dtype=complex)
        if np.any(self.ray_distance(z) <= self.tie):
            raise SectorTieError("point within tie-break distance of a ray")
        arg = np.angle(z)
        out = np.where(arg > self.beta, 2, np.where(arg > 0, 1, np.where(arg > -self.beta, 4, 3)))
        return out if out.ndim else int(out)

    def sides(self, ray: int):
        """(sector on the + side, sector on the - side) of a ray."""
        return {1: (1, 4), 2: (1, 2), 3: (2, 3), 4: (3, 4)}[ray]


def _as_array(m):
    return np.array(m, dtype=complex)


def upsilon(z, layout: AirySectorLayout | None = None):
    """Piecewise solution E(z) C_j, j the sector of z."""
    layout = layout or AirySectorLayout()
    zz = np.asarray(z, dtype=complex)
    sec = np.asarray(layout.classify(zz))
    e = entire_E(zz)
    facs = np.stack([_as_array(SECTOR_FACTOR[j]) for j in (1, 2, 3, 4)])
    return e @ facs[sec - 1]


def upsilon_boundary(k, ray: int, side: int, layout: AirySectorLayout | None = None):
    """Boundary value of Upsilon on a ray from the + (side=1) or - side."""
    layout = layout or AirySectorLayout()
    plus, minus = layout.sides(ray)
    sec = plus if side == 1 else minus
    return entire_E(k) @ _as_array(SECTOR_FACTOR[sec])


def ray_points(ray: int, radii, layout: AirySectorLayout | None = None):
    layout = layout or AirySectorLayout()
    return np.asarray(radii, dtype=float) * np.exp(1j * layout.angles[ray])


def jump_residual(ray: int, radii, layout: AirySectorLayout | None = None):
    """max |Upsilon_+ - Upsilon_- v_A| / (|Upsilon_-| |v_A|) on a ray."""
    k = ray_points(ray, radii, layout)
    up = upsilon_boundary(k, ray, 1, layout)
    um = upsilon_boundary(k, ray, -1, layout)
    v = _as_array(V_A[ray])
    scale = np.linalg.norm(um, 2, axis=(-2, -1)) * np.linalg.norm(v, 2)
    return float(np.max(np.linalg.norm(up - um @ v, 2, axis=(-2, -1)) / scale))


def check_F(z, layout: AirySectorLayout | None = None, method: str = "ode",
            radius: float = 0.5, nodes: int = 64):
    """|| Upsilon'' Upsilon^-1 - [[z, 0], [1, z]] || (relative to 1 + |z|).

    ``method="ode"`` differentiates every entry symbolically (Ai'' = z Ai
    applied to each Airy solution at its own rotated argument).
    ``method="cauchy"`` takes Upsilon'' from the Cauchy integral formula on a
    circle of ``radius`` around z, using the entire continuation of the
    sector's representation, so no differential identity of Ai enters.
    """
    layout = layout or AirySectorLayout()
    zz = np.atleast_1d(np.asarray(z, dtype=complex))
    sec = np.asarray(layout.classify(zz))
    ups = upsilon_stable(zz, layout)
    if method == "ode":
        ups2 = upsilon_stable(zz, layout, derivative=2)
    elif method == "cauchy":
        theta = 2 * math.pi * np.arange(nodes) / nodes
        ring = zz[:, None] + radius * np.exp(1j * theta)[None, :]
        vals = upsilon_stable(ring, layout, np.broadcast_to(sec[:, None], ring.shape))
        kern = np.exp(-2j * theta)[None, :, None, None]
        ups2 = 2 * np.mean(vals * kern, axis=1) / radius ** 2
    else:
        raise ValueError(f"unknown method {method!r}")
    f = ups2 @ np.linalg.inv(ups)
    target = _mat(zz, 0 * zz, 1 + 0 * zz, zz)
    res = np.linalg.norm(f - target, 2, axis=(-2, -1)) / (1 + np.abs(zz))
    return res.reshape(np.shape(z)) if np.ndim(z) else float(res[0])


def det_upsilon(z, layout: AirySectorLayout | None = None):
    return np.linalg.det(upsilon_stable(z, layout))


# Columns c * [Ai(m z), m Ai'(m z)] used by the stable representation.
_COLUMNS = {
    "e1": (_TWELFTH, 1.0),
    "e2": (1 / _TWELFTH, XI2),
    "r1": (-XI * _TWELFTH, XI),
    "r2": (-XI2 / _TWELFTH, XI),
    "i2": (1j / _TWELFTH, XI2),
}
_PICK = {1: ("e1", "e2"), 2: ("r1", "e2"), 3: ("i2", "r2"), 4: ("e1", "r2")}


def upsilon_stable(z, layout: AirySectorLayout | None = None, sector=None,
                   derivative: int = 0):
    """Upsilon rewritten with the connection formula so that every column is
    a single Airy solution that is recessive in the sector.  Equal to
    :func:`upsilon` algebraically; free of the cancellation E C_j suffers
    for large |z| in Omega_2, Omega_3 and Omega_4.  ``sector`` (an array
    shaped like ``z``) forces the representation of a given sector,
    continued as an entire function.  ``derivative=2`` returns the entrywise
    second derivative in z."""
    if derivative not in (0, 2):
        raise ValueError("derivative must be 0 or 2")
    layout = layout or AirySectorLayout()
    zz = np.asarray(z, dtype=complex)
    sec = np.asarray(layout.classify(zz)) if sector is None else np.asarray(sector)
    cols = {}
    for name, (c, m) in _COLUMNS.items():
        u = m * zz
        ai, aip = airy_ai(u)
        if derivative == 0:
            cols[name] = (c * ai, c * m * aip)
        else:
            # d^2/dz^2 Ai(m z) = m^2 u Ai(u); d^3/dz^3 Ai(m z) = m^3 (Ai(u) + u Ai'(u))
            cols[name] = (c * m * m * u * ai, c * m ** 3 * (ai + u * aip))
    out = np.empty(zz.shape + (2, 2), dtype=complex)
    for s, (c1, c2) in _PICK.items():
        msk = sec == s
        out[msk, 0, 0], out[msk, 1, 0] = cols[c1][0][msk], cols[c1][1][msk]
        out[msk, 0, 1], out[msk, 1, 1] = cols[c2][0][msk], cols[c2][1][msk]
    return out


def normalization_error(z):
    """|| 2 sqrt(pi) e^(-pi i/12) z^(sigma3/4) Upsilon e^((2/3) z^(3/2) sigma3) - [[1,1],[-1,1]] ||."""
    zz = np.asarray(z, dtype=complex)
    if np.any((2.0 / 3.0) * np.abs(zz) ** 1.5 > 650):
        raise ValueError("|z| too large for unscaled exponentials")
    ups = upsilon_stable(zz)
    zeta = (2.0 / 3.0) * zz ** 1.5
    q4 = zz ** 0.25
    m = ups * (2 * math.sqrt(math.pi) / _TWELFTH)
    m = m * np.stack([q4, 1 / q4], -1)[..., :, None]
    m = m * np.stack([np.exp(zeta), np.exp(-zeta)], -1)[..., None, :]
    target = np.array([[1, 1], [-1, 1]], dtype=complex)
    res = np.linalg.norm(m - target, 2, axis=(-2, -1))
    return res if res.ndim else float(res)


def normalization_rate(radii=(12.0, 25.0, 50.0, 80.0), count: int = 16):
    """Max normalization error per radius and the fitted power of |z|."""
    radii = np.asarray(radii, dtype=float)
    ang = np.linspace(-math.pi, math.pi, count, endpoint=False) + math.pi / count
    errs = np.array([np.max(normalization_error(r * np.exp(1j * ang))) for r in radii])
    slope = float(np.polyfit(np.log(radii), np.log(errs), 1)[0])
    return errs, slope


# -- exact Gaussian-integer arithmetic ---------------------------------------------

def _gi(x):
    c = complex(x)
    if c.real != int(c.real) or c.imag != int(c.imag):
        raise ValueError("entry is not a Gaussian integer")
    return (int(c.real), int(c.imag))


def gi_matrix(m):
    return tuple(tuple(_gi(x) for x in row) for row in m)


def _gmul(a, b):
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def _gadd(a, b):
    return (a[0] + b[0], a[1] + b[1])


def gi_matmul(a, b):
    return tuple(tuple(_gadd(_gmul(a[i][0], b[0][j]), _gmul(a[i][1], b[1][j]))
                       for j in range(2)) for i in range(2))


def gi_det(a):
    p, q = _gmul(a[0][0], a[1][1]), _gmul(a[0][1], a[1][0])
    return (p[0] - q[0], p[1] - q[1])


def gi_inv_unimodular(a):
    if gi_det(a) != (1, 0):
        raise ValueError("matrix is not unimodular")
    neg = lambda g: (-g[0], -g[1])  # noqa: E731
    return ((a[1][1], neg(a[0][1])), (neg(a[1][0]), a[0][0]))


GI_IDENTITY = (((1, 0), (0, 0)), ((0, 0), (1, 0)))


def gi_product(factors):
    out = GI_IDENTITY
    for f in factors:
        out = gi_matmul(out, f)
    return out


def airy_cyclic_factors(omit: int | None = None):
    """v_1 v_2^-1 v_3^-1 v_4^-1 as exact factors (inverse for inward rays)."""
    layout = AirySectorLayout()
    out = []
    for j in (1, 2, 3, 4):
        if j == omit:
            continue
        m = gi_matrix(V_A[j])
        out.append(m if layout.outward[j] else gi_inv_unimodular(m))
    return out


def check_cyclic_airy(omit: int | None = None) -> bool:
    return gi_product(airy_cyclic_factors(omit)) == GI_IDENTITY


# -- Bessel jump data ---------------------------------------------------------------

BESSEL_ANGLES = {1: 3 * math.pi / 4, 2: math.pi, 3: -3 * math.pi / 4}
BESSEL_INWARD = {1: True, 2: True, 3: True}
V_B = {1: ((1, 0), (1, 1)), 2: ((0, 1), (-1, 0)), 3: ((1, 0), (1, 1))}


def bessel_ray(zeta, tol: float = 1e-12) -> int:
    z = complex(zeta)
    if abs(z) <= tol:
        raise OffRayError("the origin belongs to every ray")
    for j, ang in BESSEL_ANGLES.items():
        rel = z * complex(math.cos(-ang), math.sin(-ang))
        if rel.real > 0 and abs(rel.imag) <= tol * max(1.0, abs(z)):
            return j
    raise OffRayError(f"{zeta} is not on the Bessel contour")


def bessel_jump(zeta):
    return np.array(V_B[bessel_ray(zeta)], dtype=complex)


def bessel_cyclic_product(inward=None):
    """Exact product v_3^e3 v_2^e2 v_1^e1 around the origin counterclockwise,
    starting in the sector containing R_+, where each exponent follows the
    ray orientation: Psi on the next sector is Psi_prev v^-1 if the ray
    points inward (the previous sector is its + side) and Psi_prev v if it
    points outward.  Returns the monodromy factor M with Psi_start = Psi_start M."""
    inward = BESSEL_INWARD if inward is None else inward
    out = GI_IDENTITY
    for j in (1, 2, 3):
        m = gi_matrix(V_B[j])
        out = gi_matmul(out, gi_inv_unimodular(m) if inward[j] else m)
    return out


def bessel_orientation_scan():
    """Monodromy for all 8 orientation choices."""
    return {o: bessel_cyclic_product(dict(zip((1, 2, 3), o)))
            for o in product((True, False), repeat=3)}
