"""Contours, Cauchy operators and the singular integral equation.

Closed smooth contours (circles) are discretised with the periodic
trapezoid rule.  Boundary values of the Cauchy operator use singularity
subtraction with a spectral derivative on the diagonal, giving spectral
accuracy without any regularisation parameter.  The residual problem

    R_+ = R_- v  on the contour,  R -> I at infinity

is recast as ``(I - C_w) Phi = C_-(w)`` with ``w = v - I`` and
``C_w f = C_-(f w)``; then ``R = I + C((Phi + I) w)`` and ``R_- = I + Phi``.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

# -- contours -----------------------------------------------------------------


@dataclass(frozen=True)
class ContourPiece:
    """Smooth oriented piece ``t -> z(t)``, ``t`` in [0, 1]."""

    name: str
    z: Callable
    dz: Callable

    def sample(self, t):
        t = np.asarray(t, dtype=float)
        return self.z(t), self.dz(t)


@dataclass(frozen=True)
class OrientedContour:
    pieces: tuple
    closed: bool = False
    meta: dict = field(default_factory=dict, compare=False)

    def piece(self, name: str) -> ContourPiece:
        for p in self.pieces:
            if p.name == name:
                return p
        raise KeyError(name)


def circle_contour(center: complex = 0.0, radius: float = 1.0, name: str = "circle"):
    """Counterclockwise circle."""
    tau = 2 * math.pi
    piece = ContourPiece(name, lambda t: center + radius * np.exp(1j * tau * t),
                         lambda t: 1j * tau * radius * np.exp(1j * tau * t))
    return OrientedContour((piece,), closed=True)


def lens_contour(lens):
    """Upper arc, the segment and the lower arc, each oriented from -1 to 1."""
    c, r = lens.offset, lens.radius
    psi0 = math.atan2(c, 1.0)
    dpsi = 2 * psi0 - math.pi

    def dup(t):
        psi = (math.pi - psi0) + np.asarray(t) * dpsi
        return 1j * r * np.exp(1j * psi) * dpsi

    pieces = (
        ContourPiece("sigma1", lambda t: lens.arc(t, True), dup),
        ContourPiece("sigma2", lambda t: -1.0 + 2.0 * np.asarray(t, dtype=complex),
                     lambda t: 2.0 + 0j * np.asarray(t)),
        ContourPiece("sigma3", lambda t: lens.arc(t, False), lambda t: np.conj(dup(t))),
    )
    return OrientedContour(pieces, closed=False,
                           meta={"model": ("sigma2",), "exp": ("sigma1", "sigma3")})


@dataclass(frozen=True, eq=False)
class JumpData:
    """Contour plus jump matrix function ``v``; ``w = v - I``."""

    contour: OrientedContour
    v: Callable
    unimodular: bool = True

    def v_at(self, k):
        val = np.asarray(self.v(np.asarray(k, dtype=complex)), dtype=complex)
        if val.ndim == np.ndim(k):  # scalar jump
            val = val[..., None, None]
        return val

    def w_at(self, k):
        val = self.v_at(k)
        return val - np.eye(val.shape[-1])


# -- Nystrom grid --------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class NystromGrid:
    """Equispaced trapezoid grid on a circle."""

    resolution: int
    center: complex = 0.0
    radius: float = 1.0

    @property
    def theta(self):
        return 2 * math.pi * np.arange(self.resolution) / self.resolution

    @property
    def nodes(self):
        return self.center + self.radius * np.exp(1j * self.theta)

    @property
    def arc_weights(self):
        """Positive arc-length weights."""
        return np.full(self.resolution, 2 * math.pi * self.radius / self.resolution)

    @property
    def dk(self):
        """Complex weights for integrals against dk."""
        return 1j * (self.nodes - self.center) * (2 * math.pi / self.resolution)

    def refined(self, factor: int = 2) -> "NystromGrid":
        return NystromGrid(self.resolution * factor, self.center, self.radius)

    def inside(self, z):
        return np.abs(np.asarray(z) - self.center) < self.radius


def circle_grid(resolution: int, center: complex = 0.0, radius: float = 1.0) -> NystromGrid:
    if resolution < 4:
        raise ValueError("need at least 4 nodes")
    return NystromGrid(int(resolution), complex(center), float(radius))


def _freqs(m: int):
    return np.fft.fftfreq(m, 1.0 / m)


def spectral_derivative(grid: NystromGrid, f):
    """d f / dk at the nodes (along axis 0)."""
    m = grid.resolution
    f = np.asarray(f, dtype=complex)
    kk = _freqs(m)
    if m % 2 == 0:
        kk[m // 2] = 0.0
    shape = (m,) + (1,) * (f.ndim - 1)
    dtheta = np.fft.ifft(1j * kk.reshape(shape) * np.fft.fft(f, axis=0), axis=0)
    return dtheta / (1j * (grid.nodes - grid.center)).reshape(shape)


def refine_samples(f, factor: int = 2):
    """Trigonometric interpolation of periodic samples to ``factor`` times as
    many equispaced nodes (axis 0); the Nyquist mode is split evenly."""
    f = np.asarray(f, dtype=complex)
    m = f.shape[0]
    big = m * factor
    c = np.fft.fft(f, axis=0)
    out = np.zeros((big,) + f.shape[1:], dtype=complex)
    half = m // 2
    if m % 2:
        out[: half + 1] = c[: half + 1]
        out[big - half:] = c[half + 1:]
    else:
        out[:half] = c[:half]
        out[big - half + 1:] = c[half + 1:]
        out[half] = 0.5 * c[half]
        out[big - half] = 0.5 * c[half]
    return np.fft.ifft(out, axis=0) * factor


# -- Cauchy operators ----------------------------------------------------------


def cauchy_integral(grid: NystromGrid, f, z):
    """(1/2 pi i) int f(k)/(k - z) dk for z off the contour.

    The value at the nearest node is subtracted first and restored through
    the exact integral of 1/(k - z) (1 inside, 0 outside).  The remaining
    error decays roughly like exp(-resolution * distance / radius).
    """
    f = np.asarray(f, dtype=complex)
    zz = np.atleast_1d(np.asarray(z, dtype=complex))
    k = grid.nodes
    near = np.argmin(np.abs(zz[:, None] - k[None, :]), axis=1)
    kern = grid.dk[None, :] / (k[None, :] - zz[:, None]) / (2j * math.pi)
    fm = f.reshape(f.shape[0], -1)
    diff = fm[None, :, :] - fm[near][:, None, :]
    val = np.einsum("zj,zjc->zc", kern, diff) + fm[near] * grid.inside(zz)[:, None]
    val = val.reshape(zz.shape + f.shape[1:])
    return val if np.ndim(z) else val[0]


def hilbert_matrix(grid: NystromGrid):
    """Matrix H with C_+/- = (+/- I + H)/2 at the nodes (singularity subtraction)."""
    m = grid.resolution
    k = grid.nodes
    dk = grid.dk
    diff = k[None, :] - k[:, None]
    np.fill_diagonal(diff, 1.0)
    off = dk[None, :] / diff
    np.fill_diagonal(off, 0.0)
    dmat = spectral_derivative(grid, np.eye(m))
    h = (off - np.diag(off.sum(axis=1)) + dk[:, None] * dmat) / (1j * math.pi)
    return h + np.eye(m)


def cauchy_boundary(grid: NystromGrid, f, side: int):
    """C_+ f (side=+1, left of the contour) or C_- f (side=-1) at the nodes."""
    if side not in (1, -1):
        raise ValueError("side must be +1 or -1")
    f = np.asarray(f, dtype=complex)
    fm = f.reshape(f.shape[0], -1)
    hf = hilbert_matrix(grid) @ fm
    return (0.5 * (side * fm + hf)).reshape(f.shape)


def cauchy_boundary_fft(grid: NystromGrid, f, side: int):
    """Independent route: projection onto nonnegative/negative frequencies."""
    f = np.asarray(f, dtype=complex)
    m = grid.resolution
    c = np.fft.fft(f, axis=0)
    kk = _freqs(m).reshape((m,) + (1,) * (f.ndim - 1))
    pos = np.fft.ifft(np.where(kk >= 0, c, 0), axis=0)
    return pos if side == 1 else pos - f


# -- singular integral equation ---------------------------------------------------


class SingularOperatorError(np.linalg.LinAlgError):
    def __init__(self, message: str, condition_number: float):
        super().__init__(message)
        self.condition_number = condition_number


@dataclass
class SIESolution:
    phi: np.ndarray
    grid: NystromGrid
    w: np.ndarray
    condition_number: float
    residual: float


def solve_sie(j: JumpData, grid: NystromGrid, cond_limit: float = 1e13) -> SIESolution:
    """Nystrom solution of (I - C_w) Phi = C_-(w), row by row."""
    k = grid.nodes
    w = j.w_at(k)
    m, p = grid.resolution, w.shape[-1]
    cm = 0.5 * (hilbert_matrix(grid) - np.eye(m))
    a = np.zeros((p * m, p * m), dtype=complex)
    for c in range(p):
        for d in range(p):
            blk = -cm * w[None, :, d, c]
            if c == d:
                blk = blk + np.eye(m)
            a[c * m:(c + 1) * m, d * m:(d + 1) * m] = blk
    rhs = np.concatenate([cm @ w[:, :, c] for c in range(p)], axis=0)
    cond = float(np.linalg.cond(a))
    if not np.isfinite(cond) or cond > cond_limit:
        raise SingularOperatorError(f"discrete operator singular (cond {cond:.3e})", cond)
    sol = np.linalg.solve(a, rhs)
    resid = float(np.max(np.abs(a @ sol - rhs), initial=0.0))
    phi = np.empty((m, p, p), dtype=complex)
    for c in range(p):
        phi[:, :, c] = sol[c * m:(c + 1) * m]
    return SIESolution(phi, grid, w, cond, resid)


def reconstruct_R(sol: SIESolution, z):
    """R(z) = I + C((Phi + I) w)(z)."""
    p = sol.w.shape[-1]
    dens = (sol.phi + np.eye(p)) @ sol.w
    return np.eye(p) + cauchy_integral(sol.grid, dens, z)


def R_boundary(sol: SIESolution, side: int):
    p = sol.w.shape[-1]
    dens = (sol.phi + np.eye(p)) @ sol.w
    return np.eye(p) + cauchy_boundary(sol.grid, dens, side)


@dataclass
class ResidualReport:
    resolution: int
    residual_jump: float
    residual_sie: float
    condition_number: float

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def roundtrip_check(j: JumpData, grid: NystromGrid) -> ResidualReport:
    """Both directions of the Phi <-> R correspondence, measured off the nodes.

    Phi is interpolated to the doubled grid (whose odd nodes are midpoints
    of the original one) and ``w`` is sampled there exactly.  Then
    R_- - I and R_+ are rebuilt from the Cauchy integral on the fine grid:
    ``residual_sie`` is max |R_- - I - Phi| (the equation re-inserted) and
    ``residual_jump`` is max |R_+ - R_- v|.
    """
    sol = solve_sie(j, grid)
    fine = grid.refined(2)
    p = sol.w.shape[-1]
    phi_f = refine_samples(sol.phi, 2)
    v_f = j.v_at(fine.nodes)
    w_f = v_f - np.eye(p)
    dens = (phi_f + np.eye(p)) @ w_f
    h = hilbert_matrix(fine)
    dm = dens.reshape(fine.resolution, -1)
    c_minus = (0.5 * (h @ dm - dm)).reshape(dens.shape)
    r_minus = np.eye(p) + c_minus
    r_plus = r_minus + dens
    res_sie = float(np.max(np.abs(c_minus - phi_f)[1::2]))
    res_jump = float(np.max(np.abs(r_plus - r_minus @ v_f)[1::2]))
    return ResidualReport(grid.resolution, res_jump, res_sie, sol.condition_number)


def laurent_theta(sol: SIESolution, count: int):
    """theta_i = -(1/2 pi i) int k^(i-1) (Phi + I) w dk, i = 1..count, so that
    R(z) = I + sum theta_i z^-i + O(z^-(count+1))."""
    p = sol.w.shape[-1]
    dens = (sol.phi + np.eye(p)) @ sol.w
    k = sol.grid.nodes
    out = []
    for i in range(1, count + 1):
        wt = sol.grid.dk * k ** (i - 1)
        out.append(-np.tensordot(wt, dens, axes=(0, 0)) / (2j * math.pi))
    return out


# -- norm diagnostics --------------------------------------------------------------


def lp_norm(values, weights, p: float) -> float:
    values = np.abs(np.asarray(values))
    if math.isinf(p):
        return float(values.max(initial=0.0))
    return float(np.sum(weights * values ** p) ** (1.0 / p))


def holder_diagnostics(s_minus, w_s, n_inv, ds, rho_inv, phi_factor, d_factor,
                       exponents, slack: float = 0.01) -> dict:
    """Generalised Hoelder bound for ||S_- w_S N^-1||_L1 on the lens arcs.

    Pointwise, with w_S = rho^-1 phi^-2n E21,
    |S_- w_S N^-1| <= |S_-| |rho^-1| (|phi^-2n| m) |D^sigma3|, where m is the
    norm of the first row of A^-1 D_inf^-sigma3 (``phi_factor`` carries
    |phi^-2n| m).  Integrating with 1/p + 1/theta + 1/tau + 1/omega = 1
    gives the product bound checked here.
    """
    p, vt, tau, om = exponents
    prod = np.einsum("...ij,...jk,...kl->...il", s_minus, w_s, n_inv)
    lhs = float(np.sum(ds * np.linalg.norm(prod, ord=2, axis=(-2, -1))))
    f_s = lp_norm(np.linalg.norm(s_minus, ord=2, axis=(-2, -1)), ds, p)
    f_r = lp_norm(rho_inv, ds, vt)
    f_p = lp_norm(phi_factor, ds, tau)
    f_d = lp_norm(d_factor, ds, om)
    rhs = f_s * f_r * f_p * f_d
    return {"lhs_L1": lhs, "S_Lp": f_s, "rho_inv_Ltheta": f_r, "phi_Ltau": f_p,
            "D_Lomega": f_d, "product": rhs, "holds": bool(lhs <= rhs * (1 + slack))}


def graded_panels(panels: int = 12, order: int = 16, ratio: float = 0.3):
    """Composite Gauss-Legendre nodes on (0, 1) graded geometrically toward
    both endpoints; returns (t, weights)."""
    half = ratio ** np.arange(panels)[::-1]
    edges = np.concatenate([[0.0], 0.5 * half])
    edges = np.concatenate([edges, 1.0 - edges[-2::-1]])
    x, wt = np.polynomial.legendre.leggauss(order)
    lo, hi = edges[:-1, None], edges[1:, None]
    t = (lo + (hi - lo) * (x + 1) / 2).ravel()
    ww = ((hi - lo) / 2 * wt).ravel()
    return t, ww


def lemma_ratio(model, p: float = 2.0, gamma_radius: float = 2.0, points: int = 256,
                delta: float = 1e-3) -> dict:
    """Empirical ratio ||f||_Lp(Gamma) / ||f_+ - f_-||_Lp(Sigma) for f = D - D_inf,
    with Gamma a circle of radius ``gamma_radius`` and Sigma = (-1+delta, 1-delta)."""
    from .szegomodel import szego_D, szego_D_boundary

    grid = circle_grid(points, 0.0, gamma_radius)
    f_gamma = np.asarray(szego_D(model, grid.nodes)) - model.D_inf
    t, wt = graded_panels()
    x = -1 + delta + (2 - 2 * delta) * t
    jump = (np.asarray(szego_D_boundary(model, x, 1))
            - np.asarray(szego_D_boundary(model, x, -1)))
    num = lp_norm(f_gamma, grid.arc_weights, p)
    den = lp_norm(jump, wt * (2 - 2 * delta), p)
    return {"f_Lp_gamma": num, "jump_Lp_sigma": den,
            "ratio": num / den if den > 0 else math.inf}
