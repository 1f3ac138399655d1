"""Szego function and the outer model matrix N.

The Szego function is handled in the variable ``w = 1/phi(z)``, which maps
the exterior of [-1, 1] onto the punctured unit disc and both banks of the
cut onto the unit circle (``w = x -/+ i sqrt(1-x^2)`` for the +/- side).
There ``log D = H(w)/2`` with ``H`` analytic in the disc and
``Re H = log rho(cos theta)`` on the circle:

* Jacobi factors: ``(1-x)^a`` contributes ``a (2 log(1-w) - log 2)``,
  ``(1+x)^b`` contributes ``b (2 log(1+w) - log 2)``;
* the constant ``c`` contributes ``log c``;
* the smooth part ``g`` contributes either a registered closed form or the
  power series whose coefficients are the cosine coefficients of
  ``g(cos theta)``.

An independent route (the defining Cauchy-type integral, evaluated with a
sigmoidally graded midpoint rule in theta) is kept for cross-checks.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.fft import dct

from .branches import (BranchError, a_factor, a_factor_boundary, phi, phi_boundary,
                       quarter_z2m1, quarter_z2m1_boundary, sqrt_phi, sqrt_phi_boundary,
                       sqrt_z2m1)
from .weights import WeightSpec, kress_nodes, szego_condition_integral

__all__ = [
    "BranchError", "ModelSolution", "build_model", "phi", "phi_boundary", "a_factor",
    "a_factor_boundary", "sqrt_phi", "sqrt_phi_boundary", "quarter_z2m1",
    "quarter_z2m1_boundary", "sqrt_z2m1", "szego_D", "szego_D_boundary",
    "szego_D_quadrature", "model_N", "model_N_boundary", "cosine_coefficients",
]


def cosine_coefficients(f, count: int = 256, tol: float = 1e-15):
    """Coefficients A_k with f(cos t) = sum_k A_k cos(k t), via a type-I DCT.

    ``count`` is doubled until the tail falls below ``tol`` relative to the
    largest coefficient (at most 2**15 points).
    """
    k = count
    while True:
        theta = math.pi * np.arange(k + 1) / k
        y = dct(np.asarray(f(theta), dtype=float), type=1) / k
        y[0] *= 0.5
        y[-1] *= 0.5
        scale = max(np.max(np.abs(y)), 1e-300)
        if np.max(np.abs(y[-8:])) <= tol * scale or k >= 2 ** 15:
            cut = np.nonzero(np.abs(y) > tol * scale * 1e-2)[0]
            return y[: (cut[-1] + 1 if cut.size else 1)]
        k *= 2


@dataclass(frozen=True, eq=False)
class ModelSolution:
    weight: WeightSpec
    D_inf: float
    quad_points: int = 512
    series: np.ndarray | None = field(default=None, repr=False)

    @property
    def log_D_inf(self) -> float:
        return math.log(self.D_inf)

    def log_D_w(self, w):
        """log D as a function of w = 1/phi (|w| <= 1, w != +-1)."""
        w = np.asarray(w, dtype=complex)
        wt = self.weight
        a, b = wt.jacobi_exponents
        half_log2 = 0.5 * math.log(2.0)
        out = 0.5 * math.log(wt.scale) + np.zeros_like(w)
        if a != 0.0:
            out = out + a * (np.log1p(-w) - half_log2)
        if b != 0.0:
            out = out + b * (np.log1p(w) - half_log2)
        closed = wt.log_szego_smooth()
        if closed is not None:
            out = out + closed(w, wt.kappa)
        elif self.series is not None:
            out = out + 0.5 * np.polynomial.polynomial.polyval(w, self.series)
        return out


def build_model(w: WeightSpec, quad_points: int = 512) -> ModelSolution:
    """Model stack for ``w``; D_inf comes from the Szego integral."""
    d_inf = math.exp(szego_condition_integral(w, quad_points) / (2 * math.pi))
    series = None
    if w.family == "lens-analytic-custom" and w.log_szego_smooth() is None:
        g = w._log_h()

        def gtheta(theta):
            s, c = np.sin(theta / 2), np.cos(theta / 2)
            return np.real(g(np.cos(theta), 2 * s * s, 2 * c * c, w.kappa))

        series = cosine_coefficients(gtheta)
    return ModelSolution(w, d_inf, quad_points, series)


def _ret(v):
    return v if np.ndim(v) else complex(v)


def szego_D(m: ModelSolution, z):
    """Szego function D(z) off [-1, 1]."""
    winv = 1.0 / np.asarray(phi(z))
    return _ret(np.exp(m.log_D_w(winv)))


def szego_D_boundary(m: ModelSolution, x, side):
    """Boundary value D_+(x) (side=+1) or D_-(x) (side=-1) on (-1, 1)."""
    winv = 1.0 / np.asarray(phi_boundary(x, side))
    return _ret(np.exp(m.log_D_w(winv)))


def szego_D_quadrature(m: ModelSolution, z, points: int | None = None):
    """D(z) from the defining integral, evaluated in theta (independent check).

    log D(z) = sqrt(z^2-1)/(2 pi) int_0^pi log rho(cos t)/(z - cos t) dt.
    """
    z = np.asarray(z, dtype=complex)
    t, wt = kress_nodes(points or 4 * m.quad_points)
    theta = math.pi * t
    lr = np.real(m.weight.log_rho_theta(theta))
    zz = z.reshape(-1, 1)
    integral = (lr * wt * math.pi / (zz - np.cos(theta))).sum(axis=1)
    val = np.exp(np.asarray(sqrt_z2m1(zz[:, 0])) * integral / (2 * math.pi))
    return val.reshape(z.shape) if z.ndim else complex(val[0])


def _assemble_N(m: ModelSolution, a, d):
    ai = 1.0 / a
    a11 = 0.5 * (a + ai)
    a12 = (a - ai) / 2j
    a21 = -a12
    di = m.D_inf
    row1 = np.stack([di * a11 / d, di * a12 * d], -1)
    row2 = np.stack([a21 / (di * d), a11 * d / di], -1)
    return np.stack([row1, row2], -2)


def model_N(m: ModelSolution, z):
    """N(z) = D_inf^sigma3 A(z) D(z)^-sigma3 with A built from a(z)."""
    z = np.asarray(z, dtype=complex)
    return _assemble_N(m, np.asarray(a_factor(z)), np.asarray(szego_D(m, z)))


def model_N_boundary(m: ModelSolution, x, side):
    return _assemble_N(m, np.asarray(a_factor_boundary(x, side)),
                       np.asarray(szego_D_boundary(m, x, side)))


def model_growth(m: ModelSolution, side: int, radii=None):
    """Fitted exponent of max-entry |N| approaching ``side`` (+1/-1) along a
    ray inside the lens.  Reported only; nothing is asserted."""
    radii = np.logspace(-2, -6, 9) if radii is None else np.asarray(radii, dtype=float)
    psi = math.atan(m.weight.lens_half_height)
    z = side + radii * np.exp(1j * (math.pi - psi if side == 1 else psi))
    nrm = np.abs(model_N(m, z)).max(axis=(-1, -2))
    return float(np.polyfit(np.log(radii), np.log(nrm), 1)[0])
