"""Branch conventions for the elementary functions cut along [-1, 1].

Every fractional power is built from principal roots of ``z - 1`` and
``z + 1`` separately, so each product is analytic off [-1, 1] and behaves
like the obvious power of ``z`` at infinity.

=====================  ==============================  =========================
function               definition                      boundary value at x (+/-)
=====================  ==============================  =========================
``sqrt_z2m1``          (z-1)^(1/2) (z+1)^(1/2)         +/- i sqrt(1-x^2)
``phi``                z + sqrt_z2m1(z)                x +/- i sqrt(1-x^2)
``sqrt_phi``           ((z+1)^(1/2)+(z-1)^(1/2))/sqrt2 (sqrt(1+x) +/- i sqrt(1-x))/sqrt2
``quarter_z2m1``       (z-1)^(1/4) (z+1)^(1/4)         e^(+/- i pi/4) (1-x^2)^(1/4)
``a_factor``           ((z-1)/(z+1))^(1/4), principal  e^(+/- i pi/4) ((1-x)/(1+x))^(1/4)
=====================  ==============================  =========================

The + side is the upper half plane (the segment is oriented left to right).
Boundary values are evaluated from the formulas in the last column instead
of relying on signed zeros.
"""
from __future__ import annotations

import numpy as np

_SQRT2 = np.sqrt(2.0)


class BranchError(ValueError):
    """Evaluation on the branch cut [-1, 1]; use the boundary-value routine."""


def _off_cut(z):
    z = np.asarray(z, dtype=complex)
    if np.any((z.imag == 0) & (np.abs(z.real) <= 1.0)):
        raise BranchError("point lies on the cut [-1, 1]")
    return z


def _ret(v):
    return v if np.ndim(v) else complex(v)


def _side(side) -> float:
    if side in (1, "+", "plus"):
        return 1.0
    if side in (-1, "-", "minus"):
        return -1.0
    raise ValueError("side must be +1 or -1")


def _interior(x):
    x = np.asarray(x, dtype=float)
    if np.any(~((x > -1.0) & (x < 1.0))):
        raise BranchError("boundary values need x in (-1, 1)")
    return x


def sqrt_z2m1(z):
    z = _off_cut(z)
    return _ret(np.sqrt(z - 1) * np.sqrt(z + 1))


def phi(z):
    z = _off_cut(z)
    return _ret(z + np.sqrt(z - 1) * np.sqrt(z + 1))


def inv_phi(z):
    """1/phi(z) without cancellation."""
    return _ret(1.0 / np.asarray(phi(z)))


def sqrt_phi(z):
    z = _off_cut(z)
    return _ret((np.sqrt(z + 1) + np.sqrt(z - 1)) / _SQRT2)


def quarter_z2m1(z):
    z = _off_cut(z)
    return _ret((z - 1) ** 0.25 * (z + 1) ** 0.25)


def a_factor(z):
    z = _off_cut(z)
    return _ret(((z - 1) / (z + 1)) ** 0.25)


def phi_boundary(x, side):
    x, s = _interior(x), _side(side)
    return _ret(x + 1j * s * np.sqrt(1 - x) * np.sqrt(1 + x))


def sqrt_phi_boundary(x, side):
    x, s = _interior(x), _side(side)
    return _ret((np.sqrt(1 + x) + 1j * s * np.sqrt(1 - x)) / _SQRT2)


def quarter_z2m1_boundary(x, side):
    x, s = _interior(x), _side(side)
    return _ret(np.exp(1j * s * np.pi / 4) * ((1 - x) * (1 + x)) ** 0.25)


def a_factor_boundary(x, side):
    x, s = _interior(x), _side(side)
    return _ret(np.exp(1j * s * np.pi / 4) * ((1 - x) / (1 + x)) ** 0.25)
