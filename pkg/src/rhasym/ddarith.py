"""Vectorised double-double arithmetic.

A double-double value is a pair ``(hi, lo)`` of float64 arrays with
``|lo| <= ulp(hi)/2``; together they carry roughly 32 significant digits.
Only the handful of kernels needed elsewhere in the package live here:
error-free transforms, compensated dot products (pairwise tree reduction)
and a small complex layer used by the Airy Maclaurin series.
"""
from __future__ import annotations

from decimal import Decimal, getcontext

import numpy as np

_SPLITTER = 134217729.0  # 2**27 + 1


def two_sum(a, b):
    s = a + b
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return s, err


def quick_two_sum(a, b):
    s = a + b
    return s, b - (s - a)


def _split(a):
    t = _SPLITTER * a
    hi = t - (t - a)
    return hi, a - hi


def two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    err = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, err


def dd_add(x, y):
    s, e = two_sum(x[0], y[0])
    e = e + (x[1] + y[1])
    return quick_two_sum(s, e)


def dd_neg(x):
    return -x[0], -x[1]


def dd_mul(x, y):
    p, e = two_prod(x[0], y[0])
    e = e + (x[0] * y[1] + x[1] * y[0])
    return quick_two_sum(p, e)


def dd_div_scalar(x, d):
    """Divide a double-double by an ordinary float ``d``."""
    q1 = x[0] / d
    p1, p2 = two_prod(q1, d)
    s, e = two_sum(x[0], -p1)
    e = e - p2 + x[1]
    q2 = (s + e) / d
    return quick_two_sum(q1, q2)


def dd_sum(hi, lo=None):
    """Sum a 1-d array of doubles (or double-doubles) by pairwise dd addition.

    Returns the pair ``(hi, lo)`` as Python floats.
    """
    hi = np.asarray(hi, dtype=float).ravel()
    lo = np.zeros_like(hi) if lo is None else np.asarray(lo, dtype=float).ravel()
    if hi.size == 0:
        return 0.0, 0.0
    while hi.size > 1:
        if hi.size % 2:
            hi = np.append(hi, 0.0)
            lo = np.append(lo, 0.0)
        hi, lo = dd_add((hi[0::2], lo[0::2]), (hi[1::2], lo[1::2]))
    return float(hi[0]), float(lo[0])


def dd_dot(a, b) -> float:
    """Compensated dot product of two real vectors, rounded to float64."""
    p, e = two_prod(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
    hi, lo = dd_sum(p, e)
    return hi + lo


def dd_from_decimal(text: str):
    """Split a decimal literal into a (hi, lo) pair of floats."""
    getcontext().prec = 60
    d = Decimal(text)
    hi = float(d)
    lo = float(d - Decimal(hi))
    return hi, lo


# -- complex double-double: (re_hi, re_lo, im_hi, im_lo) -----------------

def cdd_from_complex(z):
    z = np.asarray(z, dtype=complex)
    zero = np.zeros(z.shape)
    return (z.real.copy(), zero, z.imag.copy(), zero.copy())


def cdd_add(x, y):
    rh, rl = dd_add((x[0], x[1]), (y[0], y[1]))
    ih, il = dd_add((x[2], x[3]), (y[2], y[3]))
    return rh, rl, ih, il


def cdd_mul(x, y):
    xr, xi = (x[0], x[1]), (x[2], x[3])
    yr, yi = (y[0], y[1]), (y[2], y[3])
    re = dd_add(dd_mul(xr, yr), dd_neg(dd_mul(xi, yi)))
    im = dd_add(dd_mul(xr, yi), dd_mul(xi, yr))
    return re[0], re[1], im[0], im[1]


def cdd_scale(x, c):
    """Multiply a complex double-double by a real double-double constant."""
    re = dd_mul((x[0], x[1]), c)
    im = dd_mul((x[2], x[3]), c)
    return re[0], re[1], im[0], im[1]


def cdd_div_scalar(x, d):
    re = dd_div_scalar((x[0], x[1]), d)
    im = dd_div_scalar((x[2], x[3]), d)
    return re[0], re[1], im[0], im[1]


def cdd_to_complex(x):
    return (x[0] + x[1]) + 1j * (x[2] + x[3])


def cdd_abs_bound(x):
    return np.hypot(x[0], x[2])
