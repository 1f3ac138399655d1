"""Weight functions on (-1, 1) and their continuation into a lens.

Every shipped weight factors as

    rho(x) = c * (1 - x)**(-sigma_plus) * (1 + x)**(-sigma_minus) * exp(g(x))

with ``g`` analytic in the open lens.  The Jacobi-type factor carries the
endpoint growth; the exponents ``nu_plus``/``nu_minus`` describe how fast
``rho`` and ``1/rho`` may blow up at +-1 (``inf`` means bounded).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

INF = math.inf

FAMILIES = ("legendre", "chebyshev-first-kind", "endpoint-power", "lens-analytic-custom")


class DomainError(ValueError):
    """Evaluation point outside the domain of a weight or function."""


class ExponentInconsistency(ValueError):
    """Measured endpoint growth exceeds the declared exponent."""


class SzegoDivergence(ArithmeticError):
    """The Szego integral diverges (or falls below the configured floor)."""


@dataclass(frozen=True)
class Lens:
    """Region bounded by two circular arcs through -1 and 1.

    The upper arc is part of the circle centred at ``-i*c`` with radius
    ``R``; the lower arc is its mirror image.  ``half_height`` is the apex
    height at x = 0 and must lie in (0, 1].
    """

    half_height: float = 0.6

    def __post_init__(self):
        if not 0.0 < self.half_height <= 1.0:
            raise ValueError("lens half height must lie in (0, 1]")

    @property
    def offset(self) -> float:
        h = self.half_height
        return (1.0 - h * h) / (2.0 * h)

    @property
    def radius(self) -> float:
        h = self.half_height
        return (1.0 + h * h) / (2.0 * h)

    def contains(self, z):
        z = np.asarray(z, dtype=complex)
        c, r = self.offset, self.radius
        return (np.abs(z + 1j * c) < r) & (np.abs(z - 1j * c) < r)

    def arc(self, t, upper: bool = True):
        """Points on the upper (lower) arc, ``t`` in [0, 1] running from -1 to 1."""
        t = np.asarray(t, dtype=float)
        c, r = self.offset, self.radius
        psi0 = math.atan2(c, 1.0)
        psi = (math.pi - psi0) + t * (2.0 * psi0 - math.pi)
        pts = -1j * c + r * np.exp(1j * psi)
        return pts if upper else np.conj(pts)

    def arc_speed(self) -> float:
        """|dz/dt| of :meth:`arc` (constant for a circular arc)."""
        c, r = self.offset, self.radius
        return r * (math.pi - 2.0 * math.atan2(c, 1.0))

    def distance_to_arcs(self, z):
        z = np.asarray(z, dtype=complex)
        c, r = self.offset, self.radius
        out = np.full(z.shape, np.inf)
        for centre, sign in ((-1j * c, 1.0), (1j * c, -1.0)):
            rel = z - centre
            ang = np.angle(rel if sign > 0 else np.conj(rel))
            psi0 = math.atan2(c, 1.0)
            on_arc = (ang >= psi0) & (ang <= math.pi - psi0)
            d_circle = np.abs(np.abs(rel) - r)
            d_end = np.minimum(np.abs(z - 1), np.abs(z + 1))
            out = np.minimum(out, np.where(on_arc, d_circle, d_end))
        return out


# -- named lens-analytic factors --------------------------------------------
#
# Each entry maps a formula name to (log_h, log_szego, nu_plus, nu_minus,
# even).  ``log_h(x, omx, opx, kappa)`` evaluates g on real or complex
# arguments with omx = 1 - x, opx = 1 + x supplied separately so endpoint
# gaps keep full relative precision.  ``log_szego(w, kappa)`` returns the
# logarithm of the Szego function of exp(g) in the variable w = 1/phi(z),
# or None when the generic cosine-series route should be used.

def _log_h_exp_sqrt(x, omx, opx, kappa):
    return kappa * np.sqrt(omx) * np.sqrt(opx)


def _log_szego_exp_sqrt(w, kappa):
    w = np.asarray(w, dtype=complex)
    small = np.abs(w) < 1e-8
    ws = np.where(small, 0.5, w)
    ratio = np.where(small, 1.0 + w * w / 3.0, np.arctanh(ws) / ws)
    return kappa * (1.0 - w * w) * ratio / math.pi


def _log_h_exp_linear(x, omx, opx, kappa):
    return kappa * x


_FORMULAS = {
    # exp(kappa*sqrt(1-x^2)): analytic in the lens, bounded with bounded
    # inverse, but not analytic in any disc around +-1.
    "exp_sqrt": (_log_h_exp_sqrt, _log_szego_exp_sqrt, INF, INF, True),
    # exp(kappa*x): entire; exercises the generic cosine-series Szego route
    # and a non-even weight.
    "exp_linear": (_log_h_exp_linear, None, INF, INF, False),
}


def _declared_nus(sigma_plus: float, sigma_minus: float):
    grow = max(sigma_plus, sigma_minus, 0.0)
    decay = max(-sigma_plus, -sigma_minus, 0.0)
    nu_p = INF if grow == 0 else 1.0 / grow
    nu_m = INF if decay == 0 else 1.0 / decay
    return nu_p, nu_m


@dataclass(frozen=True)
class WeightSpec:
    family: str
    nu_plus: float
    nu_minus: float
    sigma_plus: float = 0.0
    sigma_minus: float = 0.0
    formula: Optional[str] = None
    kappa: float = 0.0
    scale: float = 1.0
    lens_half_height: float = 0.6
    log_h: Optional[Callable] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown weight family {self.family!r}")
        if not (self.nu_plus > 1 and self.nu_minus > 1):
            raise ValueError("growth exponents nu_plus, nu_minus must exceed 1")
        if not (self.sigma_plus < 1 and self.sigma_minus < 1):
            raise ValueError("endpoint exponents must be < 1 for integrability")
        if self.scale <= 0:
            raise ValueError("scale must be positive")
        if self.family == "lens-analytic-custom" and self.formula not in _FORMULAS \
                and self.log_h is None:
            raise ValueError(f"unknown lens-analytic formula {self.formula!r}")
        Lens(self.lens_half_height)

    # -- constructors ------------------------------------------------------
    @classmethod
    def legendre(cls, **kw) -> "WeightSpec":
        return cls("legendre", INF, INF, **kw)

    @classmethod
    def chebyshev(cls, **kw) -> "WeightSpec":
        return cls("chebyshev-first-kind", 2.0, INF, sigma_plus=0.5, sigma_minus=0.5, **kw)

    @classmethod
    def endpoint_power(cls, sigma_plus: float, sigma_minus: float = 0.0, **kw) -> "WeightSpec":
        nu_p, nu_m = _declared_nus(sigma_plus, sigma_minus)
        return cls("endpoint-power", kw.pop("nu_plus", nu_p), kw.pop("nu_minus", nu_m),
                   sigma_plus=sigma_plus, sigma_minus=sigma_minus, **kw)

    @classmethod
    def custom(cls, formula: str, kappa: float = 1.0, sigma_plus: float = 0.0,
               sigma_minus: float = 0.0, log_h: Optional[Callable] = None,
               **kw) -> "WeightSpec":
        """Lens-analytic weight ``|1-x|^-s+ |1+x|^-s- exp(g(x))``.

        ``formula`` selects a registered ``g``; pass ``log_h`` (a function of
        ``(x, omx, opx, kappa)``) together with an unregistered name to use
        an ad-hoc factor, in which case the Szego function is computed from
        the cosine series of ``g``.
        """
        if formula in _FORMULAS:
            _, _, nu_p, nu_m, _ = _FORMULAS[formula]
        else:
            nu_p, nu_m = INF, INF
        jp, jm = _declared_nus(sigma_plus, sigma_minus)
        nu_p, nu_m = min(nu_p, jp), min(nu_m, jm)
        return cls("lens-analytic-custom", kw.pop("nu_plus", nu_p), kw.pop("nu_minus", nu_m),
                   sigma_plus=sigma_plus, sigma_minus=sigma_minus, formula=formula,
                   kappa=kappa, log_h=log_h, **kw)

    @classmethod
    def from_record(cls, rec: dict) -> "WeightSpec":
        """Build from a plain config record such as ``{"family": "endpoint-power",
        "sigma_plus": 0.1, "nu_plus": 10}``; ``"inf"`` strings are accepted."""
        rec = dict(rec)
        family = rec.pop("family")
        for key in ("nu_plus", "nu_minus"):
            if key in rec:
                rec[key] = float(rec[key])
        if family in ("legendre", "chebyshev-first-kind"):
            for key in ("nu_plus", "nu_minus", "sigma_plus", "sigma_minus"):
                rec.pop(key, None)
            return cls.legendre(**rec) if family == "legendre" else cls.chebyshev(**rec)
        if family == "endpoint-power":
            return cls.endpoint_power(rec.pop("sigma_plus", 0.0), rec.pop("sigma_minus", 0.0), **rec)
        if family == "lens-analytic-custom":
            return cls.custom(rec.pop("formula"), **rec)
        raise ValueError(f"unknown weight family {family!r}")

    def to_record(self) -> dict:
        rec = {"family": self.family, "nu_plus": _fmt_ext(self.nu_plus),
               "nu_minus": _fmt_ext(self.nu_minus), "lens_half_height": self.lens_half_height}
        if self.family in ("endpoint-power", "lens-analytic-custom"):
            rec.update(sigma_plus=self.sigma_plus, sigma_minus=self.sigma_minus)
        if self.family == "lens-analytic-custom":
            rec.update(formula=self.formula, kappa=self.kappa)
        if self.scale != 1.0:
            rec["scale"] = self.scale
        return rec

    def scaled(self, c: float) -> "WeightSpec":
        return replace(self, scale=self.scale * c)

    # -- structure ---------------------------------------------------------
    @property
    def name(self) -> str:
        if self.family == "endpoint-power":
            return f"endpoint-power(s+={self.sigma_plus:g},s-={self.sigma_minus:g})"
        if self.family == "lens-analytic-custom":
            return f"{self.formula}(kappa={self.kappa:g})"
        return self.family

    @property
    def lens(self) -> Lens:
        return Lens(self.lens_half_height)

    @property
    def jacobi_exponents(self):
        """Exponents (a, b) of (1-x)^a (1+x)^b."""
        return -self.sigma_plus, -self.sigma_minus

    @property
    def nu0(self) -> float:
        return min(self.nu_plus, self.nu_minus)

    @property
    def is_even(self) -> bool:
        if self.sigma_plus != self.sigma_minus:
            return False
        if self.family == "lens-analytic-custom":
            return self.log_h is None and _FORMULAS[self.formula][4]
        return True

    def _log_h(self):
        if self.family != "lens-analytic-custom":
            return None
        if self.log_h is not None:
            return self.log_h
        return _FORMULAS[self.formula][0]

    def log_szego_smooth(self):
        """Closed-form log-Szego function of exp(g) in w = 1/phi, or None."""
        if self.family != "lens-analytic-custom" or self.log_h is not None:
            return None
        return _FORMULAS[self.formula][1]

    def log_smooth(self, x, omx, opx):
        """log of the non-Jacobi factor, log c + g(x)."""
        out = math.log(self.scale) + np.zeros(np.shape(x), dtype=np.result_type(x, omx, float))
        g = self._log_h()
        if g is not None:
            out = out + g(x, omx, opx, self.kappa)
        return out

    def log_rho_parts(self, x, omx, opx):
        """log rho from x and the endpoint gaps (principal branches)."""
        a, b = self.jacobi_exponents
        out = self.log_smooth(x, omx, opx)
        if a != 0.0:
            out = out + a * np.log(omx)
        if b != 0.0:
            out = out + b * np.log(opx)
        return out

    def log_rho_theta(self, theta):
        """log rho(cos theta) for theta in (0, pi), endpoint-accurate."""
        theta = np.asarray(theta, dtype=float)
        s, c = np.sin(theta / 2.0), np.cos(theta / 2.0)
        return self.log_rho_parts(np.cos(theta), 2.0 * s * s, 2.0 * c * c)


def _fmt_ext(v: float):
    return "inf" if math.isinf(v) else v


# -- operations --------------------------------------------------------------

def eval_weight(w: WeightSpec, x):
    """rho(x) for real x strictly inside (-1, 1)."""
    x = np.asarray(x, dtype=float)
    if np.any(~((x > -1.0) & (x < 1.0))):
        raise DomainError("weight evaluated outside (-1, 1)")
    val = np.exp(w.log_rho_parts(x, 1.0 - x, 1.0 + x))
    return val if val.ndim else float(val)


def eval_weight_complex(w: WeightSpec, z, check: bool = True):
    """Analytic continuation of rho into the open lens."""
    z = np.asarray(z, dtype=complex)
    if check and np.any(~w.lens.contains(z)):
        raise DomainError("point outside the lens of analyticity")
    val = np.exp(w.log_rho_parts(z, 1.0 - z, 1.0 + z))
    return val if val.ndim else complex(val)


def kress_nodes(n: int, order: int = 6):
    """Midpoint nodes and weights on (0, 1) after a sigmoidal change of variable.

    The map s -> s^m / (s^m + (1-s)^m) flattens algebraic and logarithmic
    endpoint singularities so the midpoint rule converges at high order.
    """
    s = (np.arange(n) + 0.5) / n
    m = order
    num, den = s ** m, s ** m + (1 - s) ** m
    t = num / den
    dt = m * s ** (m - 1) * (1 - s) ** (m - 1) / den ** 2
    return t, dt / n


def szego_condition_integral(w: WeightSpec, quad_points: int = 256, floor: float = -1e8) -> float:
    """Integral of log rho(x)/sqrt(1-x^2) over (-1, 1), via x = cos(theta)."""
    if quad_points < 16:
        raise ValueError("need at least 16 quadrature points")
    t, wt = kress_nodes(quad_points)
    theta = math.pi * t
    vals = w.log_rho_theta(theta)
    total = float(math.pi * np.sum(np.real(vals) * wt))
    if not math.isfinite(total) or total < floor:
        raise SzegoDivergence(f"Szego integral diverges (value {total})")
    return total


def _probe_ray(w: WeightSpec, side: int, radii):
    psi = math.atan(w.lens_half_height)
    if side == 1:
        return 1.0 + radii * np.exp(1j * (math.pi - psi))
    return -1.0 + radii * np.exp(1j * psi)


def endpoint_growth_probe(w: WeightSpec, side: int, radii=None, tol: float = 0.05):
    """Fitted growth exponents of |rho| and |1/rho| approaching ``side`` (+1/-1).

    Returns ``(g_plus, g_minus)``: proxies for 1/nu_plus and 1/nu_minus (zero
    for bounded behaviour).  Raises :class:`ExponentInconsistency` when either
    exceeds the declared value by more than ``tol``.
    """
    if side not in (1, -1):
        raise ValueError("side must be +1 or -1")
    radii = np.logspace(-2, -8, 13) if radii is None else np.asarray(radii, dtype=float)
    if radii.size < 4:
        raise ValueError("need at least 4 radii")
    z = _probe_ray(w, side, radii)
    if not np.all(w.lens.contains(z)):
        raise DomainError("probe radii leave the lens")
    logabs = np.real(w.log_rho_parts(z, 1.0 - z, 1.0 + z))
    slope = np.polyfit(np.log(radii), logabs, 1)[0]
    g_plus, g_minus = max(-slope, 0.0), max(slope, 0.0)
    for measured, nu, label in ((g_plus, w.nu_plus, "rho"), (g_minus, w.nu_minus, "1/rho")):
        if measured > 1.0 / nu + tol:
            raise ExponentInconsistency(
                f"{w.name}: |{label}| grows like |z-({side})|^-{measured:.3f}, "
                f"declared exponent allows {1.0 / nu:.3f}")
    return float(g_plus), float(g_minus)


def shipped_weights():
    """The weight families exercised by the test and acceptance suites."""
    return [
        WeightSpec.legendre(),
        WeightSpec.chebyshev(),
        WeightSpec.endpoint_power(0.1),
        WeightSpec.custom("exp_sqrt", 1.0),
        WeightSpec.custom("exp_linear", 0.5),
    ]
