"""Cylindrical and spherical Bessel functions, derivatives, Legendre polynomials.

Values come from scipy.special (AMOS / Cephes) wrapped with domain checks.
Derivatives use the two-term recurrences on neighbouring orders. The
spherical modified function of the second kind follows the convention

    k_n(z) = sqrt(2 / (pi z)) K_{n+1/2}(z),

so that i_n'(z) k_n(z) - i_n(z) k_n'(z) = 1/z**2. Note that this differs
from ``scipy.special.spherical_kn`` by a factor 2/pi.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import special as sc

from .errors import DomainError, OverflowError

# Core box where relative accuracy 1e-12 is targeted.
ACCURATE_ARG = (1e-3, 1e3)
ACCURATE_ORDER = 50


class BesselKind(str, Enum):
    J = "J"
    Y = "Y"
    I = "I"  # noqa: E741
    K = "K"
    j = "j"
    y = "y"
    i = "i"
    k = "k"

    @property
    def spherical(self):
        return self.value.islower()

    @property
    def singular_at_zero(self):
        return self.value in "YKyk"


@dataclass(frozen=True)
class EvalRequest:
    kind: BesselKind
    order: float
    argument: float
    derivative: bool = False


@dataclass(frozen=True)
class LegendreRequest:
    degree: int
    argument: float


def _check(kind, order, x):
    kind = BesselKind(kind)
    if kind.spherical or kind.singular_at_zero:
        if order < 0 or float(order) != int(order):
            raise DomainError(f"{kind.value}: order must be a nonnegative integer, got {order}")
    elif order < 0:
        raise DomainError(f"{kind.value}: order must be >= 0, got {order}")
    x = np.asarray(x, dtype=float)
    if np.any(np.isnan(x)):
        raise DomainError("argument is NaN")
    if kind.singular_at_zero:
        if np.any(x <= 0):
            raise DomainError(f"{kind.value}: argument must be > 0")
    elif np.any(x < 0):
        raise DomainError(f"{kind.value}: argument must be >= 0")
    return kind, x


# -- raw evaluators (no checks, vectorised) ---------------------------------

def _cyl(kind, nu, x):
    if kind == "J":
        return sc.jv(nu, x)
    if kind == "Y":
        return sc.yv(nu, x)
    if kind == "I":
        return sc.iv(nu, x)
    return sc.kv(nu, x)


def _cyl_scaled(kind, nu, x):
    if kind == "I":
        return sc.ive(nu, x)
    if kind == "K":
        return sc.kve(nu, x)
    return _cyl(kind, nu, x)


def _cyl_deriv(kind, nu, x, scaled=False):
    f = _cyl_scaled if scaled else _cyl
    if kind in ("J", "Y"):
        return 0.5 * (f(kind, nu - 1, x) - f(kind, nu + 1, x))
    if kind == "I":
        return 0.5 * (f(kind, nu - 1, x) + f(kind, nu + 1, x))
    return -0.5 * (f(kind, nu - 1, x) + f(kind, nu + 1, x))


_SPH_TO_CYL = {"j": "J", "y": "Y", "i": "I", "k": "K"}


def _sph_prefactor(kind, x):
    with np.errstate(divide="ignore"):
        if kind == "k":
            return np.sqrt(2.0 / (np.pi * x))
        return np.sqrt(np.pi / (2.0 * x))


def _sph(kind, n, x, scaled=False):
    x = np.asarray(x, dtype=float)
    cyl = _SPH_TO_CYL[kind]
    f = _cyl_scaled if scaled else _cyl
    with np.errstate(invalid="ignore", divide="ignore"):
        val = _sph_prefactor(kind, x) * f(cyl, n + 0.5, x)
    if kind in ("j", "i"):
        val = np.where(x == 0, 1.0 if n == 0 else 0.0, val)
    return val


def _sph_deriv(kind, n, x, scaled=False):
    x = np.asarray(x, dtype=float)
    if kind == "k":
        f = _cyl_scaled if scaled else _cyl
        pre = _sph_prefactor("k", x)
        nu = n + 0.5
        return pre * (_cyl_deriv("K", nu, x, scaled) - f("K", nu, x) / (2 * x))
    sign = 1.0 if kind == "i" else -1.0
    up = (n + 1) * _sph(kind, n + 1, x, scaled)
    if n == 0:
        return sign * up
    return (n * _sph(kind, n - 1, x, scaled) + sign * up) / (2 * n + 1)


def bessel(kind, order, x, derivative=False):
    """Vectorised Bessel-family evaluation with domain checks.

    Returns a numpy array (0-d for scalar input). Raises ``OverflowError``
    when an I/i/K/k value leaves the double range.
    """
    kind, x = _check(kind, order, x)
    k = kind.value
    if kind.spherical:
        n = int(order)
        val = _sph_deriv(k, n, x) if derivative else _sph(k, n, x)
    else:
        val = _cyl_deriv(k, order, x) if derivative else _cyl(k, order, x)
    if k in "IiKk":
        bad = ~np.isfinite(val) | ((val == 0) & (x > 0) & (k in "Kk"))
        if np.any(bad):
            xs = x[bad] if x.ndim else x
            scaled = bessel_scaled(k, order, xs, derivative)
            sgn = 1.0 if k in "Ii" else -1.0
            with np.errstate(divide="ignore"):
                logv = np.log(np.abs(scaled)) + sgn * xs
            raise OverflowError(
                f"{k}_{order}: value out of double range (log|value| = {np.max(logv):.6g})",
                log_value=logv,
            )
    return val


def bessel_scaled(kind, order, x, derivative=False):
    """Exponentially scaled I, K, i, k: returns f(x) e^{-x} for I/i and f(x) e^{x} for K/k."""
    kind, x = _check(kind, order, x)
    k = kind.value
    if k not in "IKik":
        raise DomainError(f"scaled variant only defined for I, K, i, k (got {k})")
    if kind.spherical:
        n = int(order)
        return _sph_deriv(k, n, x, True) if derivative else _sph(k, n, x, True)
    return _cyl_deriv(k, order, x, True) if derivative else _cyl_scaled(k, order, x)


def in_accuracy_box(order, x):
    """True when (order, x) lies in the region with the 1e-12 accuracy target."""
    lo, hi = ACCURATE_ARG
    return bool(order <= ACCURATE_ORDER and lo <= x <= hi)


def eval_bessel(req: EvalRequest) -> float:
    """Scalar entry point; see :func:`bessel`."""
    return float(bessel(req.kind, req.order, req.argument, req.derivative))


def legendre(n, x):
    """Legendre polynomial P_n(x) by the three-term recurrence."""
    if n < 0 or int(n) != n:
        raise DomainError(f"degree must be a nonnegative integer, got {n}")
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1):
        raise DomainError("Legendre argument must lie in [-1, 1]")
    p0 = np.ones_like(x)
    if n == 0:
        return p0
    p1 = x.copy()
    for m in range(1, int(n)):
        p0, p1 = p1, ((2 * m + 1) * x * p1 - m * p0) / (m + 1)
    # pin the endpoints exactly
    p1 = np.where(x == 1.0, 1.0, p1)
    p1 = np.where(x == -1.0, (-1.0) ** n, p1)
    return p1


def eval_legendre(req: LegendreRequest) -> float:
    return float(legendre(req.degree, req.argument))


# -- helpers used by other modules ------------------------------------------

def pair_for(dim, modified):
    """Kinds of the (regular, singular) radial pair for dimension 2 or 3."""
    if dim == 2:
        return ("I", "K") if modified else ("J", "Y")
    if dim == 3:
        return ("i", "k") if modified else ("j", "y")
    raise DomainError(f"no Bessel pair for dimension {dim}")


def cylinder_second(kind, order, x, f=None, fp=None):
    """Second derivative from the radial Bessel ODE.

    Uses f'' = -(d-1)/x f' - (s - mu/x^2) f with s = +1 for J, Y, j, y and
    s = -1 for I, K, i, k; mu = order^2 (cylindrical) or n(n+1) (spherical).
    """
    kind = BesselKind(kind)
    x = np.asarray(x, dtype=float)
    if f is None:
        f = bessel(kind, order, x)
    if fp is None:
        fp = bessel(kind, order, x, derivative=True)
    s = -1.0 if kind.value in "IKik" else 1.0
    if kind.spherical:
        return -2.0 / x * fp - (s - order * (order + 1) / x**2) * f
    return -fp / x - (s - order**2 / x**2) * f


def cylinder_any(kind, nu, z, derivative=False, scaled=False):
    """J or I of any real order at real or complex argument, no domain checks.

    ``scaled`` applies scipy's jve/ive factors (exp(-|Im z|) for J,
    exp(-|Re z|) for I), which cancel in ratios.
    """
    if kind == "J":
        f = sc.jve if scaled else sc.jv
        if derivative:
            return 0.5 * (f(nu - 1, z) - f(nu + 1, z))
        return f(nu, z)
    if kind == "I":
        f = sc.ive if scaled else sc.iv
        if derivative:
            return 0.5 * (f(nu - 1, z) + f(nu + 1, z))
        return f(nu, z)
    raise DomainError(f"cylinder_any supports J and I only (got {kind})")
