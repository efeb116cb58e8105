"""Closed-form spectral sums over the zeros of radial characteristic functions.

The central object is the fixed-mode sum

    eta_n(z) = sum_k 1 / (z^2 - alpha_k^2)        (trigonometric branch)
    sum_k 1 / (z^2 + alpha_k^2)                    (hyperbolic branch)

over the positive zeros alpha_k of g_n(z) = z U'(z) + h U(z), where
U(z) = z^{1-d/2} J_{n+d/2-1}(z) is the regular radial solution in dimension d.
Writing nu = n + d/2 - 1 and h_eff = h + 1 - d/2, one has
g = z^{1-d/2} G with G = z J_nu' + h_eff J_nu, and the Mittag-Leffler
expansion of g'/g gives eta in closed form. The zero of g at the origin has
order n, or 2 for the Neumann n = 0 case (zero mode); it is removed exactly.

Derivatives in s = z^2, power sums of 1/alpha^2, and Taylor data of heat
traces come from Cauchy integrals of these closed forms on circles that
stay half-way to the nearest pole.

:func:`named_formula` pairs every registered identity with the series that
it sums, for verification by :mod:`specsum.oracle`.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import special as sc

from . import specfun
from .errors import (CoincidenceError, DegenerateError, DomainError, PoleError,
                     UnsupportedError, ValidityError)
from .oracle import SeriesSpec
from .zeros import Characteristic, zero_table

INF = math.inf
BRANCHES = ("hyperbolic", "trigonometric")
POLE_GUARD = 1e-6  # relative to the local zero spacing
_CAUCHY_POINTS = 64
_SMALL_Z = 0.05  # below this fraction of the first zero eta uses its Taylor series
_SMALL_Z_ORDER = 8


# -- queries -----------------------------------------------------------------

@dataclass(frozen=True)
class EtaQuery:
    n: int
    d: int
    h: float
    z: float
    branch: str = "trigonometric"


@dataclass(frozen=True)
class DerivativeOrder:
    sigma: int

    def __post_init__(self):
        if self.sigma < 0 or int(self.sigma) != self.sigma:
            raise DomainError("derivative order must be a nonnegative integer")


def _check_mode(n, d, h):
    if d not in (1, 2, 3):
        raise DomainError(f"dimension must be 1, 2 or 3, got {d}")
    if n < 0 or int(n) != n:
        raise DomainError(f"n must be a nonnegative integer, got {n}")
    if d == 1 and n > 1:
        raise DomainError("in one dimension only n = 0 (even) and n = 1 (odd) modes exist")
    if not h >= 0:
        raise DomainError(f"h must lie in [0, inf], got {h}")


def characteristic_for(n, d, h):
    """Characteristic whose positive zeros are those of g_n in dimension d.

    For d = 1 the mode index selects the parity on the symmetric interval,
    which maps to the unit interval with a Neumann (n = 0) or Dirichlet
    (n = 1) condition at the origin.
    """
    _check_mode(n, d, h)
    if d == 1:
        return Characteristic("interval1D", h_inner=0.0 if n == 0 else INF, h_outer=h)
    return Characteristic("disk2D" if d == 2 else "ball3D", n=int(n), h_outer=h)


def _origin_order(n, h):
    """Order of the zero of g_n at the origin."""
    return 2 if (n == 0 and h == 0) else n


# -- closed forms ------------------------------------------------------------

def _eta_closed(n, d, h, z, branch):
    """g'/(2 z g) - m/(2 z^2) with scaled Bessel values; z may be complex."""
    z = np.asarray(z)
    nu = n + d / 2.0 - 1.0
    kind = "J" if branch == "trigonometric" else "I"
    f = specfun.cylinder_any(kind, nu, z, scaled=True)
    fp = specfun.cylinder_any(kind, nu, z, derivative=True, scaled=True)
    if math.isinf(h):
        logd = fp / f
    else:
        he = h + 1.0 - d / 2.0
        G = z * fp + he * f
        if kind == "J":
            Gp = he * fp - (z - nu**2 / z) * f
        else:
            Gp = he * fp + (z + nu**2 / z) * f
        logd = Gp / G
    m = _origin_order(n, h)
    return ((1.0 - d / 2.0) / z + logd) / (2.0 * z) - m / (2.0 * z**2)


def _psi(n, d, z):
    """psi_{n,d}(z) = J_{nu}(z) / (z J_{nu-1}(z)) with nu = n + d/2 - 1.

    It obeys psi_{n+1} = (2n + d - 2)/z^2 - 1/(z^2 psi_n); the upward
    recurrence is used while n < z, where it is stable, and the ratio is
    evaluated directly beyond (J is the minimal solution there).
    """
    nu1 = d / 2.0
    psi = sc.jv(nu1, z) / (z * sc.jv(nu1 - 1, z))
    m = 1
    while m < n and m < z:
        psi = (2 * m + d - 2) / z**2 - 1.0 / (z**2 * psi)
        m += 1
    if m < n:
        nu = n + d / 2.0 - 1.0
        psi = sc.jv(nu, z) / (z * sc.jv(nu - 1, z))
    return psi


def eta_psi(n, d, h, z):
    """Trigonometric eta_n for n >= 1 from the rational form in psi_{n,d}."""
    _check_mode(n, d, h)
    if n < 1:
        raise DomainError("the psi form holds for n >= 1")
    z = float(z)
    psi = _psi(n, d, z)
    if math.isinf(h):
        # Dirichlet limit of the ratio
        return float((1.0 - (2 * n + d - 2) * psi) / (2.0 * z**2 * psi))
    c = h - n - d + 2
    return float((c - (z**2 + (2 * n + d - 2) * c) * psi) / (2.0 * z**2 * (1.0 + c * psi)))


def _zeros_up_to(char, x, extra=3):
    """Positive zeros of ``char`` up to somewhat beyond x."""
    count = max(4, int(x / char.spacing) + 4 + extra + (char.n or 0))
    while True:
        al = zero_table(char, count).alphas
        if al[-1] > x + char.spacing:
            return al
        count *= 2


def pole_guard(char, z):
    """Raise PoleError when the real z lies within the guard of a zero."""
    al = _zeros_up_to(char, abs(z))
    i = int(np.argmin(np.abs(al - abs(z))))
    gap = abs(al[i] - abs(z))
    spacing = al[i] - al[i - 1] if i > 0 else al[1] - al[0]
    if gap <= POLE_GUARD * spacing:
        raise PoleError(f"z = {z} lies within {gap:.3g} of the zero alpha = {al[i]!r}")
    return gap


def eta(q: EtaQuery, include_zero_mode=False):
    """Sum over the positive zeros of 1/(z^2 - alpha^2) (trigonometric branch)
    or 1/(z^2 + alpha^2) (hyperbolic branch).

    With ``include_zero_mode`` the Neumann n = 0 zero mode alpha = 0 adds
    1/z^2, which is the convention of the disk and ball tables.
    """
    _check_mode(q.n, q.d, q.h)
    if q.branch not in BRANCHES:
        raise DomainError(f"branch must be one of {BRANCHES}")
    z = float(q.z)
    if z == 0:
        raise DegenerateError("eta is singular in form at z = 0; use power_sums for the limit")
    char = characteristic_for(q.n, q.d, q.h)
    if q.branch == "trigonometric":
        pole_guard(char, z)
    a1 = zero_table(char, 1).alphas[0]
    if abs(z) < _SMALL_Z * a1:
        # the closed form cancels like eps/z^2 here; sum the Taylor series in s = z^2
        sgn = 1.0 if q.branch == "trigonometric" else -1.0
        a = _phi_taylor(q.n, q.d, q.h, 0.0, _SMALL_Z_ORDER)
        val = sgn * float(np.polyval(a[::-1], sgn * z * z))
    else:
        val = float(_eta_closed(q.n, q.d, q.h, abs(z), q.branch))
    if include_zero_mode and q.n == 0 and q.h == 0:
        val += 1.0 / z**2
    return val


# -- Taylor data in s = z^2 -----------------------------------------------------

def taylor_coefficients(f, s0, radius, order, points=_CAUCHY_POINTS):
    """Taylor coefficients a_0..a_order of an analytic f at s0 by the trapezoidal
    Cauchy integral on |s - s0| = radius. ``f`` takes a complex array."""
    theta = 2 * np.pi * (np.arange(points) + 0.5) / points
    w = np.exp(1j * theta)
    vals = f(s0 + radius * w)
    out = []
    for j in range(order + 1):
        out.append(np.mean(vals * w ** (-j)).real / radius**j)
    return np.array(out)


def _phi(n, d, h):
    """s -> sum_k 1/(s - alpha_k^2) over positive zeros, for complex s."""
    def f(s):
        return _eta_closed(n, d, h, np.sqrt(s.astype(complex)), "trigonometric")
    return f


def _pole_distance(char, s0):
    """Distance in the s-plane from real s0 to the nearest alpha_k^2."""
    if s0 <= 0:
        a1 = zero_table(char, 1).alphas[0]
        return a1**2 - s0
    al = _zeros_up_to(char, math.sqrt(s0))
    return float(np.min(np.abs(al**2 - s0)))


def _phi_taylor(n, d, h, s0, order):
    char = characteristic_for(n, d, h)
    if s0 > 0:
        pole_guard(char, math.sqrt(s0))
    dist = _pole_distance(char, s0)
    return taylor_coefficients(_phi(n, d, h), s0, 0.5 * dist, order)


def eta_derivative(n, d, h, s, order, include_zero_mode=False):
    """sum_k 1/(s - alpha_k^2)^(sigma+1) over the positive zeros.

    Uses the Taylor coefficient a_sigma of s -> eta_n(sqrt(s)) at s, since the
    sum equals (-1)^sigma a_sigma.
    """
    sigma = order.sigma if isinstance(order, DerivativeOrder) else int(DerivativeOrder(order).sigma)
    _check_mode(n, d, h)
    s = float(s)
    zm = include_zero_mode and n == 0 and h == 0
    if zm and s == 0:
        raise PoleError("the zero mode makes the sum singular at s = 0")
    if sigma == 0 and s != 0:
        branch = "trigonometric" if s > 0 else "hyperbolic"
        z = math.sqrt(abs(s))
        val = eta(EtaQuery(n, d, h, z, branch))
        val = val if s > 0 else -val
    else:
        a = _phi_taylor(n, d, h, s, sigma)
        val = (-1) ** sigma * a[sigma]
    if zm:
        val += 1.0 / s ** (sigma + 1)
    return float(val)


def power_sums(n, d, h, m_max):
    """[sum_k alpha_k^{-2}, ..., sum_k alpha_k^{-2 m_max}] over positive zeros."""
    if m_max < 1:
        raise DomainError("m_max must be >= 1")
    a = _phi_taylor(n, d, h, 0.0, m_max - 1)
    return [float(-v) for v in a]


def eta_multi(n, d, h, z_list, branch="trigonometric"):
    """sum_k prod_i 1/(z_i^2 - alpha_k^2) (or z_i^2 + alpha_k^2, hyperbolic).

    Built by divided differences of eta in s = z^2. When all arguments
    coincide the product is a power and the derivative form is used;
    partial coincidences raise CoincidenceError.
    """
    zs = [float(z) for z in z_list]
    if not zs:
        raise DomainError("z_list must not be empty")
    sgn = 1.0 if branch == "trigonometric" else -1.0
    ss = [sgn * z * z for z in zs]
    if len(zs) == 1:
        return eta(EtaQuery(n, d, h, zs[0], branch))
    scale = max(1.0, max(abs(s) for s in ss))
    eps = 1e-8 * scale
    if all(abs(s - ss[0]) <= eps for s in ss):
        val = eta_derivative(n, d, h, ss[0], len(ss) - 1)
        return val * sgn ** len(ss) if sgn < 0 else val
    for i in range(len(ss)):
        for j in range(i + 1, len(ss)):
            if abs(ss[i] - ss[j]) <= eps:
                raise CoincidenceError(
                    f"z_{i + 1} and z_{j + 1} coincide; use eta_derivative for repeated arguments")
    # Newton divided differences of Phi(s) = sum 1/(s - alpha^2):
    # Phi[s_1..s_j] = (-1)^(j-1) sum prod 1/(s_i - alpha^2)
    table = []
    for z in zs:
        v = eta(EtaQuery(n, d, h, z, branch))
        table.append(v if branch == "trigonometric" else -v)
    for level in range(1, len(ss)):
        table = [(table[i + 1] - table[i]) / (ss[i + level] - ss[i])
                 for i in range(len(table) - 1)]
    val = (-1) ** (len(ss) - 1) * table[0]
    # hyperbolic: prod 1/(z^2 + a^2) = prod (-1)/(s - a^2) with s = -z^2
    return float(val * (-1) ** len(ss) if branch == "hyperbolic" else val)


def eta_multi_recursive(n, d, h, z_list):
    """Trigonometric multi-argument sum by the literal recursion
    eta^(j)(z_1..z_j) = [eta^(j-1)(.., z_{j-1}) - eta^(j-1)(.., z_j)] / (z_j^2 - z_{j-1}^2)."""
    zs = [float(z) for z in z_list]
    if len(zs) == 1:
        return eta(EtaQuery(n, d, h, zs[0]))
    head = zs[:-2]
    a = eta_multi_recursive(n, d, h, head + [zs[-2]])
    b = eta_multi_recursive(n, d, h, head + [zs[-1]])
    return (a - b) / (zs[-1] ** 2 - zs[-2] ** 2)


# -- one-dimensional closed forms --------------------------------------------

def _wv(h):
    """Robin parameter as the pair (w, v) with condition w u' + v u = 0 scaled."""
    return (0.0, 1.0) if math.isinf(h) else (1.0, float(h))


def _end_factor(h, z, y):
    """w z cosh(z y) + v sinh(z y) times exp(-z y) (scaled)."""
    w, v = _wv(h)
    e = math.exp(-2 * z * y)
    return 0.5 * (w * z * (1 + e) + v * (1 - e))


def interval_kernel(h0, hb, z, x, x0):
    """sum_k u_k(x) u_k(x0) / (z^2 + alpha_k^2) with L2-normalised u_k on (0, 1),
    for 0 <= x <= x0 <= 1 (the Laplace-domain Green's function at q = z)."""
    if not 0 <= x <= x0 <= 1:
        raise ValidityError("requires 0 <= x <= x0 <= 1")
    if z <= 0:
        raise ValidityError("z must be > 0")
    w0, v0 = _wv(h0)
    wb, vb = _wv(hb)
    # numerator (w0 z cosh zx + v0 sinh zx)(wb z cosh z(1-x0) + vb sinh z(1-x0))
    # over z [(w0 wb z^2 + v0 vb) sinh z + z (w0 vb + v0 wb) cosh z]; scaled by e^{-z}
    num = _end_factor(h0, z, x) * _end_factor(hb, z, 1 - x0)
    e = math.exp(-2 * z)
    den = z * ((w0 * wb * z * z + v0 * vb) * 0.5 * (1 - e) + z * (w0 * vb + v0 * wb) * 0.5 * (1 + e))
    if den == 0:
        raise DegenerateError("kernel denominator vanishes")
    return num / den * math.exp(-z * (x0 - x))


def interval_trace(h0, hb, z):
    """sum_k 1/(z^2 + alpha_k^2) over all eigenvalues of the unit interval
    (including the zero mode for Neumann-Neumann)."""
    if z <= 0:
        raise ValidityError("z must be > 0")
    w0, v0 = _wv(h0)
    wb, vb = _wv(hb)
    t = math.tanh(z)
    a = z * z * w0 * wb + v0 * vb
    num = z * a + (z * z * (w0 * wb + v0 * wb + vb * w0) - v0 * vb) * t
    den = 2 * z * z * (a * t + z * (v0 * wb + vb * w0))
    return num / den


# -- heat-trace Taylor data and zeta values -------------------------------------

def _z_dd(s):
    w = np.sqrt(s.astype(complex))
    return 1.0 / (2 * w * np.tanh(w)) - 1.0 / (2 * s)


def zeta_even(m):
    """zeta(2m) from the Taylor coefficients of the Dirichlet interval trace
    Z(s) = sum_k 1/(s + pi^2 k^2) = cosh(sqrt s)/(2 sqrt s sinh(sqrt s)) - 1/(2s)."""
    if m < 1 or int(m) != m:
        raise DomainError("m must be a positive integer")
    a = taylor_coefficients(_z_dd, 0.0, 0.5 * math.pi**2, m - 1)
    return float(math.pi ** (2 * m) * (-1) ** (m - 1) * a[m - 1])


# -- heat traces -------------------------------------------------------------

@dataclass
class TraceResult:
    value: float
    n_used: int
    tail_estimate: float
    diverges: bool


def heat_trace(domain, bc, p, D=1.0, N=None):
    """Laplace-transformed heat trace sum_m 1/(p + D lambda_m).

    The interval returns the closed form. For disk, ball, annulus and shell
    the full trace diverges (Weyl growth of the angular sum), so the partial
    angular sum up to n = N is returned with degeneracy weights, with the
    last included term as the tail indicator and ``diverges`` set.
    """
    from .kernels import trace_per_n

    if not p > 0:
        raise ValidityError("p must be > 0")
    if not D > 0:
        raise ValidityError("D must be > 0")
    b = domain.b
    q = math.sqrt(p / D)
    if domain.family == "interval":
        L = b - domain.a
        z = q * L
        val = interval_trace(bc.h_inner, bc.h_outer, z) * L * L / D
        return TraceResult(val, 0, 0.0, False)
    if N is None:
        N = int(math.ceil(10 + 5 * q * b))
    if N < 0:
        raise DomainError("N must be >= 0")
    total = 0.0
    last = 0.0
    for n in range(N + 1):
        last = domain.degeneracy(n) * trace_per_n(domain, bc, n, q) / D
        total += last
    return TraceResult(total, N, abs(last), True)


# -- special series ----------------------------------------------------------

def inverse_j_polynomial(n):
    """Coefficients {power of x: Fraction} of the polynomial P_n(x) such that
    1/J_n(z) - P_n(1/z) is the partial-fraction part.

    P_n(1/z) is the principal part of 1/J_n at the origin, read off the
    Taylor series of z^n/J_n(z) in exact rational arithmetic."""
    if n < 0 or int(n) != n:
        raise DomainError("n must be a nonnegative integer")
    n = int(n)
    if n == 0:
        return {}
    terms = n // 2 + 1
    # z^{-n} J_n(z) = sum_m c_m z^{2m}
    c = [Fraction((-1) ** m, 2 ** (2 * m + n) * math.factorial(m) * math.factorial(m + n))
         for m in range(terms)]
    # reciprocal power series in z^2
    r = [Fraction(1) / c[0]]
    for k in range(1, terms):
        r.append(-sum(c[i] * r[k - i] for i in range(1, k + 1)) / c[0])
    # z^n / J_n = sum_k r_k z^{2k}; the principal part at 0 keeps 2k < n
    return {n - 2 * k: r[k] for k in range(terms) if 2 * k < n}


def _poly_eval(coeffs, x):
    return sum(float(c) * x**p for p, c in coeffs.items())


# -- named formulas ----------------------------------------------------------

def _xx0(params):
    """(min, max) of the point pair; the kernels are symmetric in x and x0."""
    x = float(params.get("x", 0.5))
    x0 = float(params.get("x0", x))
    if not (0 <= x <= 1 and 0 <= x0 <= 1):
        raise ValidityError("requires 0 <= x, x0 <= 1")
    return min(x, x0), max(x, x0)


def _z(params):
    z = float(params.get("z", 1.0))
    if not z > 0:
        raise ValidityError("z must be > 0")
    return z


def _bessel_kinds(d):
    return ("J", "Y", "I", "K") if d == 2 else ("j", "y", "i", "k")


def _f(kind, n, x, derivative=False):
    return float(specfun.bessel(kind, n, x, derivative))


def _robin_val(kind, n, z, h):
    return z * _f(kind, n, z, True) + h * _f(kind, n, z)


def _mode_weight(d, n, h, al):
    """alpha^2 / (alpha^2 - mu + h^2 - (d-2) h) with mu = n^2 or n(n+1)."""
    mu = n * n if d == 2 else n * (n + 1)
    return al**2 / (al**2 - mu + h * h - (d - 2) * h)


def _zero_mode_weight(d):
    return 2.0 if d == 2 else 3.0


def _table3(fid, params):
    d = 2 if fid[0] == "D" else 3
    idx = int(fid[1:])
    n = int(params.get("n", 0))
    h = float(params.get("h", INF if idx >= 7 else 1.0))
    z = _z(params)
    if n < 0:
        raise ValidityError("n must be >= 0")
    if idx <= 6 and math.isinf(h):
        raise ValidityError(f"{fid} holds for finite h; use {fid[0]}{idx + 6} for Dirichlet")
    if idx >= 7 and not math.isinf(h):
        raise ValidityError(f"{fid} is the Dirichlet (h = inf) identity")
    if h < 0:
        raise ValidityError("h must be >= 0")
    J, Y, I, K = _bessel_kinds(d)
    char = characteristic_for(n, d, h)
    trig = idx in (4, 5, 6, 10, 11, 12)
    sgn = -1.0 if trig else 1.0  # denominator z^2 + sgn alpha^2
    if trig:
        pole_guard(char, z)
    pref = z if d == 3 else 1.0
    zm = n == 0 and h == 0
    kind = idx if idx <= 6 else idx - 6
    kind = (kind - 1) % 3  # 0 kernel, 1 trace, 2 single
    x, x0 = (0.0, 0.0)
    if kind in (0, 2):
        x, x0 = _xx0(params)
    R, S = (J, Y) if trig else (I, K)

    if kind == 0:
        if idx <= 6:
            ratio = _robin_val(S, n, z, h) / _robin_val(R, n, z, h)
        else:
            ratio = _f(S, n, z) / _f(R, n, z)
        closed = pref * (_f(S, n, z * x0) - _f(R, n, z * x0) * ratio) * _f(R, n, z * x)
        if trig and d == 2:
            closed *= math.pi / 2  # J Y' - J' Y = 2/(pi z)
        if idx <= 6:
            def term(k, al):
                w = 2 * _mode_weight(d, n, h, al)
                return w * _bessel(J, n, al * x) * _bessel(J, n, al * x0) / (
                    (z * z + sgn * al**2) * _bessel(J, n, al) ** 2)
        else:
            def term(k, al):
                if x0 == 1:  # J_n(alpha_k) = 0: every term vanishes
                    return np.zeros_like(al)
                return 2 * _bessel(J, n, al * x) * _bessel(J, n, al * x0) / (
                    (z * z + sgn * al**2) * _bessel(J, n, al, True) ** 2)
        extra = _zero_mode_weight(d) / z**2 if zm else 0.0
        decay = "oscillatory_inverse_square"
    elif kind == 1:
        mu = n * n if d == 2 else n * (n + 1)
        if idx <= 6:
            f, fp = _f(R, n, z), _f(R, n, z, True)
            hh = h if d == 2 else h - 1
            closed = ((sgn * z * z + mu) * f + z * hh * fp) / (2 * z * z * (z * fp + h * f))
            closed -= n / (2 * z * z)
        else:
            closed = _f(R, n, z, True) / (2 * z * _f(R, n, z)) - n / (2 * z * z)

        def term(k, al):
            return 1.0 / (z * z + sgn * al**2)
        extra = 1.0 / z**2 if zm else 0.0
        decay = "inverse_square"
    else:
        if idx <= 6:
            closed = sgn * _f(R, n, z * x) / _robin_val(R, n, z, h)

            def term(k, al):
                w = 2 * _mode_weight(d, n, h, al)
                return w * _bessel(J, n, al * x) / ((z * z + sgn * al**2) * _bessel(J, n, al))
            extra = _zero_mode_weight(d) / z**2 if zm else 0.0
            decay = "inverse_square" if x == 1 else "oscillatory_inverse_square"
        else:
            if x == 1:
                raise ValidityError(f"{fid} does not converge uniformly at x = 1")
            closed = -sgn * _f(R, n, z * x) / (2 * _f(R, n, z))

            def term(k, al):
                return al * _bessel(J, n, al * x) / ((z * z + sgn * al**2) * _bessel(J, n, al, True))
            extra = 0.0
            decay = "oscillatory_inverse"
    return closed, SeriesSpec(term, decay, char, extra, f"{fid} n={n} h={h} z={z}")


def _bessel(kind, n, x, derivative=False):
    """Unchecked vectorised evaluation for series terms."""
    return specfun.bessel(kind, n, np.asarray(x, dtype=float), derivative)


_LETTER_H = {"R": None, "N": 0.0, "D": INF}


def _table2(fid, params):
    cell = fid.split("-")[1]
    if len(cell) != 2 or any(c not in "RND" for c in cell):
        raise ValidityError(f"unknown boundary pair {cell!r}")
    h = float(params.get("h", 1.0))
    if "R" in cell and not 0 < h < INF:
        raise ValidityError("Robin cells need 0 < h < inf")
    h0 = h if cell[0] == "R" else _LETTER_H[cell[0]]
    hb = h if cell[1] == "R" else _LETTER_H[cell[1]]
    z = _z(params)
    char = Characteristic("interval1D", h_inner=h0, h_outer=hb)
    nn = cell == "NN"
    if fid.startswith("T2Z"):
        closed = interval_trace(h0, hb, z)

        def term(k, al):
            return 1.0 / (z * z + al**2)
        return closed, SeriesSpec(term, "inverse_square", char, 1.0 / z**2 if nn else 0.0,
                                  f"{fid} h={h} z={z}")
    x, x0 = _xx0(params)
    closed = 0.5 * interval_kernel(h0, hb, z, x, x0)

    def u(h_left, al, y):
        if y == 1 and math.isinf(hb):
            # exact Dirichlet value; the refined zeros would leave rounding noise
            return np.zeros_like(al)
        if h_left == 0:
            return np.cos(al * y)
        if math.isinf(h_left):
            return np.sin(al * y)
        return h_left * np.sin(al * y) + al * np.cos(al * y)

    def term(k, al):
        if cell == "RR":
            w = 1.0 / (al**2 + 2 * h + h * h)
        elif cell in ("RN", "RD"):
            w = 1.0 / (al**2 + h + h * h)
        elif cell in ("NR", "DR"):
            w = (al**2 + h * h) / (al**2 + h + h * h)
        else:
            w = 1.0
        return w * u(h0, al, x) * u(h0, al, x0) / (z * z + al**2)
    return closed, SeriesSpec(term, "oscillatory_inverse_square", char,
                              0.5 / z**2 if nn else 0.0, f"{fid} h={h} z={z}")


def _nu_char(params, h):
    nu = float(params.get("nu", params.get("n", 0)))
    if nu < 0:
        raise ValidityError("nu must be >= 0 here")
    return nu, Characteristic("besselJ", nu=nu, h_outer=h)


def _rayleigh(fid, params):
    m = int(params.get("m", 1))
    if m not in (1, 2):
        raise ValidityError("Rayleigh sums are registered for m = 1, 2")
    if "h" in params and not math.isinf(float(params["h"])):
        # Robin sum of alpha^-2 for the disk
        h = float(params["h"])
        n = int(params.get("n", 0))
        if m != 1 or n + h <= 0:
            raise ValidityError("the Robin form needs m = 1 and n + h > 0")
        closed = (n + h + 2) / (4 * (n + 1) * (n + h))
        char = Characteristic("disk2D", n=n, h_outer=h)
    else:
        nu, char = _nu_char(params, INF)
        closed = 1 / (4 * (nu + 1)) if m == 1 else 1 / (16 * (nu + 1) ** 2 * (nu + 2))
    return closed, SeriesSpec(lambda k, al: al ** (-2.0 * m),
                              "inverse_square" if m == 1 else "inverse_quartic", char,
                              0.0, fid)


def _sneddon(fid, params):
    kind = fid.split("-")[1]
    m = int(params.get("m", 1))
    if kind in ("D", "DJ", "N", "NJ", "R"):
        pass
    else:
        raise ValidityError(f"unknown Sneddon family {kind!r}")
    if kind == "R":
        h = float(params.get("h", 1.0))
        if not 0 <= h < INF:
            raise ValidityError("Robin case needs finite h >= 0")
    else:
        h = INF if kind in ("D", "DJ") else 0.0
    nu, char = _nu_char(params, h)
    if kind in ("N", "NJ") and nu <= 0:
        raise ValidityError("Neumann forms require nu > 0")
    g = math.gamma(nu + 1)
    if kind == "D":
        table = {1: 1 / (4 * (nu + 1)),
                 2: 1 / (16 * (nu + 1) ** 2 * (nu + 2)),
                 3: 1 / (32 * (nu + 1) ** 3 * (nu + 2) * (nu + 3)),
                 4: (5 * nu + 11) / (256 * (nu + 1) ** 4 * (nu + 2) ** 2 * (nu + 3) * (nu + 4))}
        term = lambda k, al: al ** (-2.0 * m)  # noqa: E731
        decay = "inverse_square" if m == 1 else "inverse_quartic"
    elif kind == "DJ":
        table = {1: 2 ** (nu - 3) * g / (nu + 1),
                 2: 2 ** (nu - 6) * (nu + 3) * g / ((nu + 1) ** 2 * (nu + 2)),
                 3: 2 ** (nu - 8) * (nu**2 + 8 * nu + 19) * g / (3 * (nu + 1) ** 3 * (nu + 2) * (nu + 3))}
        term = lambda k, al: 1.0 / (al ** (2 * m - nu + 1) * sc.jv(nu + 1, al))  # noqa: E731
        decay = "oscillatory"
    elif kind == "N":
        table = {1: 1 / (4 * nu**2 * (nu + 1)),
                 2: (3 * nu + 4) / (16 * nu**3 * (nu + 1) ** 2 * (nu + 2)),
                 3: (5 * nu**2 + 16 * nu + 12) / (32 * nu**4 * (nu + 1) ** 3 * (nu + 2) * (nu + 3)),
                 4: (35 * nu**4 + 269 * nu**3 + 752 * nu**2 + 896 * nu + 384)
                 / (256 * nu**5 * (nu + 1) ** 4 * (nu + 2) ** 2 * (nu + 3) * (nu + 4))}
        term = lambda k, al: 1.0 / (al ** (2 * m) * (al**2 - nu**2))  # noqa: E731
        decay = "inverse_quartic"
    elif kind == "NJ":
        c = 2**nu * g
        table = {1: c * (nu + 2) / (8 * nu**2 * (nu + 1)),
                 2: c * (nu**3 + 7 * nu**2 + 20 * nu + 16) / (64 * nu**3 * (nu + 1) ** 2 * (nu + 2)),
                 3: c * (nu**5 + 14 * nu**4 + 91 * nu**3 + 330 * nu**2 + 528 * nu + 288)
                 / (768 * nu**4 * (nu + 1) ** 3 * (nu + 2) * (nu + 3))}
        term = lambda k, al: al ** (nu - 2 * m) / ((al**2 - nu**2) * sc.jv(nu, al))  # noqa: E731
        decay = "oscillatory"
    else:
        if nu + h <= 0:
            raise ValidityError("Robin case requires nu + h > 0")
        H = h + nu
        table = {0: 1 / (2 * H),
                 1: 1 / (4 * H**2 * (nu + 1)),
                 2: (h + 3 * nu + 4) / (16 * H**3 * (nu + 1) ** 2 * (nu + 2)),
                 3: (h**2 + 2 * (2 * nu + 3) * h + 5 * nu**2 + 16 * nu + 12)
                 / (32 * H**4 * (nu + 1) ** 3 * (nu + 2) * (nu + 3))}
        term = lambda k, al: 1.0 / (al ** (2 * m) * (al**2 - nu**2 + h * h))  # noqa: E731
        decay = "inverse_square" if m == 0 else "inverse_quartic"
    if m not in table:
        raise ValidityError(f"m = {m} is not tabulated for Sneddon-{kind}")
    spec = SeriesSpec(term, decay, char, 0.0, f"{fid} m={m} nu={nu}")
    return table[m], spec


def _calogero(fid, params):
    d = 2 if fid.endswith("2D") else 3
    j = int(params.get("j", 1))
    h = float(params.get("h", INF))
    if j < 1:
        raise ValidityError("j must be >= 1")
    if d == 2:
        nu = float(params.get("nu", params.get("n", 0)))
        char = Characteristic("besselJ", nu=nu, h_outer=h)
        mu, hh, shift = nu * nu, (h * h if not math.isinf(h) else INF), nu + 1
    else:
        n = int(params.get("n", 0))
        char = Characteristic("ball3D", n=n, h_outer=h)
        mu, hh, shift = n * (n + 1), (h * (h - 1) if not math.isinf(h) else INF), n + 1.5
    zm = char.zero_mode
    # the zero mode alpha = 0 is an eigenvalue and enters the sum as 1/alpha_j^2
    aj = zero_table(char, j).alphas[j - 1]
    first = 0.0 if math.isinf(hh) else 1 / (2 * (aj**2 + hh - mu))
    closed = first - shift / (2 * aj**2)

    def term(k, al):
        diff = aj**2 - al**2
        out = np.zeros_like(al)
        mask = k != j
        out[mask] = 1.0 / diff[mask]
        return out
    extra = 1.0 / aj**2 if zm else 0.0
    return closed, SeriesSpec(term, "inverse_square", char, extra, f"{fid} j={j} h={h}")


def _bessel_ratio(params):
    nu = float(params.get("nu", params.get("n", 0)))
    z = _z(params)
    if nu <= -1:
        raise ValidityError("requires nu > -1")
    char = Characteristic("besselJ", nu=nu)
    pole_guard(char, z)
    closed = sc.jv(nu + 1, z) / sc.jv(nu, z)
    return closed, SeriesSpec(lambda k, al: 2 * z / (al**2 - z * z), "inverse_square", char,
                              0.0, f"BesselRatio nu={nu} z={z}")


def _inverse_j(params):
    n = int(params.get("n", 1))
    z = _z(params)
    char = Characteristic("besselJ", nu=float(n))
    pole_guard(char, z)
    closed = 1.0 / sc.jv(n, z) - _poly_eval(inverse_j_polynomial(n), 1.0 / z)
    if n % 2:
        term = lambda k, al: 2 * z / (sc.jvp(n, al) * (z * z - al**2))  # noqa: E731
    else:
        term = lambda k, al: 2 * al / (sc.jvp(n, al) * (z * z - al**2))  # noqa: E731
    return closed, SeriesSpec(term, "oscillatory", char, 0.0, f"InverseJ n={n} z={z}")


def _sine(fid, params):
    # terms of Sine-D1 and Sine-R keep one sign and decay like alpha^(-3/2),
    # alpha^(-5/2); Sine-D2 alternates
    if fid == "Sine-R":
        h = float(params.get("h", 1.0))
        if not 0 < h < INF:
            raise ValidityError("requires 0 < h < inf")
        char = Characteristic("besselJ", nu=0.0, h_outer=h)
        return 1 / (2 * h), SeriesSpec(
            lambda k, al: np.sin(al) / (al * (al**2 + h * h) * sc.j0(al)),
            "inverse_power", char, 0.0, fid, power=2.5)
    char = Characteristic("besselJ", nu=0.0)
    if fid == "Sine-D1":
        return 0.5, SeriesSpec(lambda k, al: np.sin(al) / (al**2 * sc.j1(al)),
                               "inverse_power", char, 0.0, fid, power=1.5)
    if fid == "Sine-D2":
        return (1 - math.log(2)) / 2, SeriesSpec(
            lambda k, al: np.sin(al) / (al**3 * sc.j1(al) ** 2), "oscillatory", char, 0.0, fid)
    raise UnsupportedError(f"unknown formula id {fid!r}")


def _zeta(fid, params):
    m = int(fid.split("-")[1]) // 2 if "-" in fid else int(params.get("m", 1))
    closed = zeta_even(m)
    return closed, SeriesSpec(lambda k, al: al ** (-2.0 * m),
                              "inverse_square" if m == 1 else "inverse_quartic", None, 0.0, fid)


ALIASES = {"KneserSommerfeld-2D": "D10", "KneserSommerfeld-3D": "S10"}


def formula_ids():
    """Registered identifiers (parameterised families listed by stem)."""
    ids = [f"D{i}" for i in range(1, 13)] + [f"S{i}" for i in range(1, 13)]
    ids += [f"T2-{a}{b}" for a in "RND" for b in "RND"]
    ids += [f"T2Z-{a}{b}" for a in "RND" for b in "RND"]
    ids += ["Rayleigh", "Sneddon-D", "Sneddon-DJ", "Sneddon-N", "Sneddon-NJ", "Sneddon-R",
            "Calogero-2D", "Calogero-3D", "KneserSommerfeld-2D", "KneserSommerfeld-3D",
            "Zeta-2", "Zeta-4", "BesselRatio", "InverseJ", "Sine-D1", "Sine-D2", "Sine-R"]
    return ids


def named_formula(fid, params=None):
    """Closed value and the paired SeriesSpec for the identity ``fid``."""
    params = dict(params or {})
    fid = ALIASES.get(fid, fid)
    if fid[0] in "DS" and fid[1:].isdigit() and 1 <= int(fid[1:]) <= 12:
        return _table3(fid, params)
    if fid.startswith("T2-") or fid.startswith("T2Z-"):
        return _table2(fid, params)
    if fid.startswith("Rayleigh"):
        if "-" in fid:
            params.setdefault("m", int(fid.split("-")[1]))
        return _rayleigh(fid, params)
    if fid.startswith("Sneddon-"):
        parts = fid.split("-")
        if len(parts) == 3:
            params.setdefault("m", int(parts[2]))
            fid = "-".join(parts[:2])
        return _sneddon(fid, params)
    if fid.startswith("Calogero-"):
        return _calogero(fid, params)
    if fid.lower().startswith("zeta"):
        if fid.lower() == "zeta":
            fid = f"Zeta-{2 * int(params.get('m', 1))}"
        return _zeta(fid, params)
    if fid == "BesselRatio":
        return _bessel_ratio(params)
    if fid == "InverseJ":
        return _inverse_j(params)
    if fid.startswith("Sine-"):
        return _sine(fid, params)
    raise UnsupportedError(f"unknown formula id {fid!r}")
