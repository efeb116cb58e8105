"""Laplace-domain Green's functions of radial problems and Bessel expansions.

For a fixed angular index n the radial Green's function of
q^2 - Laplacian is built from two modified solutions: v_a satisfies the
inner condition, v_b the outer one, and

    G_q(r, r0) = - v_a(min) v_b(max) / (q V W(q r0) omega(r0)),

with omega(r) = r^(d-1), W the Wronskian of the (I, K) pair and V the
determinant of the boundary coefficients. It equals the spectral sum
sum_k c_k^2 u_k(r) u_k(r0) / (q^2 + lambda_k), zero mode included.

All evaluations use exponentially scaled functions: with
I(x) = I~(x) e^x and K(x) = K~(x) e^-x, v_a(r) = e^{q(r - a)} v~_a(r) and
v_b(r) = e^{q(b - r)} v~_b(r), so the exponential factors collapse to
exp(-q |r - r0|) and large q b does not overflow.

The pair is (e^x, e^-x) in one dimension, (I_n, K_n) in two and
(i_n, k_n) in three, with Wronskians 2, 1/x and 1/x^2.
"""

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate

from . import specfun
from .errors import (DomainError, OverflowError, SlowConvergenceWarning, UnsupportedError,
                     ValidityError)
from .spectra import BoundaryCondition, RadialDomain, mode_arrays
from .zeros import Characteristic, zero_table

INF = math.inf
KINDS = ("FourierBessel-D", "FourierBessel-N", "Dini")


@dataclass(frozen=True)
class RadialProblem:
    """Radial operator at angular index n with weight omega(r) = r^weight."""

    domain: RadialDomain
    bc: BoundaryCondition
    n: int = 0
    weight: int = None

    def __post_init__(self):
        if self.n < 0 or int(self.n) != self.n:
            raise DomainError("n must be a nonnegative integer")
        d = self.domain.dim
        if self.weight is None:
            object.__setattr__(self, "weight", d - 1)
        elif self.weight != d - 1:
            raise DomainError(f"weight exponent must be {d - 1} for {self.domain.family}")
        if self.domain.family == "interval" and self.n != 0:
            raise DomainError("interval has no angular index; use n = 0")

    @property
    def dim(self):
        return self.domain.dim


def _scaled(dim, kind, n, x, derivative=False):
    """I~ = I e^-x or K~ = K e^x (or their derivatives with the same factor)."""
    x = np.asarray(x, dtype=float)
    if dim == 1:
        sign = -1.0 if (kind == "K" and derivative) else 1.0
        return sign * np.ones_like(x)
    k = kind if dim == 2 else kind.lower()
    return specfun.bessel_scaled(k, n, x, derivative)


def _wronskian(dim, x):
    """I'K - IK' for the pair of dimension ``dim``."""
    return {1: 2.0, 2: 1.0 / x, 3: 1.0 / x**2}[dim]


def _robin_weights(h):
    """(w, v) with the condition written as w * derivative + v * value / L."""
    return (0.0, 1.0) if math.isinf(h) else (1.0, float(h))


@dataclass
class GreenAssembly:
    """Boundary-adapted homogeneous solutions and their determinant.

    ``coef_a = (A_K, A_I)`` and ``coef_b = (B_K, B_I)`` are the scaled
    combination coefficients, v_a = A_K I - A_I K and v_b = B_K I - B_I K;
    ``V`` is the scaled determinant A_K B_I - A_I B_K. ``a_ref`` and
    ``b_ref`` are the radii carrying the exponential scales.
    """

    prob: RadialProblem
    q: float
    coef_a: tuple
    coef_b: tuple
    a_ref: float
    b_ref: float
    V_scaled: float
    W: str
    notes: dict = field(default_factory=dict)

    @property
    def dim(self):
        return self.prob.dim

    @property
    def log_scale(self):
        """log of the factor turning V_scaled into V."""
        return self.q * (self.b_ref - self.a_ref)

    @property
    def V(self):
        return self.V_scaled * math.exp(self.log_scale)

    def _comb(self, coef, r, derivative, damp_ref, damp_I):
        q, n, d = self.q, self.prob.n, self.dim
        ck, ci = coef
        x = q * np.asarray(r, dtype=float)
        out = 0.0
        e = np.exp(-2 * q * np.abs(np.asarray(r, dtype=float) - damp_ref))
        if ck != 0:
            t = ck * _scaled(d, "I", n, x, derivative)
            out = out + (t * e if damp_I else t)
        if ci != 0:
            t = ci * _scaled(d, "K", n, x, derivative)
            out = out - (t if damp_I else t * e)
        out = out * (q if derivative else 1.0)
        return np.asarray(out, dtype=float)

    def va_scaled(self, r, derivative=False):
        """e^{-q(r - a_ref)} v_a(r) (or of v_a')."""
        return self._comb(self.coef_a, r, derivative, self.a_ref, damp_I=False)

    def vb_scaled(self, r, derivative=False):
        """e^{-q(b_ref - r)} v_b(r) (or of v_b')."""
        return self._comb(self.coef_b, r, derivative, self.b_ref, damp_I=True)

    def va(self, r, derivative=False):
        r = np.asarray(r, dtype=float)
        return self.va_scaled(r, derivative) * np.exp(self.q * (r - self.a_ref))

    def vb(self, r, derivative=False):
        r = np.asarray(r, dtype=float)
        return self.vb_scaled(r, derivative) * np.exp(self.q * (self.b_ref - r))

    def kappa(self):
        """q omega(r) W(q r), independent of r."""
        return {1: 2.0 * self.q, 2: 1.0, 3: 1.0 / self.q}[self.dim]

    def wronskian_residual(self, r):
        """Relative defect of v_b v_a' - v_a v_b' = -q V W(q r) at r."""
        r = float(r)
        lhs = (self.vb_scaled(r) * self.va_scaled(r, True)
               - self.va_scaled(r) * self.vb_scaled(r, True))
        rhs = -self.q * self.V_scaled * _wronskian(self.dim, self.q * r)
        return float(abs(lhs - rhs) / abs(rhs))


def _inner_coefficients(d, n, q, a, h, L):
    """Scaled (A_K, A_I) for the condition ell v' - v = 0 at r = a (h = L/ell)."""
    w, v = _robin_weights(h)
    x = q * a
    ak = w * q * _scaled(d, "K", n, x, True) - v / L * _scaled(d, "K", n, x)
    ai = w * q * _scaled(d, "I", n, x, True) - v / L * _scaled(d, "I", n, x)
    return float(ak), float(ai)


def _outer_coefficients(d, n, q, b, h):
    """Scaled (B_K, B_I) for the condition ell v' + v = 0 at r = b (h = b/ell)."""
    w, v = _robin_weights(h)
    x = q * b
    bk = w * q * _scaled(d, "K", n, x, True) + v / b * _scaled(d, "K", n, x)
    bi = w * q * _scaled(d, "I", n, x, True) + v / b * _scaled(d, "I", n, x)
    return float(bk), float(bi)


def assemble_green(prob: RadialProblem, q: float) -> GreenAssembly:
    """Homogeneous solutions adapted to the inner and outer conditions.

    Disk and ball use the regular solution at the origin. For the exterior
    of a disk the outer solution is K_n(q r) and ``bc.h_inner`` is taken
    relative to the disk radius (h = R / ell).
    """
    if not q > 0:
        raise DomainError("q must be > 0")
    dom, bc, n, d = prob.domain, prob.bc, prob.n, prob.dim
    fam = dom.family
    if fam in ("disk", "ball"):
        coef_a, a_ref = (1.0, 0.0), 0.0
    elif fam == "exterior_disk":
        coef_a, a_ref = _inner_coefficients(d, n, q, dom.a, bc.h_inner, dom.a), dom.a
    else:
        coef_a, a_ref = _inner_coefficients(d, n, q, dom.a, bc.h_inner, dom.b), dom.a
    if fam == "exterior_disk":
        coef_b, b_ref = (0.0, -1.0), 0.0
    else:
        coef_b, b_ref = _outer_coefficients(d, n, q, dom.b, bc.h_outer), dom.b
    ak, ai = coef_a
    bk, bi = coef_b
    V = ak * bi
    if ai != 0 and bk != 0:
        V -= ai * bk * math.exp(-2 * q * (b_ref - a_ref))
    if not all(np.isfinite([ak, ai, bk, bi, V])):
        raise OverflowError(f"boundary coefficients out of range (n={n}, q={q})",
                            log_value=float("nan"))
    if V == 0:
        raise DomainError(f"degenerate determinant at q={q}, n={n}")
    return GreenAssembly(prob, float(q), coef_a, coef_b, a_ref, b_ref, float(V),
                         {1: "2", 2: "1/z", 3: "1/z^2"}[d])


def _check_points(dom, r, r0):
    lo = dom.a if dom.family in ("annulus", "shell", "exterior_disk") else 0.0
    hi = dom.b
    tol = 1e-14 * (hi if math.isfinite(hi) else max(r, r0))
    for v in (r, r0):
        if v < lo - tol or v > hi + tol:
            raise DomainError(f"radius {v} outside [{lo}, {hi}]")


def green_value(g: GreenAssembly, r, r0):
    """G_q(r, r0) from an assembled problem."""
    lo, hi = (r, r0) if r <= r0 else (r0, r)
    va = float(g.va_scaled(lo))
    if va == 0.0:
        return 0.0
    if hi == 0.0 and g.dim > 1:
        raise DomainError("the kernel diagonal is singular at the origin")
    num = va * float(g.vb_scaled(hi))
    val = -num / (g.kappa() * g.V_scaled) * math.exp(-g.q * (hi - lo))
    if not math.isfinite(val):
        raise OverflowError(f"kernel out of range (n={g.prob.n}, q={g.q})", log_value=float("nan"))
    return val


def kernel_value(prob: RadialProblem, q, r, r0):
    """G_q(r, r0) = sum_k c_k^2 u_k(r) u_k(r0) / (q^2 + lambda_k); symmetric in (r, r0)."""
    r, r0 = float(r), float(r0)
    _check_points(prob.domain, r, r0)
    return green_value(assemble_green(prob, q), r, r0)


def trace_per_n(domain, bc, n, q):
    """sum_k 1/(q^2 + lambda_nk) over the radial modes at fixed n (zero mode included).

    Obtained from the integral of omega(r) G_q(r, r) in closed form.
    """
    from .sums import interval_trace

    if domain.family == "exterior_disk":
        raise UnsupportedError("exterior of a disk has a continuous spectrum")
    if domain.family == "interval":
        L = domain.b - domain.a
        return interval_trace(bc.h_inner, bc.h_outer, q * L) * L * L
    g = assemble_green(RadialProblem(domain, bc, n), q)
    d = domain.dim

    def S(r):
        if r == 0:
            # limit at the centre from the small-argument forms of the pair
            # (I_n K_n -> 1/(2n), i_n k_n ~ 1/((2n + 1) z)); v_b -> -B_I K
            bi = g.coef_b[1]
            if d == 2:
                return -n * bi
            return -bi * (2 * n * (n + 1) + 0.5) / ((2 * n + 1) * q)
        va, vb = float(g.va_scaled(r)), float(g.vb_scaled(r))
        dva, dvb = float(g.va_scaled(r, True)), float(g.vb_scaled(r, True))
        if d == 2:
            return (q * q * r * r + n * n) * va * vb - r * r * dva * dvb
        return r * ((q * q * r * r + n * (n + 1)) * va * vb
                    - 0.5 * r * (dva * vb + va * dvb) - r * r * dva * dvb)

    a = domain.a
    diff = S(a) - S(domain.b)
    if d == 2:
        return diff / (2 * q * q * g.V_scaled)
    return diff / (2 * q * g.V_scaled)


def trace_quadrature(domain, bc, n, q):
    """Same quantity as :func:`trace_per_n` by adaptive quadrature of omega(r) G(r, r)."""
    g = assemble_green(RadialProblem(domain, bc, n), q)
    d = domain.dim
    lo = domain.a if domain.family in ("annulus", "shell") else 0.0
    val, _ = integrate.quad(lambda r: r ** (d - 1) * green_value(g, r, r), lo, domain.b,
                            epsabs=0.0, epsrel=1e-12, limit=200)
    return val


# -- propagator ----------------------------------------------------------------

@dataclass
class PropagatorResult:
    value: float
    N_used: int
    tail_est: float


def _polar(x, dim):
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape != (dim,):
        raise DomainError(f"point must have {dim} coordinates")
    return x, float(np.sqrt(np.dot(x, x)))


def propagator(domain, bc, p, D, x, x0, N=None):
    """Laplace-transformed heat kernel P~(x, p | x0) at Cartesian points.

    Circular domains sum (1/(2 pi D)) sum_n e^{i n dphi} G_n (as a cosine
    series), spherical ones (1/(4 pi D)) sum_n (2n + 1) P_n(cos gamma) G_n.
    The angular sum stops at N (default ceil(10 + 5 q b)); the tail is
    estimated from the geometric ratio of the last two term envelopes.
    """
    if not p > 0 or not D > 0:
        raise DomainError("p and D must be > 0")
    q = math.sqrt(p / D)
    d = domain.dim
    if d == 1:
        r, r0 = float(np.ravel(x)[0]), float(np.ravel(x0)[0])
        val = kernel_value(RadialProblem(domain, bc, 0), q, min(r, r0), max(r, r0)) / D
        return PropagatorResult(val, 0, 0.0)
    xv, r = _polar(x, d)
    x0v, r0 = _polar(x0, d)
    # canonical argument order makes the result bit-symmetric
    if (r0, tuple(x0v)) < (r, tuple(xv)):
        xv, x0v, r, r0 = x0v, xv, r0, r
    _check_points(domain, r, r0)
    if N is None:
        scale = domain.b if math.isfinite(domain.b) else max(r, r0)
        N = int(math.ceil(10 + 5 * q * scale))
    if N < 1:
        raise DomainError("N must be >= 1")
    if r == 0 or r0 == 0:
        cosg = 1.0
    else:
        cosg = float(np.clip(np.dot(xv, x0v) / (r * r0), -1.0, 1.0))
    if d == 2:
        dphi = abs(math.atan2(xv[1], xv[0]) - math.atan2(x0v[1], x0v[0]))
    terms, env = [], []
    for n in range(N + 1):
        if (r == 0 or r0 == 0) and n > 0:
            terms.append(0.0)
            env.append(0.0)
            continue
        G = kernel_value(RadialProblem(domain, bc, n), q, r, r0)
        if d == 2:
            w = 1.0 if n == 0 else 2.0
            ang = w * math.cos(n * dphi) / (2 * math.pi * D)
            e = w / (2 * math.pi * D)
        else:
            ang = (2 * n + 1) * float(specfun.legendre(n, cosg)) / (4 * math.pi * D)
            e = (2 * n + 1) / (4 * math.pi * D)
        terms.append(ang * G)
        env.append(e * abs(G))
    value = math.fsum(terms)
    t1, t0 = env[-1], env[-2]
    if t1 == 0:
        est = 0.0
    else:
        ratio = t1 / t0 if t0 > 0 else INF
        est = t1 * ratio / (1 - ratio) if ratio < 1 else INF
    if est > 1e-6 * abs(value):
        warnings.warn(f"angular sum converges slowly (tail estimate {est:.3g}); "
                      "points are close or N is small", SlowConvergenceWarning, stacklevel=2)
    return PropagatorResult(value, N, float(est))


# -- closed-form radial factors for circular domains ------------------------------

PROPAGATOR_ROWS = ("disk-D", "disk-N", "exterior-D", "exterior-N",
                   "annulus-DD", "annulus-ND", "annulus-DN", "annulus-NN")


def propagator_factors(row, n, q, r, r0, R=None, L=None):
    """g_n^<(min) g_n^>(max) for the explicit circular-domain table.

    Disks have radius L, the exterior of a disk radius R, annuli R < r < L.
    The product equals the radial Green's function G_n (unscaled; intended
    for moderate q L).
    """
    if row not in PROPAGATOR_ROWS:
        raise DomainError(f"unknown row {row!r}")
    lo, hi = min(r, r0), max(r, r0)

    def I(x, dv=False):
        return float(specfun.bessel("I", n, x, dv))

    def K(x, dv=False):
        return float(specfun.bessel("K", n, x, dv))

    if row == "disk-D":
        return I(q * lo) / I(q * L) * (I(q * L) * K(q * hi) - K(q * L) * I(q * hi))
    if row == "disk-N":
        return I(q * lo) / I(q * L, 1) * (I(q * L, 1) * K(q * hi) - K(q * L, 1) * I(q * hi))
    if row == "exterior-D":
        return (K(q * R) * I(q * lo) - I(q * R) * K(q * lo)) * K(q * hi) / K(q * R)
    if row == "exterior-N":
        return (K(q * R, 1) * I(q * lo) - I(q * R, 1) * K(q * lo)) * K(q * hi) / K(q * R, 1)
    inner_n = row in ("annulus-ND", "annulus-NN")
    outer_n = row in ("annulus-DN", "annulus-NN")
    gi = (K(q * R, inner_n) * I(q * lo) - I(q * R, inner_n) * K(q * lo))
    go = (K(q * L, outer_n) * I(q * hi) - I(q * L, outer_n) * K(q * hi))
    if row == "annulus-DD":
        return gi * go / (K(q * L) * I(q * R) - I(q * L) * K(q * R))
    if row == "annulus-ND":
        return gi / (K(q * R, 1) * I(q * L) - I(q * R, 1) * K(q * L)) * (-go)
    if row == "annulus-DN":
        return gi * go / (K(q * L, 1) * I(q * R) - I(q * L, 1) * K(q * R))
    return gi * go / (K(q * L, 1) * I(q * R, 1) - I(q * L, 1) * K(q * R, 1))


# -- Fourier-Bessel and Dini expansions -------------------------------------------

@dataclass
class ExpansionCoeffs:
    """f(x) ~ sum_k coeffs[k] J_nu(alphas[k] x) on (0, 1)."""

    nu: float
    h: float
    kind: str
    coeffs: np.ndarray
    K: int
    alphas: np.ndarray = None


def _expansion_zeros(kind, nu, h, K):
    if kind not in KINDS:
        raise DomainError(f"unknown expansion kind {kind!r}")
    if nu < 0:
        raise ValidityError("orders nu < 0 are not supported")
    if kind == "FourierBessel-D":
        hh = INF
    elif kind == "FourierBessel-N":
        if not nu > 0:
            raise ValidityError("Neumann Fourier-Bessel expansion needs nu > 0")
        hh = 0.0
    else:
        if math.isinf(h) or h < 0:
            raise ValidityError("Dini expansion needs finite h >= 0")
        if not nu + h > 0:
            raise ValidityError("Dini expansion needs nu + h > 0")
        hh = float(h)
    char = Characteristic("besselJ", 0, INF, hh, 0.0, float(nu))
    return hh, zero_table(char, K).alphas.astype(float)


def expansion_weights(kind, nu, h, alphas):
    """Factors turning int_0^1 y f(y) J_nu(alpha y) dy into coefficients."""
    al = np.asarray(alphas, dtype=float)
    if kind == "FourierBessel-D":
        return 2.0 / specfun.bessel("J", nu + 1, al) ** 2
    hh = 0.0 if kind == "FourierBessel-N" else h
    return 2.0 * al**2 / ((al**2 - nu**2 + hh**2) * specfun.bessel("J", nu, al) ** 2)


def _projection(f, nu, alpha, zeros_inside):
    pts = list(zeros_inside[zeros_inside < alpha] / alpha)
    val, _ = integrate.quad(lambda y: y * f(y) * float(specfun.bessel("J", nu, alpha * y)),
                            0.0, 1.0, points=pts or None, limit=max(100, 4 * len(pts) + 50),
                            epsabs=1e-13, epsrel=1e-12)
    return val


def expand(f: Callable[[float], float], kind, nu, h=INF, K=32) -> ExpansionCoeffs:
    """Expansion coefficients of f on (0, 1) by adaptive quadrature.

    The integration interval is split at the zeros of J_nu(alpha_k y).
    """
    if K < 1:
        raise DomainError("K must be >= 1")
    hh, alphas = _expansion_zeros(kind, nu, h, K)
    if kind == "FourierBessel-D":
        jzeros = alphas
    else:
        jzeros = zero_table(Characteristic("besselJ", 0, INF, INF, 0.0, float(nu)), K + 2).alphas
    proj = np.array([_projection(f, nu, a, jzeros) for a in alphas])
    coeffs = expansion_weights(kind, nu, hh, alphas) * proj
    return ExpansionCoeffs(float(nu), hh, kind, coeffs, K, alphas)


def power_coefficients(kind, nu, h=INF, K=32):
    """Closed-form coefficients of f(x) = x^nu."""
    hh, al = _expansion_zeros(kind, nu, h, K)
    jn1 = specfun.bessel("J", nu + 1, al)
    if kind == "FourierBessel-D":
        c = 2.0 / (al * jn1)
    else:
        c = 2.0 * al * jn1 / ((al**2 - nu**2 + hh**2) * specfun.bessel("J", nu, al) ** 2)
    return ExpansionCoeffs(float(nu), hh, kind, c, K, al)


def reconstruct(ec: ExpansionCoeffs, x):
    """Partial sum sum_k c_k J_nu(alpha_k x)."""
    x = np.asarray(x, dtype=float)
    J = specfun.bessel("J", ec.nu, np.multiply.outer(x, ec.alphas))
    return J @ ec.coeffs


def completeness_residual(n, h, K, x, x0, dim=2, width=0.05):
    """Partial completeness kernel tested against a bump centred at x0.

    Returns int_0^1 omega(y) sum_{k <= K} c_k^2 u_k(x) u_k(y) phi(y) dy - phi(x)
    for phi(y) = exp(-((y - x0)/width)^2) on the unit disk (dim=2) or
    ball (dim=3) with outer Robin parameter h. It tends to 0 as K grows.
    """
    if not (0 < x < 1 and 0 < x0 < 1):
        raise DomainError("need 0 < x, x0 < 1")
    if dim not in (2, 3):
        raise DomainError("dim must be 2 or 3")
    dom = RadialDomain("disk" if dim == 2 else "ball")
    bc = BoundaryCondition(INF, h)
    ma = mode_arrays(dom, bc, n, K)
    al, c2 = ma.alpha[:K], ma.c2[:K]

    def phi(y):
        return math.exp(-(((y - x0) / width) ** 2))

    reg = "J" if dim == 2 else "j"
    lo, hi = max(0.0, x0 - 8 * width), min(1.0, x0 + 8 * width)
    proj = np.empty(len(al))
    for i, a in enumerate(al):
        if a == 0:
            proj[i], _ = integrate.quad(lambda y: y ** (dim - 1) * phi(y), lo, hi, epsabs=1e-14)
        else:
            proj[i], _ = integrate.quad(
                lambda y: y ** (dim - 1) * phi(y) * float(specfun.bessel(reg, n, a * y)),
                lo, hi, epsabs=1e-14, limit=200)
    ux = np.where(al == 0, 1.0, specfun.bessel(reg, n, al * x))
    return float(np.dot(c2 * ux, proj) - phi(x))
