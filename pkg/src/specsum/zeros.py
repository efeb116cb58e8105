"""Positive zeros of the radial characteristic functions.

A :class:`Characteristic` bundles the dimensionless function g_n(alpha)
with its analytic derivative. Zeros are bracketed either by the
interlacing intervals (pi(k-1), pi k) for the interval, or by a grid scan
followed by an affine predictor once the spacing has settled. Refinement
is a vectorised safeguarded Newton iteration.
"""

import math
import threading
from dataclasses import dataclass, field

import numpy as np

from . import specfun
from .errors import BracketError, ConvergenceError, DomainError

FAMILIES = ("interval1D", "disk2D", "ball3D", "annulus2D", "shell3D", "besselJ")
INF = math.inf

_SCAN_PER_SPACING = 16
_SCAN_ZEROS = 64  # zeros located by the fine scan before switching to prediction


def _robin_pair(kind, n, alpha, rho, h, inner):
    """Robin combination at x = rho and its alpha-derivative.

    Outer: alpha F'(alpha rho) + h F(alpha rho); inner: alpha F'(alpha rho) - h F(alpha rho),
    both divided by sqrt(alpha^2 + h^2) so the value stays O(|F|) as alpha grows.
    Dirichlet (h = inf) reduces to F(alpha rho).
    """
    x = alpha * rho
    f = specfun.bessel(kind, n, x)
    fp = specfun.bessel(kind, n, x, derivative=True)
    if math.isinf(h):
        return f, rho * fp
    fpp = specfun.cylinder_second(kind, n, x, f, fp)
    s = -1.0 if inner else 1.0
    val = alpha * fp + s * h * f
    der = fp + alpha * rho * fpp + s * h * rho * fp
    norm = np.hypot(alpha, h)
    return val / norm, der / norm - val * alpha / norm / norm / norm


@dataclass(frozen=True)
class Characteristic:
    """Dimensionless characteristic function g_n of a radial eigenproblem.

    ``h_inner`` is the Robin parameter at the inner end (x = 0 for the
    interval, r = a for annulus and shell; unused for disk and ball),
    ``h_outer`` the one at r = b. Both are b/ell, with inf for Dirichlet
    and 0 for Neumann. ``ratio`` is a/b for annulus and shell.

    The ``besselJ`` family is alpha J_nu'(alpha) + h J_nu(alpha) with a real
    order ``nu`` >= 0 (used for Fourier-Bessel and Dini series).
    """

    family: str
    n: int = 0
    h_inner: float = INF
    h_outer: float = INF
    ratio: float = 0.0
    nu: float = 0.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise DomainError(f"unknown family {self.family!r}")
        if self.n < 0 or int(self.n) != self.n:
            raise DomainError("mode index n must be a nonnegative integer")
        if self.h_inner < 0 or self.h_outer < 0:
            raise DomainError("Robin parameters must be nonnegative")
        if self.family == "besselJ" and not self.nu >= 0:
            raise DomainError("besselJ family needs nu >= 0")
        if self.family in ("annulus2D", "shell3D"):
            if not 0 < self.ratio < 1:
                raise DomainError("annulus/shell need 0 < a/b < 1")

    # -- classification ----------------------------------------------------
    @property
    def dim(self):
        return {"interval1D": 1, "disk2D": 2, "ball3D": 3, "annulus2D": 2, "shell3D": 3,
                "besselJ": 2}[self.family]

    @property
    def pair(self):
        return specfun.pair_for(self.dim, modified=False)

    @property
    def spacing(self):
        """Asymptotic distance between consecutive zeros."""
        if self.family in ("annulus2D", "shell3D"):
            return math.pi / (1.0 - self.ratio)
        return math.pi

    @property
    def zero_mode(self):
        """True when alpha = 0 is an eigenvalue (pure Neumann, n = 0)."""
        if self.n != 0 or self.h_outer != 0:
            return False
        if self.family == "besselJ":
            return self.nu == 0
        if self.family in ("disk2D", "ball3D"):
            return True
        return self.h_inner == 0

    def key(self):
        return (self.family, int(self.n), float(self.h_inner), float(self.h_outer),
                float(self.ratio), float(self.nu))

    # -- evaluation ----------------------------------------------------------
    def value_and_derivative(self, alpha):
        alpha = np.asarray(alpha, dtype=float)
        if self.family == "interval1D":
            return self._interval(alpha)
        reg, sing = self.pair
        n = self.n
        if self.family == "besselJ":
            return _robin_pair("J", self.nu, alpha, 1.0, self.h_outer, inner=False)
        if self.family in ("disk2D", "ball3D"):
            return _robin_pair(reg, n, alpha, 1.0, self.h_outer, inner=False)
        rho = self.ratio
        ay, ay_d = _robin_pair(sing, n, alpha, rho, self.h_inner, inner=True)
        aj, aj_d = _robin_pair(reg, n, alpha, rho, self.h_inner, inner=True)
        bj, bj_d = _robin_pair(reg, n, alpha, 1.0, self.h_outer, inner=False)
        by, by_d = _robin_pair(sing, n, alpha, 1.0, self.h_outer, inner=False)
        val = ay * bj - aj * by
        der = ay_d * bj + ay * bj_d - aj_d * by - aj * by_d
        return val, der

    def __call__(self, alpha):
        return self.value_and_derivative(alpha)[0]

    def _interval(self, a):
        # Robin factors are divided by sqrt(a^2 + h^2), which keeps g bounded
        h0, hb = self.h_inner, self.h_outer
        s, c = np.sin(a), np.cos(a)
        if math.isinf(h0) and math.isinf(hb):
            return s, c
        if math.isinf(h0) or math.isinf(hb):
            h = hb if math.isinf(h0) else h0
            val, der = h * s + a * c, (h + 1) * c - a * s
            r = np.hypot(a, h)
            norm, dlog = r, a / r / r
        else:
            val = (a * a - h0 * hb) * s - a * (h0 + hb) * c
            der = 2 * a * s + (a * a - h0 * hb) * c - (h0 + hb) * c + a * (h0 + hb) * s
            r0, rb = np.hypot(a, h0), np.hypot(a, hb)
            norm, dlog = r0 * rb, a / r0 / r0 + a / rb / rb
        return val / norm, (der - val * dlog) / norm

    # phase form for the interval: theta(alpha) = alpha + atan(alpha/h0) + atan(alpha/hb)
    # is increasing and the k-th eigenvalue solves theta = k pi
    def phase(self, a):
        a = np.asarray(a, dtype=float)
        return a + np.arctan2(a, self.h_inner) + np.arctan2(a, self.h_outer)

    def phase_derivative(self, a):
        a = np.asarray(a, dtype=float)
        d = np.ones_like(a)
        for h in (self.h_inner, self.h_outer):
            if not math.isinf(h):
                # h / (a^2 + h^2) written so tiny h cannot underflow to 0/0
                d = d + 1.0 / (a * a / h + h) if h > 0 else d
        return d


@dataclass
class ZeroTable:
    """Ordered positive zeros with their brackets and a scaled residual bound.

    ``residual_bound`` is max_k |g(alpha_k)| / (|g'(alpha_k)| alpha_k), an
    estimate of the relative root error.
    """

    characteristic: Characteristic
    alphas: np.ndarray
    brackets: np.ndarray
    residual_bound: float
    zero_mode: bool = False
    notes: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.alphas)


# -- bracketing ---------------------------------------------------------------

def _interval_brackets(char, count, first=1):
    k = np.arange(first, first + count, dtype=float)
    return np.column_stack([math.pi * (k - 1), math.pi * k])


def _scan(char, lo, hi, step):
    grid = np.arange(lo, hi + step, step)
    g = char(grid)
    sg = np.sign(g)
    idx = np.nonzero(sg[:-1] * sg[1:] < 0)[0]
    exact = np.nonzero(sg == 0)[0]
    br = [(grid[i], grid[i + 1]) for i in idx]
    for i in exact:
        if 0 < i < len(grid) - 1:
            br.append((grid[i - 1], grid[i + 1]))
    br.sort()
    return br, grid[-1]


def _bessel_brackets(char, count):
    sp = char.spacing
    step = sp / _SCAN_PER_SPACING
    eps = 1e-6 * sp
    brackets = []
    hi = eps
    need_scan = min(count, _SCAN_ZEROS)
    window = sp * (need_scan + max(char.n, char.nu) / 2 + 4)
    while len(brackets) < need_scan:
        found, hi = _scan(char, hi, hi + window, step)
        brackets.extend(found)
        window = sp * (need_scan - len(brackets) + 4)
    brackets = brackets[:count] if len(brackets) >= count else brackets
    if len(brackets) >= count:
        return np.array(brackets[:count])
    return _predict_brackets(char, np.array(brackets), count)


def _predict_brackets(char, brackets, count):
    """Extend a bracket list using an affine fit of the refined zeros."""
    alphas = refine_many(char, brackets)
    while len(alphas) < count:
        m = min(32, len(alphas) - 1)
        kk = np.arange(len(alphas) - m, len(alphas), dtype=float)
        slope, off = np.polyfit(kk, alphas[-m:], 1)
        nxt = min(count - len(alphas), max(len(alphas), 64))
        k_new = np.arange(len(alphas), len(alphas) + nxt, dtype=float)
        # midpoints between predicted zeros, starting half a step after the last zero
        mids = slope * (np.concatenate([[k_new[0] - 1], k_new]) + 0.5) + off
        mids[0] = max(mids[0], alphas[-1] + 1e-9 * alphas[-1])
        gm = char(mids)
        ok = np.sign(gm[:-1]) * np.sign(gm[1:]) < 0
        if not ok.all():
            bad = int(np.argmin(ok))
            if bad == 0:
                # fall back to a local fine scan from the last zero
                found, _ = _scan(char, alphas[-1] + 1e-9 * alphas[-1],
                                 alphas[-1] + 2 * char.spacing, char.spacing / _SCAN_PER_SPACING)
                if not found:
                    raise BracketError("lost track of zeros during prediction",
                                       window=(alphas[-1], alphas[-1] + 2 * char.spacing))
                new_br = np.array(found[:1])
            else:
                new_br = np.column_stack([mids[:bad], mids[1:bad + 1]])
        else:
            new_br = np.column_stack([mids[:-1], mids[1:]])
        new_alpha = refine_many(char, new_br)
        brackets = np.vstack([brackets, new_br])
        alphas = np.concatenate([alphas, new_alpha])
    return brackets[:count]


def bracket_zeros(char: Characteristic, count: int):
    """Return ``count`` disjoint brackets, each holding one positive zero.

    For the interval the brackets are (pi(k-1), pi k); when alpha = 0 is an
    eigenvalue the first positive zero is the second one, and the brackets
    start from k = 2.
    """
    if count < 1:
        raise DomainError("count must be >= 1")
    if char.family == "interval1D":
        first = 2 if char.zero_mode else 1
        return _interval_brackets(char, count, first)
    return _bessel_brackets(char, count)


# -- refinement ---------------------------------------------------------------

def _refine_interval(char, brackets):
    lo, hi = brackets[:, 0].astype(float), brackets[:, 1].astype(float)
    # alpha_k lies in [pi(k-1), pi k] and solves phase = k pi
    k = np.ceil(hi / math.pi - 1e-9)
    target = k * math.pi
    x = 0.5 * (lo + hi)
    for _ in range(200):
        f = char.phase(x) - target
        lo = np.where(f < 0, x, lo)
        hi = np.where(f > 0, x, hi)
        step = f / char.phase_derivative(x)
        xn = x - step
        outside = (xn < lo) | (xn > hi)
        xn = np.where(outside, 0.5 * (lo + hi), xn)
        done = np.abs(xn - x) <= 1e-15 * np.maximum(np.abs(x), 1.0)
        x = xn
        if done.all():
            return x
    raise ConvergenceError("interval zero refinement did not converge")


def refine_many(char: Characteristic, brackets, rtol=1e-14, maxiter=200):
    """Vectorised safeguarded Newton refinement of bracketed zeros."""
    brackets = np.asarray(brackets, dtype=float).reshape(-1, 2)
    if len(brackets) == 0:
        return np.empty(0)
    if char.family == "interval1D":
        return _refine_interval(char, brackets)
    lo = brackets[:, 0].copy()
    hi = brackets[:, 1].copy()
    glo = char(lo)
    ghi = char(hi)
    if np.any(glo * ghi > 0):
        i = int(np.argmax(glo * ghi > 0))
        raise BracketError("no sign change on bracket", window=(lo[i], hi[i]))
    # secant-style start keeps Newton inside when g is nearly linear
    with np.errstate(invalid="ignore", divide="ignore"):
        x = np.where(glo != ghi, lo - glo * (hi - lo) / (ghi - glo), 0.5 * (lo + hi))
    x = np.where((x > lo) & (x < hi), x, 0.5 * (lo + hi))
    x = np.where(glo == 0, lo, np.where(ghi == 0, hi, x))
    active = np.ones(len(x), dtype=bool)
    for _ in range(maxiter):
        idx = np.nonzero(active)[0]
        if len(idx) == 0:
            return x
        xa = x[idx]
        g, dg = char.value_and_derivative(xa)
        same = np.sign(g) == np.sign(glo[idx])
        lo[idx] = np.where(same, xa, lo[idx])
        glo[idx] = np.where(same, g, glo[idx])
        hi[idx] = np.where(same, hi[idx], xa)
        with np.errstate(invalid="ignore", divide="ignore"):
            xn = xa - g / dg
        bad = ~np.isfinite(xn) | (xn <= lo[idx]) | (xn >= hi[idx])
        xn = np.where(bad, 0.5 * (lo[idx] + hi[idx]), xn)
        tol = rtol * np.abs(xa)
        done = (g == 0) | (np.abs(xn - xa) <= tol) | (hi[idx] - lo[idx] <= tol)
        x[idx] = np.where(g == 0, xa, xn)
        active[idx[done]] = False
        if not active.any():
            return _polish(char, x, lo, hi)
    raise ConvergenceError(f"zero refinement did not converge after {maxiter} iterations")


def _polish(char, x, lo, hi, steps=2):
    """Final Newton steps kept inside the brackets; takes roots to the rounding floor."""
    for _ in range(steps):
        g, dg = char.value_and_derivative(x)
        with np.errstate(invalid="ignore", divide="ignore"):
            xn = x - g / dg
        ok = np.isfinite(xn) & (xn >= lo) & (xn <= hi)
        x = np.where(ok, xn, x)
    return x


def refine_zero(char: Characteristic, bracket) -> float:
    """Refine one bracketed zero to relative accuracy ~1e-14."""
    return float(refine_many(char, np.asarray(bracket, dtype=float).reshape(1, 2))[0])


# -- tables and cache -----------------------------------------------------------

_cache = {}
_cache_lock = threading.Lock()


def _scaled_residual(char, alphas):
    g, dg = char.value_and_derivative(alphas)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.abs(g) / np.maximum(np.abs(dg) * alphas, np.finfo(float).tiny)
    return float(np.max(r)) if len(r) else 0.0


def _build_table(char, count):
    brackets = bracket_zeros(char, count)
    alphas = refine_many(char, brackets)
    if np.any(np.diff(alphas) <= 0):
        raise BracketError("zeros not strictly increasing; a root was missed or duplicated")
    notes = {}
    if char.zero_mode:
        notes["zero_mode"] = "alpha = 0 is an eigenvalue (constant mode); excluded from the table"
    return ZeroTable(char, alphas, brackets, _scaled_residual(char, alphas),
                     zero_mode=char.zero_mode, notes=notes)


def zero_table(char: Characteristic, count: int, use_cache=True) -> ZeroTable:
    """First ``count`` positive zeros of ``char``.

    Tables are cached per characteristic key; floating-point Robin
    parameters are compared bitwise, so 1.0 and 1.0000000000000002 are
    different keys.
    """
    if count < 1:
        raise DomainError("count must be >= 1")
    key = char.key()
    if use_cache:
        tab = _cache.get(key)
        if tab is not None and len(tab) >= count:
            return _slice(tab, count)
    tab = _build_table(char, count)
    if use_cache:
        with _cache_lock:
            old = _cache.get(key)
            if old is None or len(old) < len(tab):
                _cache[key] = tab
    return tab


def _slice(tab, count):
    if len(tab) == count:
        return tab
    return ZeroTable(tab.characteristic, tab.alphas[:count], tab.brackets[:count],
                     tab.residual_bound, tab.zero_mode, dict(tab.notes))


def clear_cache():
    with _cache_lock:
        _cache.clear()
