"""Radial eigenproblems of the Laplacian on interval, disk, ball, annulus and shell.

Lengths are physical (a, b); zeros alpha are dimensionless with
lambda = (alpha / b)**2. Radial profiles are evaluated in r and are not
normalised; ``c_squared`` is the factor with  int omega(r) u(r)^2 dr = 1/c^2,
omega(r) = r^(d-1).
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import specfun
from .errors import DegenerateError, DomainError, UnsupportedError
from .zeros import Characteristic, zero_table

INF = math.inf

_FAMILY = {
    "interval": "interval1D",
    "disk": "disk2D",
    "ball": "ball3D",
    "annulus": "annulus2D",
    "shell": "shell3D",
}
DIMENSION = {"interval": 1, "disk": 2, "ball": 3, "annulus": 2, "shell": 3, "exterior_disk": 2}


@dataclass(frozen=True)
class RadialDomain:
    """Geometry selector. ``a`` is the inner radius (0 for interval/disk/ball).

    For ``exterior_disk`` only ``a`` (the disk radius) is meaningful and b is inf.
    """

    family: str
    a: float = 0.0
    b: float = 1.0

    def __post_init__(self):
        if self.family not in DIMENSION:
            raise DomainError(f"unknown domain family {self.family!r}")
        if self.family in ("interval", "disk", "ball"):
            if self.a != 0:
                raise DomainError(f"{self.family}: inner radius must be 0")
            if not self.b > 0:
                raise DomainError("outer radius must be > 0")
        elif self.family == "exterior_disk":
            if not self.a > 0:
                raise DomainError("exterior disk needs a > 0")
            object.__setattr__(self, "b", INF)
        elif not 0 < self.a < self.b:
            raise DomainError(f"{self.family}: need 0 < a < b")

    @property
    def dim(self):
        return DIMENSION[self.family]

    @property
    def ratio(self):
        return self.a / self.b if self.family in ("annulus", "shell") else 0.0

    def degeneracy(self, n):
        """Angular multiplicity of mode n: 2 - delta_{n0} in 2D, 2n + 1 in 3D."""
        if self.dim == 1:
            return 1
        if self.dim == 2:
            return 1 if n == 0 else 2
        return 2 * n + 1


@dataclass(frozen=True)
class BoundaryCondition:
    """Robin parameters h = b/ell at each end; inf is Dirichlet, 0 is Neumann.

    ``h_inner`` applies at r = 0 for the interval and at r = a for annulus and
    shell. It is ignored for disk and ball.
    """

    h_inner: float = INF
    h_outer: float = INF

    def __post_init__(self):
        if self.h_inner < 0 or self.h_outer < 0 or math.isnan(self.h_inner) or math.isnan(self.h_outer):
            raise DomainError("Robin parameters must be >= 0")

    @classmethod
    def from_lengths(cls, ell_inner, ell_outer, b):
        """Build from Robin lengths (0 is Dirichlet, inf is Neumann)."""
        def h(ell):
            if ell == 0:
                return INF
            return 0.0 if math.isinf(ell) else b / ell
        return cls(h(ell_inner), h(ell_outer))

    def lengths(self, b):
        """Robin lengths (ell_inner, ell_outer) for outer radius b."""
        def ell(h):
            if math.isinf(h):
                return 0.0
            return INF if h == 0 else b / h
        return ell(self.h_inner), ell(self.h_outer)


@dataclass
class EigenMode:
    n: int
    k: int
    alpha: float
    lam: float
    c_squared: float = float("nan")
    profile: dict = field(default_factory=dict)
    zero_mode: bool = False


def characteristic_of(domain: RadialDomain, bc: BoundaryCondition, n: int = 0) -> Characteristic:
    if domain.family == "exterior_disk":
        raise UnsupportedError("exterior of a disk has a continuous spectrum; no zero table")
    fam = _FAMILY[domain.family]
    if domain.family == "interval":
        n = 0
    h_in = bc.h_inner if domain.family in ("interval", "annulus", "shell") else INF
    return Characteristic(fam, int(n), h_in, bc.h_outer, domain.ratio)


def _profile(domain, bc, n, alpha):
    """Coefficients of the radial combination for a refined root."""
    if domain.family == "interval":
        return {"theta": math.atan2(alpha, bc.h_inner)}
    if domain.family in ("disk", "ball"):
        return {"A": 1.0, "B": 0.0}
    reg, sing = specfun.pair_for(domain.dim, modified=False)
    h = bc.h_outer

    def outer(kind):
        f = float(specfun.bessel(kind, n, alpha))
        if math.isinf(h):
            return f
        return alpha * float(specfun.bessel(kind, n, alpha, derivative=True)) + h * f

    by, bj = outer(sing), outer(reg)
    s = math.hypot(by, bj)
    return {"A": by / s, "B": -bj / s}


def _radial(domain, n, alpha, profile, x, derivative=False):
    """Profile value (or d/dx) at dimensionless x = r/b."""
    x = np.asarray(x, dtype=float)
    if domain.family == "interval":
        th = profile["theta"]
        if derivative:
            return alpha * np.cos(alpha * x + th)
        return np.sin(alpha * x + th)
    reg, sing = specfun.pair_for(domain.dim, modified=False)
    t = alpha * x
    out = profile["A"] * specfun.bessel(reg, n, t, derivative)
    if profile["B"] != 0.0:
        out = out + profile["B"] * specfun.bessel(sing, n, t, derivative)
    return out * alpha if derivative else out


def _zero_mode_c2(domain):
    b, rho = domain.b, domain.ratio
    return {
        "interval": 1.0 / b,
        "disk": 2.0 / b**2,
        "ball": 3.0 / b**3,
        "annulus": 2.0 / (b**2 * (1 - rho**2)),
        "shell": 3.0 / (b**3 * (1 - rho**3)),
    }[domain.family]


def normalization(mode: EigenMode, domain: RadialDomain, bc: BoundaryCondition) -> float:
    """Closed-form c^2 with  int_a^b omega(r) u(r)^2 dr = 1 / c^2."""
    if mode.zero_mode:
        return _zero_mode_c2(domain)
    a, n, p = mode.alpha, mode.n, mode.profile
    fam = domain.family
    if fam == "interval":
        th = p["theta"]
        norm = 0.5 - (math.sin(2 * (a + th)) - math.sin(2 * th)) / (4 * a)
        scale = domain.b
    else:
        def prim(x):
            # antiderivative of x^(d-1) U(a x)^2 for a cylinder function U
            u = float(_radial(domain, n, a, p, x))
            up = float(_radial(domain, n, a, p, x, derivative=True)) / a
            t = a * x
            if domain.dim == 2:
                return 0.5 * x * x * (up * up + (1 - n * n / (t * t)) * u * u)
            return 0.5 * x**3 * (up * up + u * up / t + (1 - n * (n + 1) / (t * t)) * u * u)

        norm = prim(1.0) - (prim(domain.ratio) if fam in ("annulus", "shell") else 0.0)
        scale = domain.b ** domain.dim
    if not norm > 1e-300:
        raise DegenerateError(f"normalisation integral vanished for mode (n={n}, alpha={a})")
    return 1.0 / (scale * norm)


def eigenvalues(domain: RadialDomain, bc: BoundaryCondition, n: int, count: int):
    """First ``count`` eigenmodes at angular index n, ascending in lambda.

    When the constant function is an eigenfunction it appears first with
    lambda = 0 and ``zero_mode`` set.
    """
    char = characteristic_of(domain, bc, n)
    modes = []
    if char.zero_mode:
        m = EigenMode(n, 1, 0.0, 0.0, zero_mode=True, profile={"constant": 1.0})
        m.c_squared = _zero_mode_c2(domain)
        modes.append(m)
    need = count - len(modes)
    if need > 0:
        tab = zero_table(char, need)
        for alpha in tab.alphas:
            alpha = float(alpha)
            m = EigenMode(n, len(modes) + 1, alpha, (alpha / domain.b) ** 2,
                          profile=_profile(domain, bc, n, alpha))
            m.c_squared = normalization(m, domain, bc)
            modes.append(m)
    return modes[:count]


def eigenfunction(mode: EigenMode, domain: RadialDomain, bc: BoundaryCondition, r):
    """Unnormalised radial profile u(r); vectorised in r."""
    r = np.asarray(r, dtype=float)
    lo = domain.a
    if np.any(r < lo * (1 - 1e-14)) or np.any(r > domain.b * (1 + 1e-14)):
        raise DomainError("r outside [a, b]")
    if mode.zero_mode:
        return np.ones_like(r)
    return _radial(domain, mode.n, mode.alpha, mode.profile, r / domain.b)


def eigenfunction_derivative(mode: EigenMode, domain: RadialDomain, bc: BoundaryCondition, r):
    """du/dr of the radial profile."""
    r = np.asarray(r, dtype=float)
    if mode.zero_mode:
        return np.zeros_like(r)
    return _radial(domain, mode.n, mode.alpha, mode.profile, r / domain.b, derivative=True) / domain.b


# -- bulk access used by the series oracle ------------------------------------

@dataclass
class ModeArrays:
    """Vectorised view of many modes at fixed n: zeros, lambdas, c^2 and profile coefficients."""

    domain: RadialDomain
    bc: BoundaryCondition
    n: int
    alpha: np.ndarray
    c2: np.ndarray
    coef: dict
    zero_mode: bool

    def profile(self, r):
        """Matrix u_k(r) of shape (len(alpha),) for scalar r."""
        x = float(r) / self.domain.b
        dom = self.domain
        al = self.alpha[1:] if self.zero_mode else self.alpha
        if dom.family == "interval":
            u = np.sin(al * x + self.coef["theta"])
        else:
            reg, sing = specfun.pair_for(dom.dim, modified=False)
            t = al * x
            u = self.coef["A"] * specfun.bessel(reg, self.n, t)
            if dom.family in ("annulus", "shell"):
                u = u + self.coef["B"] * specfun.bessel(sing, self.n, t)
        if self.zero_mode:
            u = np.concatenate([[1.0], u])
        return u


def mode_arrays(domain: RadialDomain, bc: BoundaryCondition, n: int, count: int) -> ModeArrays:
    """Zeros, normalisations and profile coefficients for ``count`` positive modes.

    Vectorised counterpart of :func:`eigenvalues`; the zero mode (if any) is
    prepended to ``alpha`` as 0 and to ``c2`` with its constant-mode value.
    """
    char = characteristic_of(domain, bc, n)
    tab = zero_table(char, count)
    al = tab.alphas.astype(float)
    fam = domain.family
    if fam == "interval":
        th = np.arctan2(al, bc.h_inner)
        norm = 0.5 - (np.sin(2 * (al + th)) - np.sin(2 * th)) / (4 * al)
        c2 = 1.0 / (domain.b * norm)
        coef = {"theta": th}
    else:
        reg, sing = specfun.pair_for(domain.dim, modified=False)
        if fam in ("disk", "ball"):
            A, B = np.ones_like(al), np.zeros_like(al)
        else:
            h = bc.h_outer

            def outer(kind):
                f = specfun.bessel(kind, n, al)
                if math.isinf(h):
                    return f
                return al * specfun.bessel(kind, n, al, derivative=True) + h * f

            by, bj = outer(sing), outer(reg)
            s = np.hypot(by, bj)
            A, B = by / s, -bj / s

        def prim(x):
            t = al * x
            u = A * specfun.bessel(reg, n, t)
            up = A * specfun.bessel(reg, n, t, derivative=True)
            if fam in ("annulus", "shell"):
                u = u + B * specfun.bessel(sing, n, t)
                up = up + B * specfun.bessel(sing, n, t, derivative=True)
            if domain.dim == 2:
                return 0.5 * x * x * (up * up + (1 - n * n / (t * t)) * u * u)
            return 0.5 * x**3 * (up * up + u * up / t + (1 - n * (n + 1) / (t * t)) * u * u)

        norm = prim(1.0) - (prim(domain.ratio) if fam in ("annulus", "shell") else 0.0)
        c2 = 1.0 / (domain.b ** domain.dim * norm)
        coef = {"A": A, "B": B}
    if char.zero_mode:
        al = np.concatenate([[0.0], al])
        c2 = np.concatenate([[_zero_mode_c2(domain)], c2])
    return ModeArrays(domain, bc, int(n), al, c2, coef, char.zero_mode)
