"""Brute-force series evaluation with tail correction.

A :class:`SeriesSpec` describes sum_k term(k, alpha_k) over the zeros of a
characteristic function. :func:`sum_series` sums K terms with correctly
rounded (fsum) arithmetic and adds a tail model:

* the smooth part of the terms is assumed to behave like c / alpha^p, with
  alpha_k following an affine fit alpha ~ s k + phi on the last zeros, and
  its remainder is integrated from k + 1/2;
* oscillating parts are removed by averaging the corrected partial sums over
  a Hann window covering the last tenth of the terms (a smoothed Cesaro mean).
  Sign-alternating series without a usable power law ("oscillatory") rely
  on this average alone.

The reported ``tail_estimate`` is the change of the corrected value between
K/2 and K terms, which bounds the remaining error whenever that error
decreases at least linearly in 1/K.
"""

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from .errors import DomainError, NonConvergence
from .zeros import Characteristic, zero_table

DECAY_POWER = {
    "inverse_square": 2,
    "inverse_quartic": 4,
    "oscillatory_inverse_square": 2,
    "oscillatory_inverse": 1,
    "oscillatory": 0,
    "inverse_power": None,  # exponent given by SeriesSpec.power
    "exponential": None,
}

REPORT_VERSION = "specsum-report/1"


@dataclass
class SeriesSpec:
    """Series sum_{k >= 1} term(k, alpha_k) + extra.

    ``zero_source`` is a :class:`Characteristic` (positive zeros), a callable
    returning the first K abscissae, or None for alpha_k = k. ``extra`` holds
    terms added exactly (for instance a zero-mode contribution). ``power``
    overrides the decay exponent of the class (used by "inverse_power").
    """

    term: Callable[[np.ndarray, np.ndarray], np.ndarray]
    decay_class: str
    zero_source: Union[Characteristic, Callable[[int], np.ndarray], None] = None
    extra: float = 0.0
    description: str = ""
    power: Optional[float] = None

    def __post_init__(self):
        if self.decay_class not in DECAY_POWER:
            raise DomainError(f"unknown decay class {self.decay_class!r}")
        if self.decay_class == "inverse_power" and not (self.power and self.power > 1):
            raise DomainError("decay class 'inverse_power' needs power > 1")

    @property
    def decay_power(self):
        if self.power is not None:
            return self.power
        return DECAY_POWER[self.decay_class]

    def abscissae(self, count):
        src = self.zero_source
        if src is None:
            return np.arange(1, count + 1, dtype=float)
        if isinstance(src, Characteristic):
            return zero_table(src, count).alphas
        return np.asarray(src(count), dtype=float)[:count]


@dataclass
class SumResult:
    value: float
    terms_used: int
    tail_estimate: float
    converged: bool
    partial: float = float("nan")
    tail: float = 0.0


def compensated_sum(values):
    """Neumaier-compensated sum in a fixed order (deterministic)."""
    s = 0.0
    c = 0.0
    for v in np.asarray(values, dtype=float).ravel():
        t = s + v
        if abs(s) >= abs(v):
            c += (s - t) + v
        else:
            c += (v - t) + s
        s = t
    return s + c


def _hann(m):
    w = np.sin(np.pi * (np.arange(m) + 0.5) / m) ** 2
    return w / w.sum()


def _corrected(terms, alphas, power, total):
    """Tail-corrected value using the first len(terms) terms."""
    K = len(terms)
    if power is None:
        return total, 0.0
    M = max(8, K // 10)
    w = _hann(M)
    idx = np.arange(K - M, K)
    labels = idx + 1.0  # 1-based index of the last term in each partial sum
    # partial sums S_L for L in the window, from the exact total
    rev = np.cumsum(terms[::-1])[::-1]  # rev[i] = sum_{j >= i} t_j
    after = np.concatenate([rev[1:], [0.0]])
    partial = total - after[idx]
    if power <= 1:
        tail = np.zeros(M)
    else:
        nfit = min(100, K)
        kk = np.arange(K - nfit, K) + 1.0
        s, phi = np.polyfit(kk, alphas[-nfit:], 1)
        if s <= 0:
            raise NonConvergence("abscissae are not increasing")
        c = float(np.dot(w, terms[idx] * alphas[idx] ** power))
        tail = c * (s * (labels + 0.5) + phi) ** (1 - power) / (s * (power - 1))
    corrected = partial + tail
    return float(np.dot(w, corrected)), float(np.dot(w, tail))


def _check_decay(terms, alphas, power):
    """Ratio test over the last decade: |term| alpha^power must not grow from k ~ K/10 to K."""
    if power is None:
        return
    K = len(terms)
    W = max(8, K // 20)
    if K < 10 * W // 5 + W:
        return
    env = np.abs(terms) * alphas**power
    early = env[K // 10:K // 10 + W].mean()
    late = env[-W:].mean()
    if late > 3.0 * early + 1e-300 and late > 1e-300:
        raise NonConvergence(
            f"terms decay slower than alpha^-{power} (envelope ratio {late / early:.3g} over the last decade)"
        )


def sum_series(spec: SeriesSpec, K: int, tol: float = 1e-10) -> SumResult:
    """Sum K terms of ``spec`` and add the tail model."""
    if K < 100:
        raise DomainError("K must be >= 100")
    alphas = spec.abscissae(K)
    k = np.arange(1, K + 1)
    terms = np.asarray(spec.term(k, alphas), dtype=float)
    if not np.all(np.isfinite(terms)):
        raise NonConvergence("non-finite series term")
    power = spec.decay_power
    _check_decay(terms, alphas, power)
    total = math.fsum(terms)
    half = K // 2
    total_half = math.fsum(terms[:half])
    if power is None:
        value, tail = total, 0.0
        # geometric tail bound from the last two terms
        t1, t0 = abs(terms[-1]), abs(terms[-2])
        r = t1 / t0 if t0 > 0 else 0.0
        est = t1 * r / (1 - r) if r < 1 else float("inf")
    else:
        value, tail = _corrected(terms, alphas, power, total)
        value_half, _ = _corrected(terms[:half], alphas[:half], power, total_half)
        est = abs(value - value_half)
    est += 4 * np.finfo(float).eps * math.fsum(np.abs(terms))
    value += spec.extra
    return SumResult(value=value, terms_used=K, tail_estimate=float(est),
                     converged=bool(est <= tol * max(abs(value), 1.0)),
                     partial=total + spec.extra, tail=tail)


@dataclass
class VerificationRecord:
    formula_id: str
    params: dict
    closed: float
    oracle: float
    abs_err: float
    rel_err: float
    terms: int
    tail_est: float
    passed: bool
    notes: dict = field(default_factory=dict)

    def to_dict(self):
        d = asdict(self)
        d["pass"] = d.pop("passed")
        d.pop("notes")
        return d


def judge(closed, result: SumResult, tol):
    """Pass rule: |closed - oracle| <= max(tol |closed|, 10 tail_estimate, 1e-12)."""
    err = abs(closed - result.value)
    bound = max(tol * abs(closed), 10 * result.tail_estimate, 1e-12)
    return err, err <= bound


def compare(formula_id: str, params: Optional[dict] = None, K: int = 20000, tol: float = 1e-6):
    """Evaluate a registered identity in closed form and by series."""
    from .sums import named_formula

    params = dict(params or {})
    closed, spec = named_formula(formula_id, params)
    res = sum_series(spec, K, tol)
    err, ok = judge(closed, res, tol)
    rel = err / abs(closed) if closed != 0 else float("inf") if err else 0.0
    return VerificationRecord(formula_id, params, float(closed), float(res.value), float(err),
                              float(rel), K, float(res.tail_estimate), bool(ok))


def kernel_series(domain, bc, n, q, r, r0, K=4000, tol=1e-10) -> SumResult:
    """sum_k c_k^2 u_k(r) u_k(r0) / (q^2 + lambda_k) from the eigenmodes.

    Terms come from the zero table and closed-form normalisations only; the
    zero mode (if any) is added exactly.
    """
    from .spectra import mode_arrays

    ma = mode_arrays(domain, bc, n, K)
    ur, ur0 = ma.profile(r), ma.profile(r0)
    # profiles vanish exactly at Dirichlet ends; the refined zeros leave rounding noise
    inner = domain.a if domain.family in ("annulus", "shell") else 0.0
    for x, u in ((r, ur), (r0, ur0)):
        at_outer = x == domain.b and math.isinf(bc.h_outer)
        at_inner = (x == inner and math.isinf(bc.h_inner)
                    and domain.family in ("interval", "annulus", "shell"))
        if at_outer or at_inner:
            u[:] = 0.0
    lam = (ma.alpha / domain.b) ** 2
    vals = ma.c2 * ur * ur0 / (q * q + lam)
    extra = 0.0
    if ma.zero_mode:
        extra, vals, alphas = float(vals[0]), vals[1:], ma.alpha[1:]
    else:
        alphas = ma.alpha
    same = abs(r - r0) <= 1e-12 * max(abs(r), abs(r0), 1.0)
    if min(r, r0) == 0 and domain.dim > 1:
        # u_k(0) does not decay while c_k^2 grows: alpha^-3/2 (2D) or alpha^-1 (3D)
        cls = "oscillatory"
    else:
        cls = "inverse_square" if same else "oscillatory_inverse_square"
    spec = SeriesSpec(term=lambda k, al: vals[k - 1], decay_class=cls,
                      zero_source=lambda count: alphas[:count], extra=extra,
                      description=f"{domain.family} n={n} eigen-expansion")
    return sum_series(spec, K, tol)


# -- verification suites ---------------------------------------------------------

SUITES = ("table2", "table3", "tables", "rayleigh", "sneddon", "calogero", "special", "sums", "all")
TABLE3_GRID = {"n": (0, 1, 2, 5), "h": (0.0, 1.0, 10.0), "z": (0.5, 1.3, 3.7),
               "xx0": ((0.2, 0.7), (0.5, 0.5), (1.0, 1.0))}
TABLE2_POINTS = (0.0, 0.3, 0.7, 1.0)
TABLE2_Z = (0.5, 1.0, 2.0, 5.0)


@dataclass(frozen=True)
class Case:
    """One identity check: formula id, parameters, oracle terms and tolerance."""

    formula_id: str
    params: dict
    K: int
    tol: float
    abs_floor: float = 1e-12


def _table3_cases(grid=TABLE3_GRID):
    for d in "DS":
        for idx in range(1, 13):
            hs = grid["h"] if idx <= 6 else (math.inf,)
            trace = idx in (2, 5, 8, 11)
            for n in grid["n"]:
                for h in hs:
                    for z in grid["z"]:
                        for x, x0 in ((grid["xx0"][0],) if trace else grid["xx0"]):
                            params = dict(n=n, h=h, z=z) if trace else dict(n=n, h=h, z=z, x=x, x0=x0)
                            yield Case(f"{d}{idx}", params, 20000, 1e-6, 1e-9)


def _table2_cases():
    for a in "RND":
        for b in "RND":
            cell = a + b
            hs = (0.5, 2.0) if "R" in cell else (1.0,)
            for h in hs:
                for z in TABLE2_Z:
                    yield Case(f"T2Z-{cell}", dict(h=h, z=z), 100000, 1e-8)
                    for x in TABLE2_POINTS:
                        for x0 in TABLE2_POINTS:
                            yield Case(f"T2-{cell}", dict(h=h, z=z, x=x, x0=x0), 100000, 1e-8)


def _rayleigh_cases():
    for nu in (0.0, 1.0, 2.0, 2.5):
        for m in (1, 2):
            yield Case("Rayleigh", dict(nu=nu, m=m), 10000, 0.0, 1e-9)
    for n in range(4):
        for h in (0.5, 1.0, 10.0):
            yield Case("Rayleigh", dict(n=n, h=h, m=1), 10000, 0.0, 1e-9)


def _sneddon_cases():
    for nu in (0.0, 0.5, 1.0, 2.0):
        for m in (1, 2, 3, 4):
            yield Case("Sneddon-D", dict(nu=nu, m=m), 20000, 1e-8)
        for m in (1, 2, 3):
            yield Case("Sneddon-DJ", dict(nu=nu, m=m), 20000, 1e-8)
        if nu > 0:
            for m in (1, 2, 3, 4):
                yield Case("Sneddon-N", dict(nu=nu, m=m), 20000, 1e-8)
            for m in (1, 2, 3):
                yield Case("Sneddon-NJ", dict(nu=nu, m=m), 20000, 1e-8)
        for h in (0.5, 2.0):
            for m in (0, 1, 2, 3):
                yield Case("Sneddon-R", dict(nu=nu, h=h, m=m), 20000, 1e-8)


def _calogero_cases():
    for fid in ("Calogero-2D", "Calogero-3D"):
        for n in (0, 1):
            for h in (0.0, 1.0, math.inf):
                for j in range(1, 6):
                    yield Case(fid, dict(n=n, nu=n, h=h, j=j), 100000, 1e-7)


def _special_cases():
    yield Case("Zeta-2", {}, 20000, 1e-8)
    yield Case("Zeta-4", {}, 20000, 1e-8)
    for nu in (0.0, 0.5, 1.0, 2.5):
        for z in (0.5, 1.3, 3.7):
            yield Case("BesselRatio", dict(nu=nu, z=z), 20000, 1e-8)
    for n in range(5):
        for z in (0.5, 1.3, 3.7):
            yield Case("InverseJ", dict(n=n, z=z), 20000, 1e-7)
    yield Case("Sine-D1", {}, 20000, 1e-8)
    yield Case("Sine-D2", {}, 20000, 1e-8)
    for h in (0.5, 1.0, 3.0):
        yield Case("Sine-R", dict(h=h), 20000, 1e-8)


def suite_cases(name):
    """Cases of a named suite, in a fixed order."""
    parts = {
        "table2": (_table2_cases,), "table3": (_table3_cases,),
        "tables": (_table2_cases, _table3_cases),
        "rayleigh": (_rayleigh_cases,), "sneddon": (_sneddon_cases,),
        "calogero": (_calogero_cases,), "special": (_special_cases,),
        "sums": (_rayleigh_cases, _sneddon_cases, _calogero_cases, _special_cases),
    }
    parts["all"] = parts["tables"] + parts["sums"]
    if name not in parts:
        raise DomainError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    return [c for gen in parts[name] for c in gen()]


def check_case(case: Case, tol=None, K=None):
    """Run one case; returns a record or None when the identity does not apply.

    Inapplicable points are those the closed form rejects: trigonometric
    identities at arguments within the pole guard and boundary points where
    the expansion does not converge pointwise. A record passes when
    |closed - oracle| <= max(tol |closed|, abs_floor).
    """
    from .errors import PoleError, ValidityError

    tol = case.tol if tol is None else tol
    try:
        rec = compare(case.formula_id, case.params, K=K or case.K, tol=tol)
    except (PoleError, ValidityError):
        return None
    rec.passed = bool(rec.abs_err <= max(tol * abs(rec.closed), case.abs_floor))
    return rec


def run_suite(name, tol=None, K=None):
    """Records for every applicable case of a suite (fixed order)."""
    out = []
    for case in suite_cases(name):
        rec = check_case(case, tol, K)
        if rec is not None:
            out.append(rec)
    return out
