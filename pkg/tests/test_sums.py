import itertools
import math
from fractions import Fraction

import mpmath as mp
import numpy as np
import pytest

from specsum import sums
from specsum.errors import CoincidenceError, DomainError, PoleError, UnsupportedError, ValidityError
from specsum.oracle import SeriesSpec, compare, sum_series
from specsum.spectra import BoundaryCondition, RadialDomain
from specsum.sums import (DerivativeOrder, EtaQuery, characteristic_for, eta, eta_derivative,
                          eta_multi, eta_multi_recursive, eta_psi, heat_trace, interval_kernel,
                          interval_trace, inverse_j_polynomial, named_formula, power_sums,
                          zeta_even)

INF = math.inf


def _series(n, d, h, term, K=20000, decay="inverse_square"):
    """sum_k f(alpha_k) over the positive zeros of g_n with a tail model."""
    spec = SeriesSpec(term, decay, characteristic_for(n, d, h))
    return sum_series(spec, K).value


@pytest.mark.parametrize("n,d,h", [(0, 1, INF), (1, 1, 0.0), (0, 2, INF), (2, 2, 1.0), (0, 3, 10.0), (3, 3, 0.0)])
@pytest.mark.parametrize("branch", ["trigonometric", "hyperbolic"])
def test_eta_against_series(n, d, h, branch):
    z = 1.3
    sgn = 1.0 if branch == "trigonometric" else -1.0
    ref = sgn * _series(n, d, h, lambda k, al: 1.0 / (sgn * z * z - al**2))
    assert eta(EtaQuery(n, d, h, z, branch)) == pytest.approx(ref, rel=1e-8, abs=1e-10)


def test_eta_interval_closed_forms():
    # Dirichlet string: sum 1/(z^2 - (pi k)^2) = (z cot z - 1)/(2 z^2)
    for z in (0.4, 1.3, 2.9):
        assert eta(EtaQuery(0, 3, INF, z)) == pytest.approx((z / math.tan(z) - 1) / (2 * z * z), rel=1e-13)
        hyp = eta(EtaQuery(0, 3, INF, z, "hyperbolic"))
        assert hyp == pytest.approx((z / math.tanh(z) - 1) / (2 * z * z), rel=1e-13)


def test_psi_form_agrees():
    worst = 0.0
    for n in range(1, 11):
        for d in (1, 2, 3):
            if d == 1 and n > 1:
                continue
            for h in (0.0, 1.0, INF):
                for z in np.linspace(0.5, 20, 40):
                    try:
                        a = eta(EtaQuery(n, d, h, z))
                    except PoleError:
                        continue
                    b = eta_psi(n, d, h, z)
                    worst = max(worst, abs(a - b) / max(abs(a), 1e-300))
    assert worst <= 1e-10


def test_small_z_limits():
    assert power_sums(0, 2, INF, 1)[0] == pytest.approx(0.25, abs=1e-9)
    assert power_sums(0, 3, INF, 1)[0] == pytest.approx(1 / 6, abs=1e-9)
    assert power_sums(0, 2, 1.0, 1)[0] == pytest.approx(0.75, abs=1e-9)
    # trigonometric eta tends to minus those sums
    for n, d, h, s in [(0, 2, INF, 0.25), (0, 3, INF, 1 / 6), (0, 2, 1.0, 0.75)]:
        assert eta(EtaQuery(n, d, h, 1e-5)) == pytest.approx(-s, abs=1e-9)


def test_robin_sum_of_inverse_squares():
    for n in range(4):
        for h in (0.5, 1.0, 10.0):
            assert power_sums(n, 2, h, 1)[0] == pytest.approx((n + h + 2) / (4 * (n + 1) * (n + h)), abs=1e-9)


def test_derivative_examples():
    assert eta_derivative(0, 2, INF, 2.0, DerivativeOrder(0)) == pytest.approx(eta(EtaQuery(0, 2, INF, math.sqrt(2))), rel=1e-14)
    assert eta_derivative(0, 2, INF, 0.0, 1) == pytest.approx(1 / 32, abs=1e-12)
    spec = SeriesSpec(lambda k, al: 1.0 / (-4 - al**2) ** 3, "inverse_power",
                      characteristic_for(1, 2, 1.0), power=6)
    ref = sum_series(spec, 100000).value
    assert eta_derivative(1, 2, 1.0, -4.0, DerivativeOrder(2)) == pytest.approx(ref, rel=1e-9)


def test_derivative_order_three_against_series():
    spec = SeriesSpec(lambda k, al: 1.0 / (3.0 - al**2) ** 4, "inverse_power",
                      characteristic_for(0, 3, 2.0), power=8)
    ref = sum_series(spec, 20000).value
    assert eta_derivative(0, 3, 2.0, 3.0, 3) == pytest.approx(ref, rel=1e-9)


def test_multi_argument_examples():
    e1, e2 = eta(EtaQuery(0, 2, INF, 1.0)), eta(EtaQuery(0, 2, INF, 2.0))
    assert eta_multi(0, 2, INF, [1.0, 2.0]) == pytest.approx((e1 - e2) / (2**2 - 1**2), rel=1e-13)
    assert eta_multi(0, 2, INF, [1.7]) == eta(EtaQuery(0, 2, INF, 1.7))
    assert eta_multi_recursive(0, 2, INF, [1.0, 2.0]) == pytest.approx((e1 - e2) / 3, rel=1e-13)


def test_multi_argument_symmetry_and_series():
    zs = (0.7, 1.4, 3.1)
    spec = SeriesSpec(lambda k, al: 1.0 / np.prod([z * z - al**2 for z in zs], axis=0),
                      "inverse_power", characteristic_for(1, 2, INF), power=6)
    ref = sum_series(spec, 100000).value
    vals = [eta_multi(1, 2, INF, list(p)) for p in itertools.permutations(zs)]
    for v in vals:
        assert v == pytest.approx(ref, rel=1e-9)
    assert eta_multi_recursive(1, 2, INF, list(zs)) == pytest.approx(ref, rel=1e-9)
    hyp = eta_multi(1, 2, INF, list(zs), "hyperbolic")
    spec = SeriesSpec(lambda k, al: 1.0 / np.prod([z * z + al**2 for z in zs], axis=0),
                      "inverse_power", characteristic_for(1, 2, INF), power=6)
    assert hyp == pytest.approx(sum_series(spec, 100000).value, rel=1e-9)


def test_multi_argument_coincidence():
    with pytest.raises(CoincidenceError):
        eta_multi(0, 2, INF, [1.0, 1.0, 2.0])
    all_same = eta_multi(0, 2, INF, [1.1, 1.1])
    assert all_same == pytest.approx(eta_derivative(0, 2, INF, 1.21, 1), rel=1e-12)


def test_pole_guard():
    a1 = float(mp.besseljzero(0, 1))
    with pytest.raises(PoleError):
        eta(EtaQuery(0, 2, INF, a1))
    with pytest.raises(PoleError):
        eta(EtaQuery(0, 2, INF, a1 * (1 + 1e-9)))
    # the hyperbolic branch has no poles on the real axis
    assert math.isfinite(eta(EtaQuery(0, 2, INF, a1, "hyperbolic")))


def test_eta_domain_errors():
    with pytest.raises(DomainError):
        eta(EtaQuery(0, 4, INF, 1.0))
    with pytest.raises(DomainError):
        eta(EtaQuery(2, 1, INF, 1.0))
    with pytest.raises(DomainError):
        eta(EtaQuery(0, 2, -1.0, 1.0))
    with pytest.raises(DomainError):
        eta(EtaQuery(0, 2, INF, 1.0, "elliptic"))


def test_zeta_values():
    assert zeta_even(1) == pytest.approx(math.pi**2 / 6, rel=1e-12)
    assert zeta_even(2) == pytest.approx(math.pi**4 / 90, rel=1e-12)
    for m in (3, 4, 5):
        assert zeta_even(m) == pytest.approx(float(mp.zeta(2 * m)), rel=1e-11)


def test_interval_heat_trace():
    dom = RadialDomain("interval")
    dd = heat_trace(dom, BoundaryCondition(INF, INF), 1.0)
    assert dd.value == pytest.approx(1 / (2 * math.tanh(1)) - 0.5, rel=1e-13)
    assert dd.value == pytest.approx(0.1565176427, abs=1e-10)
    nn = heat_trace(dom, BoundaryCondition(0.0, 0.0), 1.0)
    assert nn.value == pytest.approx((math.cosh(1) + math.sinh(1)) / (2 * math.sinh(1)), rel=1e-13)
    # zero mode 1/z^2 plus the same positive spectrum pi k as Dirichlet
    series = 1.0 + math.fsum(1.0 / (1 + (math.pi * k) ** 2) for k in range(1, 200000))
    assert nn.value == pytest.approx(series, rel=1e-6)
    scaled = heat_trace(RadialDomain("interval", 0.0, 2.0), BoundaryCondition(INF, INF), 3.0, D=0.5)
    z = math.sqrt(3.0 / 0.5) * 2
    assert scaled.value == pytest.approx(interval_trace(INF, INF, z) * 4 / 0.5, rel=1e-14)


def test_disk_heat_trace_is_partial_and_growing():
    dom, bc = RadialDomain("disk"), BoundaryCondition(INF, INF)
    a = heat_trace(dom, bc, 4.0, N=10)
    b = heat_trace(dom, bc, 4.0, N=20)
    assert a.diverges and b.value > a.value
    assert b.tail_estimate > 0
    with pytest.raises(ValidityError):
        heat_trace(dom, bc, -1.0)


def test_interval_kernel_matches_mode_sum():
    from specsum.oracle import kernel_series

    h0, hb, z = 0.7, 3.0, 1.9
    for x, x0 in [(0.2, 0.7), (0.5, 0.5), (0.0, 1.0)]:
        ref = kernel_series(RadialDomain("interval"), BoundaryCondition(h0, hb), 0, z, x, x0, K=20000)
        assert interval_kernel(h0, hb, z, x, x0) == pytest.approx(ref.value, rel=1e-8)


def test_inverse_j_polynomial():
    assert inverse_j_polynomial(0) == {}
    # z^2/J_2 = 8 + 2 z^2/3 + ..., so only the z^-2 term is singular
    assert inverse_j_polynomial(2) == {2: Fraction(8)}
    # principal part of 1/J_3 at 0: 48/z^3 + 3/z (from z^3/J_3 = 48 + 3 z^2 + ...)
    p3 = inverse_j_polynomial(3)
    assert p3 == {3: Fraction(48), 1: Fraction(3)}
    z = 1e-3
    assert 1 / float(mp.besselj(3, z)) - (48 / z**3 + 3 / z) == pytest.approx(0, abs=1e-2)


def test_named_examples():
    assert named_formula("Sneddon-R", {"m": 0, "nu": 0, "h": 2})[0] == pytest.approx(0.25)
    assert named_formula("Zeta-2")[0] == pytest.approx(math.pi**2 / 6, rel=1e-12)
    assert named_formula("Zeta-4")[0] == pytest.approx(math.pi**4 / 90, rel=1e-12)
    assert named_formula("Sine-D1")[0] == 0.5
    with pytest.raises(UnsupportedError):
        named_formula("D13")
    with pytest.raises(ValidityError):
        named_formula("Sneddon-N", {"m": 1, "nu": 0})


@pytest.mark.parametrize("fid,params,K", [
    ("D8", {"n": 0, "h": INF, "z": 1.3}, 20000),
    ("Calogero-2D", {"nu": 0, "h": 1.0, "j": 1}, 100000),
    ("Zeta-2", {}, 20000),
    ("Sine-D1", {}, 20000),
    ("Sine-R", {"h": 1.5}, 20000),
    ("Sneddon-R", {"m": 3, "nu": 1, "h": 0.5}, 20000),
    ("BesselRatio", {"nu": 0.5, "z": 1.1}, 20000),
    ("InverseJ", {"n": 2, "z": 1.1}, 20000),
])
def test_compare_passes(fid, params, K):
    rec = compare(fid, params, K=K, tol=1e-7)
    assert rec.passed, rec


def test_dirichlet_trace_identities_match_per_mode_traces():
    from specsum.kernels import trace_per_n

    for fid, family in (("D8", "disk"), ("S8", "ball")):
        for n in (0, 1, 2):
            for z in (0.5, 1.3, 3.7):
                closed, _ = named_formula(fid, {"n": n, "h": INF, "z": z})
                per_n = trace_per_n(RadialDomain(family), BoundaryCondition(INF, INF), n, z)
                assert per_n == pytest.approx(closed, rel=1e-10)


def test_kneser_sommerfeld_symmetry():
    for fid in ("KneserSommerfeld-2D", "KneserSommerfeld-3D"):
        for n in (0, 2):
            a = named_formula(fid, {"n": n, "x": 0.2, "x0": 0.7, "z": 1.3})[0]
            b = named_formula(fid, {"n": n, "x": 0.7, "x0": 0.2, "z": 1.3})[0]
            assert a == pytest.approx(b, rel=1e-14)


def test_half_order_reduces_to_interval():
    # zeros of J_{1/2} are pi k, so the order-1/2 Fourier-Bessel sums are the Dirichlet string sums
    for z in (0.5, 1.3, 3.7):
        dd_string = interval_trace(INF, INF, z)
        assert eta(EtaQuery(0, 3, INF, z, "hyperbolic")) == pytest.approx(dd_string, rel=1e-10)
        ratio = named_formula("BesselRatio", {"nu": 0.5, "z": z})[0]
        # J_{3/2}/J_{1/2} = 1/z - cot z = 2 z sum 1/(alpha^2 - z^2)
        assert ratio == pytest.approx(1 / z - 1 / math.tan(z), rel=1e-10)
        assert ratio == pytest.approx(-2 * z * eta(EtaQuery(0, 3, INF, z)), rel=1e-10)
