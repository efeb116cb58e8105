"""Acceptance criteria 1-10, one test and one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -s -v`` to see the summary lines,
or ``python tests/test_acceptance.py`` for the lines alone.
"""
import math

import mpmath as mp
import numpy as np
import pytest

from specsum import specfun
from specsum.kernels import (RadialProblem, expand, kernel_value, power_coefficients, reconstruct,
                             trace_per_n, trace_quadrature)
from specsum.oracle import check_case, kernel_series, suite_cases
from specsum.spectra import BoundaryCondition, RadialDomain
from specsum.sums import named_formula, zeta_even

INF = math.inf
DD, NN, RR = BoundaryCondition(INF, INF), BoundaryCondition(0.0, 0.0), BoundaryCondition(1.0, 1.0)
FAMILIES = (("interval", 0.0), ("disk", 0.0), ("ball", 0.0), ("annulus", 0.3), ("shell", 0.3))


def _suite(name, tol=None, K=None):
    """(passed, detail) for a suite; every applicable case must pass.

    The detail reports the largest error as a fraction of the allowed error
    max(tol |closed|, abs_floor), so values below 1 pass.
    """
    checked = failed = 0
    worst = 0.0
    for case in suite_cases(name):
        rec = check_case(case, tol, K)
        if rec is None:
            continue
        checked += 1
        failed += not rec.passed
        allowed = max((case.tol if tol is None else tol) * abs(rec.closed), case.abs_floor)
        worst = max(worst, rec.abs_err / allowed)
    return failed == 0 and checked > 0, f"{checked - failed}/{checked} cases, worst err/allowed {worst:.2e}"


def criterion_1():
    return _suite("rayleigh", K=10000)


def criterion_2():
    errs = [abs(zeta_even(1) - math.pi**2 / 6), abs(zeta_even(2) - math.pi**4 / 90)]
    return max(errs) <= 1e-10, f"|err| zeta(2) {errs[0]:.1e}, zeta(4) {errs[1]:.1e}"


def criterion_3():
    return _suite("table2", tol=1e-8, K=100000)


def criterion_4():
    return _suite("table3", tol=1e-6)


def criterion_5():
    return _suite("calogero", tol=1e-7, K=100000)


def criterion_6():
    ok, detail = _suite("sneddon", tol=1e-8)
    # the m = 3 Robin constant, fixed independently of the oracle: nu = 0, h = 2 gives 28/3072
    closed, _ = named_formula("Sneddon-R", dict(nu=0.0, h=2.0, m=3))
    const_ok = abs(closed - 28 / 3072) <= 1e-14
    return ok and const_ok, f"{detail}; Robin m=3 at nu=0, h=2: {closed:.10f} (28/3072)"


def criterion_7():
    worst = 0.0
    count = 0
    for family, a in FAMILIES:
        dom = RadialDomain(family, a, 1.0)
        span = 1.0 - a
        pts = [(a + 0.25 * span, a + 0.6 * span), (a + 0.5 * span, a + 0.5 * span)]
        for bc in (DD, NN, RR):
            for n in ([0] if family == "interval" else [0, 2]):
                prob = RadialProblem(dom, bc, n)
                for q in (0.5, 2.0, 10.0):
                    for r, r0 in pts:
                        ref = kernel_series(dom, bc, n, q, r, r0, K=4000).value
                        val = kernel_value(prob, q, r, r0)
                        worst = max(worst, abs(val - ref) / abs(ref))
                        count += 1
    # a small hole: Neumann inner circle for n = 0, Dirichlet for n >= 1
    disk, ann = RadialDomain("disk"), RadialDomain("annulus", 1e-4, 1.0)
    worst_deg = 0.0
    for n in range(4):
        inner = 0.0 if n == 0 else INF
        for q in (0.5, 2.0, 10.0):
            ref = kernel_value(RadialProblem(disk, DD, n), q, 0.3, 0.7)
            val = kernel_value(RadialProblem(ann, BoundaryCondition(inner, INF), n), q, 0.3, 0.7)
            worst_deg = max(worst_deg, abs(val - ref) / abs(ref))
    ok = worst <= 1e-6 and worst_deg <= 1e-6
    return ok, f"{count} kernel points, worst rel {worst:.1e}; annulus->disk worst rel {worst_deg:.1e}"


def criterion_8():
    worst = 0.0
    for family, a in FAMILIES:
        dom = RadialDomain(family, a, 1.0)
        for bc in (DD, NN, RR):
            for n in ([0] if family == "interval" else range(4)):
                for q in (0.5, 2.0):
                    closed, quad = trace_per_n(dom, bc, n, q), trace_quadrature(dom, bc, n, q)
                    worst = max(worst, abs(closed - quad) / abs(quad))
    return worst <= 1e-8, f"worst rel {worst:.1e}"


def criterion_9():
    z = np.linspace(0.1, 50.0, 400)
    worst = 0.0
    for n in range(21):
        I, Ip = specfun.bessel("I", n, z), specfun.bessel("I", n, z, True)
        K, Kp = specfun.bessel("K", n, z), specfun.bessel("K", n, z, True)
        i, ip = specfun.bessel("i", n, z), specfun.bessel("i", n, z, True)
        k, kp = specfun.bessel("k", n, z), specfun.bessel("k", n, z, True)
        J, Jp = specfun.bessel("J", n, z), specfun.bessel("J", n, z, True)
        Y, Yp = specfun.bessel("Y", n, z), specfun.bessel("Y", n, z, True)
        worst = max(worst,
                    np.max(np.abs((Ip * K - I * Kp) * z - 1)),
                    np.max(np.abs((ip * k - i * kp) * z**2 - 1)),
                    np.max(np.abs((J * Yp - Jp * Y) * np.pi * z / 2 - 1)))
    return worst <= 1e-12, f"worst relative Wronskian defect {worst:.1e}"


def criterion_10():
    cases = [("FourierBessel-D", 0.0, INF), ("FourierBessel-D", 2.5, INF), ("FourierBessel-N", 1.0, INF),
             ("Dini", 0.0, 0.5), ("Dini", 1.0, 2.0)]
    worst = 0.0
    for kind, nu, h in cases:
        closed = power_coefficients(kind, nu, h, K=16)
        quad = expand(lambda y, nu=nu: y**nu, kind, nu, h, K=16)
        worst = max(worst, np.max(np.abs(closed.coeffs - quad.coeffs)) / np.max(np.abs(closed.coeffs)))
    monotone = True
    for kind, nu, h in cases:
        errs = [abs(float(reconstruct(power_coefficients(kind, nu, h, K), 0.5)) - 0.5**nu)
                for K in (8, 16, 32, 64)]
        monotone &= all(b < a for a, b in zip(errs, errs[1:]))
    return worst <= 1e-8 and monotone, f"worst coefficient defect {worst:.1e}, reconstruction decreasing: {monotone}"


CRITERIA = {
    1: ("exact-rational Rayleigh sums", criterion_1),
    2: ("zeta(2), zeta(4) via the interval trace", criterion_2),
    3: ("one-dimensional kernel and trace table", criterion_3),
    4: ("radial Bessel sum identities", criterion_4),
    5: ("Calogero sums", criterion_5),
    6: ("Sneddon sums", criterion_6),
    7: ("Green's function vs eigen-expansion", criterion_7),
    8: ("per-mode heat traces vs quadrature", criterion_8),
    9: ("Wronskian floor", criterion_9),
    10: ("Dini and Fourier-Bessel coefficients", criterion_10),
}


def _report(num):
    title, fn = CRITERIA[num]
    ok, detail = fn()
    print(f"{'PASS' if ok else 'FAIL'} criterion {num}: {title} ({detail})")
    return ok


@pytest.mark.parametrize("num", sorted(CRITERIA))
def test_criterion(num):
    mp.mp.dps = 15
    assert _report(num)


if __name__ == "__main__":
    for num in sorted(CRITERIA):
        _report(num)
