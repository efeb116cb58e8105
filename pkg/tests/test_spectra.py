import math

import mpmath as mp
import numpy as np
import pytest

from specsum.errors import DomainError, UnsupportedError
from specsum.spectra import (BoundaryCondition, RadialDomain, characteristic_of, eigenfunction,
                             eigenfunction_derivative, eigenvalues, mode_arrays)

INF = math.inf

FAMILIES = [
    RadialDomain("interval", 0.0, 1.0),
    RadialDomain("disk", 0.0, 1.5),
    RadialDomain("ball", 0.0, 0.8),
    RadialDomain("annulus", 0.4, 1.0),
    RadialDomain("shell", 0.3, 1.2),
]
CONDITIONS = [
    BoundaryCondition(INF, INF),
    BoundaryCondition(0.0, 0.0),
    BoundaryCondition(1.0, 1.0),
    BoundaryCondition(0.0, 3.0),
]


def _weighted_inner(dom, bc, m1, m2):
    d = dom.dim
    f = lambda r: r ** (d - 1) * eigenfunction(m1, dom, bc, float(r)) * eigenfunction(m2, dom, bc, float(r))
    return float(mp.quad(f, [dom.a, dom.b]))


def test_listed_eigenvalues():
    modes = eigenvalues(RadialDomain("interval"), BoundaryCondition(INF, INF), 0, 2)
    assert [m.lam for m in modes] == pytest.approx([math.pi**2, 4 * math.pi**2], rel=1e-15)
    m = eigenvalues(RadialDomain("ball", 0.0, 2.0), BoundaryCondition(INF, INF), 0, 1)[0]
    assert m.lam == pytest.approx((math.pi / 2) ** 2, rel=1e-15)
    m = eigenvalues(RadialDomain("disk"), BoundaryCondition(INF, 0.0), 0, 1)[0]
    assert m.zero_mode and m.lam == 0.0


def test_characteristic_examples():
    char = characteristic_of(RadialDomain("disk"), BoundaryCondition(INF, INF), 1)
    assert char.family == "disk2D" and char.n == 1 and math.isinf(char.h_outer)
    nn = eigenvalues(RadialDomain("interval"), BoundaryCondition(0.0, 0.0), 0, 4)
    assert [m.alpha for m in nn] == pytest.approx([0, math.pi, 2 * math.pi, 3 * math.pi], abs=1e-14)
    shell = eigenvalues(RadialDomain("shell", 0.5, 1.0), BoundaryCondition(INF, INF), 0, 3)
    assert [m.alpha for m in shell] == pytest.approx([2 * math.pi, 4 * math.pi, 6 * math.pi], rel=1e-13)
    with pytest.raises(UnsupportedError):
        characteristic_of(RadialDomain("exterior_disk", 1.0), BoundaryCondition(INF, INF))


def test_normalization_examples():
    m = eigenvalues(RadialDomain("interval"), BoundaryCondition(INF, INF), 0, 3)
    assert [x.c_squared for x in m] == pytest.approx([2, 2, 2], rel=1e-14)
    # disk Dirichlet: c^2 = 2 / (R^2 J_n'(alpha)^2), the radial part of 1/(pi R^2 J_n'^2)
    R = 1.5
    for mode in eigenvalues(RadialDomain("disk", 0.0, R), BoundaryCondition(INF, INF), 2, 4):
        jp = float(mp.besselj(2, mode.alpha, derivative=1))
        assert mode.c_squared == pytest.approx(2 / (R * R * jp * jp), rel=1e-12)
    # ball Robin: c^2 = 2 alpha^2 / (b^3 j_n(alpha)^2 (alpha^2 - n(n+1) + h(h-1)))
    h, n = 2.0, 1
    for mode in eigenvalues(RadialDomain("ball"), BoundaryCondition(INF, h), n, 4):
        a = mode.alpha
        j = float(mp.sqrt(mp.pi / (2 * a)) * mp.besselj(n + 0.5, a))
        assert mode.c_squared == pytest.approx(2 * a * a / (j * j * (a * a - n * (n + 1) + h * (h - 1))), rel=1e-12)
    # constant modes of ball, annulus and shell
    assert eigenvalues(RadialDomain("ball"), BoundaryCondition(INF, 0.0), 0, 1)[0].c_squared == pytest.approx(3.0)
    sh = eigenvalues(RadialDomain("shell", 0.5, 1.0), BoundaryCondition(0.0, 0.0), 0, 1)[0]
    assert sh.zero_mode and sh.c_squared == pytest.approx(3 / (1 - 0.125))


def test_eigenfunction_examples():
    dd = BoundaryCondition(INF, INF)
    m = eigenvalues(RadialDomain("interval"), dd, 0, 1)[0]
    assert float(eigenfunction(m, RadialDomain("interval"), dd, 0.5)) == pytest.approx(1.0, rel=1e-15)
    disk = RadialDomain("disk", 0.0, 2.0)
    m = eigenvalues(disk, dd, 0, 1)[0]
    assert abs(float(eigenfunction(m, disk, dd, 2.0))) < 1e-15
    ann = RadialDomain("annulus", 0.5, 1.0)
    m = eigenvalues(ann, dd, 0, 1)[0]
    assert abs(float(eigenfunction(m, ann, dd, 0.5))) < 1e-14
    assert abs(float(eigenfunction(m, ann, dd, 1.0))) < 1e-14
    with pytest.raises(DomainError):
        eigenfunction(m, ann, dd, 0.2)


@pytest.mark.parametrize("dom", FAMILIES, ids=lambda d: d.family)
@pytest.mark.parametrize("bc", CONDITIONS, ids=["DD", "NN", "RR", "NR"])
def test_orthonormality(dom, bc):
    mp.mp.dps = 20
    for n in ([0] if dom.family == "interval" else [0, 3]):
        modes = eigenvalues(dom, bc, n, 6)
        for i, m1 in enumerate(modes):
            for m2 in modes[i:]:
                val = _weighted_inner(dom, bc, m1, m2)
                target = 1.0 / m1.c_squared if m1 is m2 else 0.0
                assert abs(val - target) <= 1e-8 * max(1.0 / m1.c_squared, 1.0 / m2.c_squared)


@pytest.mark.parametrize("dom", FAMILIES, ids=lambda d: d.family)
@pytest.mark.parametrize("bc", CONDITIONS, ids=["DD", "NN", "RR", "NR"])
def test_boundary_residuals(dom, bc):
    ell_in, ell_out = bc.lengths(dom.b)
    inner_active = dom.family in ("interval", "annulus", "shell")
    for n in (0, 2):
        for m in eigenvalues(dom, bc, n, 8):
            scale = float(np.max(np.abs(eigenfunction(m, dom, bc, np.linspace(dom.a, dom.b, 201)))))
            u = lambda r: float(eigenfunction(m, dom, bc, r))
            du = lambda r: float(eigenfunction_derivative(m, dom, bc, r))
            res_out = u(dom.b) if ell_out == 0 else (du(dom.b) if math.isinf(ell_out) else ell_out * du(dom.b) + u(dom.b))
            assert abs(res_out) <= 1e-9 * scale * max(1.0, m.alpha)
            if inner_active:
                res_in = u(dom.a) if ell_in == 0 else (du(dom.a) if math.isinf(ell_in) else ell_in * du(dom.a) - u(dom.a))
                assert abs(res_in) <= 1e-9 * scale * max(1.0, m.alpha)


@pytest.mark.parametrize("dom", FAMILIES, ids=lambda d: d.family)
def test_radial_equation_residual(dom):
    bc = BoundaryCondition(1.0, 2.0)
    d = dom.dim
    n = 0 if d == 1 else 2
    ang = 0 if d == 1 else (n * n if d == 2 else n * (n + 1))
    for m in eigenvalues(dom, bc, n, 4):
        u = lambda x: float(eigenfunction(m, dom, bc, x))
        scale = float(np.max(np.abs(eigenfunction(m, dom, bc, np.linspace(dom.a, dom.b, 201)))))
        for r in np.linspace(dom.a, dom.b, 7)[1:-1]:
            # resolve both the oscillation length and the 1/r^2 term
            step = 0.02 * min(1 / math.sqrt(m.lam), r)
            # sixth-order central second difference
            c = [(1, 1.5), (2, -0.15), (3, 1 / 90)]
            upp = (sum(w * (u(r + j * step) + u(r - j * step)) for j, w in c) - 49 / 18 * u(r)) / step**2
            up = float(eigenfunction_derivative(m, dom, bc, r))
            lhs = upp + (d - 1) / r * up - ang / r**2 * u(r) + m.lam * u(r)
            assert abs(lhs) <= 1e-8 * max(1.0, m.lam) * scale


def test_parseval_for_constant_on_disk():
    # f = 1 on the unit disk, n = 0 Dirichlet modes: sum c^2 (int r u)^2 -> int r dr = 1/2
    dom, bc = RadialDomain("disk"), BoundaryCondition(INF, INF)
    ma = mode_arrays(dom, bc, 0, 200)
    proj = np.array([float(mp.besselj(1, a)) / a for a in ma.alpha])  # int_0^1 r J0(a r) dr
    total = float(np.sum(ma.c2 * proj**2))
    assert total == pytest.approx(0.5, rel=1e-2)
    assert total < 0.5


def test_mode_arrays_match_single_modes():
    dom, bc = RadialDomain("annulus", 0.3, 1.0), BoundaryCondition(1.0, INF)
    ma = mode_arrays(dom, bc, 1, 10)
    modes = eigenvalues(dom, bc, 1, 10)
    assert np.allclose(ma.alpha, [m.alpha for m in modes], rtol=1e-15)
    assert np.allclose(ma.c2, [m.c_squared for m in modes], rtol=1e-12)
    u = ma.profile(0.7)
    ref = np.array([float(eigenfunction(m, dom, bc, 0.7)) for m in modes])
    assert np.allclose(u ** 2 * ma.c2, ref ** 2 * ma.c2, rtol=1e-10)


def test_degeneracy_and_lengths():
    assert RadialDomain("disk").degeneracy(0) == 1
    assert RadialDomain("disk").degeneracy(3) == 2
    assert RadialDomain("shell", 0.2, 1.0).degeneracy(3) == 7
    bc = BoundaryCondition.from_lengths(0.0, INF, 2.0)
    assert math.isinf(bc.h_inner) and bc.h_outer == 0.0
    assert BoundaryCondition.from_lengths(0.5, 4.0, 2.0) == BoundaryCondition(4.0, 0.5)


@pytest.mark.parametrize("args", [("disk", 0.5, 1.0), ("annulus", 0.0, 1.0), ("shell", 1.0, 0.5), ("cone", 0.0, 1.0)])
def test_invalid_domains(args):
    with pytest.raises(DomainError):
        RadialDomain(*args)


def test_invalid_conditions():
    with pytest.raises(DomainError):
        BoundaryCondition(-1.0, INF)
