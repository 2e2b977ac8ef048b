"""Grids, kernels, pulse profiles, and system parameters."""

import math

import numpy as np
import pytest

from xpmsim import (
    Grid1D,
    ModeError,
    ParameterError,
    ProfileError,
    SystemParams,
    commutator_kernel,
    composite_gauss_grid,
    join_grids,
    make_grid,
    make_profile,
    sinc_kernel,
)


# ---------------------------------------------------------------- grids

def test_uniform_grid_trapezoid_weights():
    g = make_grid(0.0, 1.0, 5, rule="uniform")
    h = 0.25
    assert np.allclose(g.weights, [h / 2, h, h, h, h / 2])
    assert g.lo == 0.0 and g.hi == 1.0 and g.n == 5
    # trapezoid rule is exact for linear integrands
    assert g.integrate(g.nodes).real == pytest.approx(0.5, abs=1e-15)


def test_gauss_legendre_polynomial_exactness():
    # n-point Gauss-Legendre integrates degree 2n-1 exactly
    g = make_grid(0.0, 1.0, 6, rule="gauss-legendre")
    val = g.integrate(g.nodes**10).real
    assert val == pytest.approx(1.0 / 11.0, abs=1e-14)


def test_gauss_legendre_domain_covers_endpoints():
    # open rule: nodes stay interior but the grid still reports [lo, hi]
    g = make_grid(-2.0, 3.0, 8, rule="gauss-legendre")
    assert g.lo == -2.0 and g.hi == 3.0
    assert g.nodes[0] > -2.0 and g.nodes[-1] < 3.0
    assert math.fsum(g.weights) == pytest.approx(5.0, abs=1e-12)


def test_composite_gauss_grid_oscillatory():
    g = composite_gauss_grid(0.0, 2.0 * math.pi, 6)
    assert abs(g.integrate(np.cos(g.nodes))) < 1e-12
    assert g.lo == 0.0 and g.hi == pytest.approx(2.0 * math.pi)


def test_join_grids_preserves_integral():
    left = make_grid(-4.0, -1.0, 40, rule="gauss-legendre")
    right = make_grid(-1.0, 4.0, 60, rule="gauss-legendre")
    joined = join_grids(left, right)
    assert joined.n == 100
    assert np.all(np.diff(joined.nodes) > 0)
    ref = np.sqrt(math.pi)  # integral of exp(-x^2) over the line, tails < 1e-7
    assert joined.integrate(np.exp(-joined.nodes**2)).real == pytest.approx(ref, abs=1e-7)
    assert joined.lo == -4.0 and joined.hi == 4.0


def test_join_grids_rejects_overlap_and_shared_nodes():
    a = make_grid(0.0, 1.0, 5)
    with pytest.raises(ParameterError):
        join_grids(a, make_grid(0.5, 1.5, 5))
    with pytest.raises(ParameterError):
        join_grids(a, make_grid(1.0, 2.0, 5))  # uniform rules share the node at 1
    with pytest.raises(ParameterError):
        join_grids()


def test_grid_validation():
    with pytest.raises(ParameterError):
        Grid1D(np.array([0.0, 1.0, 0.5]), np.array([0.3, 0.3, 0.4]))
    with pytest.raises(ParameterError):
        Grid1D(np.array([0.0, 1.0]), np.array([0.5, -0.5]))
    with pytest.raises(ParameterError):
        Grid1D(np.array([0.0, 1.0]), np.array([1.0]))
    with pytest.raises(ParameterError):
        Grid1D(np.array([1.0]), np.array([1.0]))
    with pytest.raises(ParameterError, match="outside the stated domain"):
        Grid1D(np.array([0.0, 1.0]), np.array([0.4, 0.4]), domain=(0.2, 1.0))
    with pytest.raises(ParameterError, match="do not sum"):
        Grid1D(np.array([0.0, 1.0]), np.array([1.0, 1.0]), domain=(0.0, 1.0))
    with pytest.raises(ParameterError):
        make_grid(1.0, 0.0, 5)
    with pytest.raises(ParameterError):
        make_grid(0.0, 1.0, 1)
    with pytest.raises(ParameterError):
        make_grid(0.0, 1.0, 5, rule="simpson")


def test_grid_same_as():
    a = make_grid(0.0, 1.0, 7)
    b = make_grid(0.0, 1.0, 7)
    c = make_grid(0.0, 1.0, 9)
    assert a.same_as(b)
    assert not a.same_as(c)


# -------------------------------------------------------------- kernels

def test_sinc_kernel_values():
    assert sinc_kernel(0.0, 2.0) == 1.0
    x = np.array([0.5, 1.0, 3.0])
    k0 = 2.0
    assert np.allclose(sinc_kernel(x, k0), np.sin(k0 * x) / (k0 * x), atol=1e-15)
    # zeros at multiples of pi/k0
    assert abs(sinc_kernel(math.pi / k0, k0)) < 1e-15


def test_sinc_kernel_small_argument_series():
    # the series branch must join the direct ratio smoothly
    k0 = 3.0
    for x in (1e-9, 1e-6, 5e-5, 2e-4):
        direct = np.sinc(k0 * x / np.pi)
        assert sinc_kernel(x, k0) == pytest.approx(direct, abs=1e-15)
    with pytest.raises(ParameterError):
        sinc_kernel(1.0, 0.0)


def test_commutator_kernel_shape_and_height():
    k0, sigma = 2.0, 1.0
    assert commutator_kernel(0.0, k0, sigma) == pytest.approx(k0 / math.pi, abs=1e-15)
    x = np.linspace(-3.0, 3.0, 11)
    expected = (k0 / (math.pi * sigma)) * np.sinc(k0 * x / (math.pi * sigma))
    assert np.allclose(commutator_kernel(x, k0, sigma), expected, atol=1e-14)
    # scaling sigma stretches the argument and rescales the height
    assert commutator_kernel(1.0, k0, 2.0) == pytest.approx(
        0.5 * (k0 / math.pi) * np.sinc(k0 * 0.5 / math.pi), abs=1e-15)
    with pytest.raises(ParameterError):
        commutator_kernel(1.0, 2.0, 0.0)


# ------------------------------------------------------------- profiles

def test_gaussian_profile():
    f = make_profile("gaussian")
    assert f.norm_squared() == pytest.approx(1.0)
    assert f.is_real
    assert f.breakpoints == ()
    assert f.support_halfwidth() == 10.0
    assert f.label == "gaussian(center=0,sigma=1)"
    # numeric L2 norm agrees with the analytic one
    g = make_grid(-12.0, 12.0, 2001)
    assert g.integrate(np.abs(f(g.nodes)) ** 2).real == pytest.approx(1.0, abs=1e-10)
    # peak value of the normalized gaussian
    assert f(0.0) == pytest.approx(math.pi ** -0.25, abs=1e-15)


def test_gaussian_profile_center_shift():
    f = make_profile("gaussian", center=3.0, sigma=0.5)
    assert f(3.0) == pytest.approx((0.5 * math.sqrt(math.pi)) ** -0.5)
    assert f(3.0) == pytest.approx(f(3.7) * math.exp(0.7**2 / (2 * 0.25)), rel=1e-12)


def test_square_profile_default_width():
    f = make_profile("square", sigma=1.5)
    assert f.width == 3.0  # default width is two sigma
    assert f.norm_squared() == pytest.approx(1.0)
    amp = 3.0 ** -0.5
    assert f(0.0) == pytest.approx(amp)
    assert f(1.5) == pytest.approx(0.5 * amp)  # midpoint value at the jump
    assert f(1.6) == 0.0
    assert f.breakpoints == (-1.5, 1.5)
    assert f.support_halfwidth() == 1.5
    assert f.label == "square(center=0,width=3)"


def test_tabulated_profile_normalization_and_interp():
    nodes = np.linspace(-4.0, 4.0, 81)
    f = make_profile("tabulated", table_nodes=nodes,
                     table_values=np.exp(-nodes**2 / 2.0))
    assert f.norm_squared() == pytest.approx(1.0, abs=1e-12)
    assert f.is_real
    assert f(5.0) == 0.0 and f(-5.0) == 0.0
    # linear interpolation between table nodes
    mid = 0.5 * (f(nodes[3]) + f(nodes[4]))
    assert f(0.5 * (nodes[3] + nodes[4])) == pytest.approx(mid, rel=1e-12)


def test_tabulated_profile_complex():
    nodes = np.linspace(-3.0, 3.0, 61)
    vals = np.exp(-nodes**2 / 2.0) * np.exp(1j * nodes)
    f = make_profile("tabulated", table_nodes=nodes, table_values=vals)
    assert not f.is_real
    assert f.norm_squared() == pytest.approx(1.0, abs=1e-12)


def test_profile_validation():
    with pytest.raises(ProfileError):
        make_profile("triangle")
    with pytest.raises(ParameterError):
        make_profile("square", width=-1.0)
    with pytest.raises(ParameterError):
        make_profile("gaussian", sigma=0.0)
    with pytest.raises(ParameterError):
        make_profile("tabulated")
    with pytest.raises(ParameterError):
        make_profile("tabulated", table_nodes=np.array([0.0, 1.0, 0.5]),
                     table_values=np.ones(3))
    with pytest.raises(ParameterError):
        make_profile("tabulated", table_nodes=np.linspace(0, 1, 4),
                     table_values=np.zeros(4))  # zero norm cannot be normalized


# ---------------------------------------------------------- parameters

def test_copropagating_params():
    p = SystemParams.copropagating(1.0, 2.0)
    assert p.mode == "copropagating"
    assert p.kappa == pytest.approx(1.0 / math.pi)
    assert p.chi == pytest.approx(2.0 * math.pi)  # phi = chi * kappa * t with t = 1
    assert p.v_r == 0.0
    moving = SystemParams.copropagating(1.0, 2.0, velocity=3.0)
    assert moving.mode == "copropagating" and moving.v1 == moving.v2 == 3.0


def test_headon_params_phi_chi_duality():
    p = SystemParams.headon(0.001, 10.0, 5e3, -5e3, phi=math.pi)
    assert p.mode == "headon"
    assert p.v_r == pytest.approx(1e4)
    # chi recovers phi through the full-pass relation
    assert 2.0 * p.chi * p.kappa * p.separation / abs(p.v_r) == pytest.approx(math.pi)
    q = SystemParams.headon(0.001, 10.0, 5e3, -5e3, chi=p.chi)
    assert q.phi == pytest.approx(math.pi, rel=1e-12)


def test_params_validation():
    with pytest.raises(ParameterError):
        SystemParams.headon(0.001, 10.0, 5e3, -5e3)  # neither phi nor chi
    with pytest.raises(ParameterError):
        SystemParams.headon(0.001, 10.0, 5e3, -5e3, phi=1.0, chi=1.0)
    with pytest.raises(ModeError):
        SystemParams.headon(0.001, 10.0, 5e3, 5e3, phi=1.0)
    with pytest.raises(ParameterError):
        SystemParams.headon(0.001, 0.0, 5e3, -5e3, phi=1.0)  # no pass to accumulate phi over
    with pytest.raises(ParameterError):
        SystemParams.copropagating(-1.0, 2.0)
    with pytest.raises(ParameterError):
        SystemParams.copropagating(1.0, -2.0)
    with pytest.raises(ParameterError):
        SystemParams.copropagating(1.0, 2.0, interaction_time=0.0)
    with pytest.raises(ParameterError, match="inconsistent"):
        SystemParams(k0=1.0, phi=1.0, chi=99.0, interaction_time=1.0)
    with pytest.raises(ParameterError, match="inconsistent"):
        SystemParams(k0=1.0, phi=1.0, chi=99.0, v1=1.0, v2=-1.0, separation=10.0)


def test_headon_zero_separation_with_chi():
    # co-centered pulses accumulate no full-pass phase but chi is still defined
    p = SystemParams.headon(2.5, 0.0, 1e-6, -1e-6, chi=3.0)
    assert p.phi == 0.0
    assert p.chi == 3.0
