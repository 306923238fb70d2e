import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hartree4d import (
    RadialField,
    RadialGrid,
    integrate,
    kinetic,
    mass,
    radial_momentum,
    variance,
)
from hartree4d.errors import GridShapeError, TailDominatedWarning
from hartree4d.grid import TWO_PI2, lp_norm_cubed
from hartree4d.symmetries import apply_scaling


def test_grid_nodes_positive_increasing():
    g = RadialGrid(64, 8.0)
    assert np.all(g.r > 0)
    assert np.all(np.diff(g.r) > 0)
    assert g.dr == pytest.approx(8.0 / 64)
    assert np.allclose(g.weights, TWO_PI2 * g.r**3 * g.dr)


def test_grid_rejects_bad_parameters():
    with pytest.raises(ValueError):
        RadialGrid(0, 1.0)
    with pytest.raises(ValueError):
        RadialGrid(16, -1.0)


def test_field_length_mismatch():
    g = RadialGrid(16, 4.0)
    with pytest.raises(GridShapeError):
        RadialField(g, np.zeros(15))
    with pytest.raises(GridShapeError):
        integrate(g, np.zeros(17))


def test_integrate_zero():
    g = RadialGrid(128, 8.0)
    assert integrate(g, np.zeros(128)) == 0.0


def test_integrate_gaussian_closed_form():
    # int_{R^4} exp(-|x|^2) dx = 2 pi^2 * (1/2) = pi^2
    g = RadialGrid(2048, 8.0)
    val = integrate(g, np.exp(-g.r**2))
    assert val == pytest.approx(np.pi**2, rel=1e-8)


def test_integrate_constant_ball():
    # int over r <= 1 of 2 pi^2 r^3 dr = pi^2 / 2, midpoint error O(dr^2)
    n = 64
    g = RadialGrid(n, 1.0)
    val = integrate(g, np.ones(n))
    assert val == pytest.approx(np.pi**2 / 2, abs=10 * g.dr**2)


@given(
    alpha=st.floats(-3, 3, allow_nan=False),
    beta=st.floats(-3, 3, allow_nan=False),
    seed=st.integers(0, 2**31 - 1),
)
@settings(max_examples=25, deadline=None)
def test_integrate_linear(alpha, beta, seed):
    g = RadialGrid(64, 8.0)
    rng = np.random.default_rng(seed)
    f, h = rng.normal(size=64), rng.normal(size=64)
    lhs = integrate(g, alpha * f + beta * h)
    rhs = alpha * integrate(g, f) + beta * integrate(g, h)
    assert lhs == pytest.approx(rhs, abs=1e-9 * (1 + abs(rhs)))


def test_mass_examples(gaussian_small, grid_small):
    assert mass(RadialField(grid_small, np.zeros(grid_small.n))) == 0.0
    assert mass(gaussian_small) == pytest.approx(np.pi, rel=1e-6)
    doubled = RadialField(grid_small, 2.0 * gaussian_small.values)
    assert mass(doubled) == pytest.approx(2.0 * mass(gaussian_small), rel=1e-14)


@given(theta=st.floats(-10, 10, allow_nan=False))
@settings(max_examples=30, deadline=None)
def test_mass_phase_invariant(theta):
    g = RadialGrid(128, 8.0)
    u = RadialField(g, np.exp(-g.r**2 / 2.0))
    rotated = RadialField(g, np.exp(1j * theta) * u.values)
    assert mass(rotated) == pytest.approx(mass(u), rel=1e-14)


def test_kinetic_examples(grid_small):
    const = RadialField(grid_small, np.full(grid_small.n, 0.7))
    assert kinetic(const) < 1e-12 * integrate(grid_small, np.abs(const.values) ** 2)
    gauss = RadialField(grid_small, np.exp(-grid_small.r**2 / 2.0))
    assert kinetic(gauss) == pytest.approx(2.0 * np.pi**2, rel=1e-4)


@pytest.mark.parametrize("lam", [0.5, 2.0])
def test_mass_critical_scaling(lam):
    g = RadialGrid(4096, 32.0)
    u = RadialField(g, np.exp(-g.r**2 / 2.0))
    scaled = apply_scaling(u, lam)
    assert mass(scaled) == pytest.approx(mass(u), rel=1e-4)
    assert kinetic(scaled) == pytest.approx(lam**2 * kinetic(u), rel=1e-3)
    assert variance(scaled) == pytest.approx(variance(u) / lam**2, rel=1e-3)


def test_variance_examples(grid_small):
    assert variance(RadialField(grid_small, np.zeros(grid_small.n))) == 0.0
    gauss = RadialField(grid_small, np.exp(-grid_small.r**2 / 2.0))
    assert variance(gauss) == pytest.approx(2.0 * np.pi**2, rel=1e-6)
    assert kinetic(gauss) >= 0.0
    assert variance(gauss) >= 0.0


def test_variance_tail_warning():
    g = RadialGrid(256, 8.0)
    slab = RadialField(g, np.where(g.r > 0.85 * g.r_max, 1.0, 0.0))
    with pytest.warns(TailDominatedWarning):
        variance(slab)


def test_radial_momentum_real_field_vanishes(gaussian_small, grid_small):
    w = grid_small.r**2
    assert radial_momentum(gaussian_small, w) == pytest.approx(0.0, abs=1e-12)


def test_radial_momentum_phase_invariance(grid_small):
    g = grid_small
    u = RadialField(g, np.exp(-g.r**2 / 2.0) * np.exp(0.25j * g.r**2))
    w = g.r**2
    base = radial_momentum(u, w)
    rotated = RadialField(g, np.exp(1.3j) * u.values)
    assert radial_momentum(rotated, w) == pytest.approx(base, rel=1e-12)


def test_radial_momentum_matches_fine_grid_oracle():
    # same integrand evaluated at 8x resolution is the independent oracle
    def value(n):
        g = RadialGrid(n, 16.0)
        u = RadialField(g, np.exp(-g.r**2 / 2.0) * np.exp(0.25j * g.r**2))
        return radial_momentum(u, g.r**2)

    coarse, fine = value(512), value(4096)
    assert coarse == pytest.approx(fine, rel=1e-3)


def test_quadrature_second_order_convergence():
    # doubling n reduces the Gaussian-mass quadrature error by >= 3x
    exact = np.pi**2

    def err(n):
        g = RadialGrid(n, 8.0)
        return abs(integrate(g, np.exp(-g.r**2)) - exact)

    assert err(32) / err(64) >= 3.0


def test_lp_norm_cubed(grid_small):
    u = RadialField(grid_small, np.exp(-grid_small.r**2 / 2.0))
    # int |u|^3 dx = int e^{-3r^2/2} dx = 2 pi^2 / (2 * (3/2)^2) = 4 pi^2 / 9
    assert lp_norm_cubed(u) == pytest.approx(2.0 * np.pi**2 / (2 * 2.25), rel=1e-6)
