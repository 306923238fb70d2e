import numpy as np
import pytest

from hartree4d import (
    RadialField,
    RadialGrid,
    gn_functional,
    gradient_flow_step,
    integrate,
    kinetic,
    lv4,
    mass,
    pde_residual,
    shooting_refine,
    solve_ground_state,
)
from hartree4d.errors import IterationLimitError


def test_identities_hold(ground_state_mid):
    gs = ground_state_mid
    assert gs.pde_residual < 1e-6
    assert gs.pohozaev_grad_defect < 1e-3
    assert gs.pohozaev_lv_defect < 1e-3
    assert gs.energy_defect < 1e-3
    m_sq = gs.mass_squared
    assert gs.sharp_J == pytest.approx(m_sq / 2.0, rel=1e-3)


def test_profile_positive_decreasing(ground_state_mid):
    q = np.real(ground_state_mid.q.values)
    assert np.all(q > 0.0)
    assert np.all(np.diff(q) < 0.0)


def test_report_round_trip(ground_state_mid):
    rep = ground_state_mid.report()
    assert rep["mass"] == pytest.approx(mass(ground_state_mid.q), rel=1e-14)
    assert set(rep) >= {
        "mass", "kinetic", "lv4", "energy", "sharp_J",
        "pde_residual", "pohozaev_grad_defect", "pohozaev_lv_defect", "iterations",
    }


def test_resolution_robustness(ground_state_mid):
    gs2 = solve_ground_state(RadialGrid(2048, 32.0), tol=1e-6)
    m1 = mass(ground_state_mid.q)
    m2 = mass(gs2.q)
    assert abs(m1 - m2) / m2 < 1e-4


def test_flow_step_fixed_point(ground_state_mid):
    q = ground_state_mid.q
    out = gradient_flow_step(q, 0.5)
    drift = np.sqrt(integrate(q.grid, np.abs(out.values - q.values) ** 2)) / mass(q)
    # the flow's own ladder tolerance; its fixed point is O(dr^2) from Q
    assert drift < 1e-4


def test_flow_step_preserves_positivity(grid_mid):
    u = RadialField(grid_mid, np.exp(-grid_mid.r**2 / 2.0))
    out = gradient_flow_step(u, 1e-3)
    assert np.all(np.real(out.values) > 0.0)


def test_flow_step_rejects_zero_and_bad_dtau(grid_small):
    zero = RadialField(grid_small, np.zeros(grid_small.n))
    with pytest.raises(ValueError):
        gradient_flow_step(zero, 0.1)
    u = RadialField(grid_small, np.exp(-grid_small.r**2))
    with pytest.raises(ValueError):
        gradient_flow_step(u, 0.0)


def test_shooting_refine_contract(grid_mid, ground_state_mid):
    # near-solution from a short flow: residual ~1e-3, refinement gains >= 10x
    u = RadialField(grid_mid, np.exp(-grid_mid.r**2 / 2.0))
    for _ in range(30):
        u = gradient_flow_step(u, 0.5)
    res_in = pde_residual(grid_mid, np.real(u.values))
    assert res_in < 1e-2
    refined, improved = shooting_refine(u, tol=1e-7)
    assert improved
    assert pde_residual(grid_mid, np.real(refined.values)) < res_in / 10.0


def test_shooting_refine_no_improvement_flag(ground_state_mid):
    out, improved = shooting_refine(ground_state_mid.q, tol=1e-6)
    assert not improved
    assert out is ground_state_mid.q


def test_shooting_refine_rejects_sign_changing(grid_mid):
    vals = np.exp(-grid_mid.r**2 / 2.0) * np.cos(grid_mid.r)
    with pytest.raises(ValueError):
        shooting_refine(RadialField(grid_mid, vals), tol=1e-6)


def test_solver_rejects_bad_tol(grid_small):
    with pytest.raises(ValueError):
        solve_ground_state(grid_small, tol=0.0)


def test_unreachable_tolerance_raises_with_report(grid_mid):
    with pytest.raises(IterationLimitError) as err:
        solve_ground_state(grid_mid, tol=1e-15, max_iter=300)
    assert "pde_residual" in err.value.report


def test_local_minimality_of_J(ground_state_mid):
    # J(Q + 0.1 eta) stays above J(Q) for random smooth perturbations
    gs = ground_state_mid
    grid = gs.q.grid
    j_q = gn_functional(gs.q)
    rng = np.random.default_rng(123)
    scale = np.max(np.real(gs.q.values))
    for _ in range(100):
        widths = rng.uniform(0.5, 3.0, size=3)
        amps = rng.uniform(-1.0, 1.0, size=3)
        eta = sum(a * np.exp(-grid.r**2 / (2 * w**2)) for a, w in zip(amps, widths))
        eta = eta / max(np.max(np.abs(eta)), 1e-12) * scale
        perturbed = RadialField(grid, gs.q.values + 0.1 * eta)
        assert gn_functional(perturbed) >= j_q * (1.0 - 1e-6)


def test_pohozaev_triple_simultaneous(ground_state_mid):
    q = ground_state_mid.q
    m_sq = mass(q) ** 2
    assert kinetic(q) == pytest.approx(m_sq, rel=1e-3)
    assert lv4(q) == pytest.approx(2.0 * m_sq, rel=1e-3)
    assert abs(0.5 * kinetic(q) - 0.25 * lv4(q)) < 1e-3 * m_sq
