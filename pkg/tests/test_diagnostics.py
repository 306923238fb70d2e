import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hartree4d import (
    EvolutionConfig,
    RadialField,
    RadialGrid,
    blowup_report,
    concentration_scan,
    evolve,
    mass,
    window_mass,
)
from hartree4d.errors import InsufficientDataError, WrongRegimeError
from hartree4d.evolution import Trajectory
from hartree4d.presets import pcs_blowup


@pytest.fixture(scope="module")
def blowup_traj(ground_state_mid):
    u0 = RadialField(ground_state_mid.q.grid, 1.2 * ground_state_mid.q.values)
    cfg = EvolutionConfig(dt0=1e-3, t_end=3.0, checkpoint_stride=128)
    return evolve(u0, cfg)


def test_window_mass_full_window(gaussian_small):
    total = mass(gaussian_small) ** 2
    assert window_mass(gaussian_small, gaussian_small.grid.r_max) == pytest.approx(
        total, rel=1e-10
    )


def test_window_mass_support_containment(grid_small):
    bump = RadialField(grid_small, np.where(grid_small.r < 1.0, 1.0, 0.0))
    total = mass(bump) ** 2
    assert window_mass(bump, 0.5) < total
    assert window_mass(bump, 2.0) == pytest.approx(total, rel=1e-10)


def test_window_mass_bad_radius(gaussian_small):
    with pytest.raises(ValueError):
        window_mass(gaussian_small, 0.0)
    with pytest.raises(ValueError):
        window_mass(gaussian_small, gaussian_small.grid.r_max * 2)


@given(
    r1=st.floats(0.05, 15.9, allow_nan=False),
    r2=st.floats(0.05, 15.9, allow_nan=False),
)
@settings(max_examples=50, deadline=None)
def test_window_mass_monotone(r1, r2):
    g = RadialGrid(256, 16.0)
    u = RadialField(g, np.exp(-g.r**2 / 2.0))
    lo, hi = min(r1, r2), max(r1, r2)
    assert window_mass(u, lo) <= window_mass(u, hi) + 1e-15


def test_window_mass_cell_level_continuity(gaussian_small):
    g = gaussian_small.grid
    contrib = g.weights * np.abs(gaussian_small.values) ** 2
    max_cell = float(np.max(contrib))
    for radius in (0.5, 1.0, 3.0):
        jump = abs(window_mass(gaussian_small, radius + g.dr)
                   - window_mass(gaussian_small, radius))
        assert jump <= max_cell * (1 + 1e-12)


def test_window_sweep_on_ground_state(ground_state_mid):
    q = ground_state_mid.q
    radii = np.linspace(0.25, q.grid.r_max, 60)
    masses = [window_mass(q, r) for r in radii]
    assert np.all(np.diff(masses) >= -1e-15)
    total = mass(q) ** 2
    r99_idx = np.searchsorted(masses, 0.99 * total)
    assert radii[r99_idx] < 8.0  # the ground state is well localized


def test_concentration_scan_wrong_regime(ground_state_mid):
    cfg = EvolutionConfig(dt0=1e-3, t_end=0.05, checkpoint_stride=16)
    traj = evolve(ground_state_mid.q, cfg)
    assert traj.termination.kind == "completed"
    with pytest.raises(WrongRegimeError):
        concentration_scan(traj, ground_state_mid, 0.3)


def test_concentration_scan_alpha_range(blowup_traj, ground_state_mid):
    with pytest.raises(ValueError):
        concentration_scan(blowup_traj, ground_state_mid, 0.7)


def test_concentration_scan_structure(blowup_traj, ground_state_mid):
    report = concentration_scan(blowup_traj, ground_state_mid, 0.3)
    assert report.reference_mass_sq == pytest.approx(ground_state_mid.mass_squared)
    assert np.all(report.window_mass_sq >= 0.0)
    total = blowup_traj.initial_mass**2
    assert np.all(report.window_mass_sq <= total * (1 + 1e-9))
    assert report.t_blowup_estimate > report.times[-1]
    assert 0.0 < report.liminf_estimate <= total * (1 + 1e-9)
    # late-window masses concentrate: the last recorded value dominates most
    # of the run's minimum
    assert report.window_mass_sq[-1] >= report.liminf_estimate - 1e-12


def test_pcs_concentration_eventually_nondecreasing(ground_state_mid):
    u0, _ = pcs_blowup(ground_state_mid, T=1.0)
    cfg = EvolutionConfig(dt0=1e-3, t_end=1.5, checkpoint_stride=128)
    traj = evolve(u0, cfg)
    assert traj.termination.kind == "blowup_detected"
    report = concentration_scan(traj, ground_state_mid, 0.3)
    tail = report.window_mass_sq[-max(3, len(report.window_mass_sq) // 10):]
    assert np.all(np.diff(tail) >= -1e-6 * report.reference_mass_sq)


def test_blowup_report_contents(blowup_traj):
    rep = blowup_report(blowup_traj)
    assert rep["blowup"] is True
    assert np.isfinite(rep["t_blowup_estimate"])
    assert rep["l3_decade_ratio"] >= 2.0
    assert rep["grad_growth_factor"] >= 10.0
    target = abs(16.0 * blowup_traj.initial_energy)
    assert rep["virial_consistency"] < 0.02 * target


def test_blowup_report_completed_run(ground_state_mid):
    u0 = RadialField(ground_state_mid.q.grid, 0.5 * ground_state_mid.q.values)
    cfg = EvolutionConfig(dt0=1e-3, t_end=0.5, checkpoint_stride=10**9)
    traj = evolve(u0, cfg)
    rep = blowup_report(traj)
    assert rep["blowup"] is False
    assert rep["virial_consistency"] < 0.02 * max(
        abs(16 * traj.initial_energy), 0.01 * traj.initial_mass**2
    )


def test_blowup_report_empty_rejected(grid_small):
    with pytest.raises(InsufficientDataError):
        blowup_report(Trajectory(grid=grid_small))
