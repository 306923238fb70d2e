import numpy as np
import pytest

from hartree4d import EvolutionConfig, RadialField, RadialGrid, evolve
from hartree4d.checkpoint import (
    read_field,
    read_run_directory,
    write_field,
    write_run_directory,
    write_trajectory_csv,
)
from hartree4d.errors import CheckpointFormatError


def test_binary_round_trip(tmp_path, grid_small):
    rng = np.random.default_rng(0)
    u = RadialField(grid_small, rng.normal(size=grid_small.n) + 1j * rng.normal(size=grid_small.n))
    path = tmp_path / "field.h4c"
    write_field(path, u, time=1.25, meta={"kind": "test"})
    loaded, t, meta = read_field(path)
    assert t == 1.25
    assert meta == {"kind": "test"}
    assert loaded.grid == grid_small
    assert np.array_equal(loaded.values, u.values)


def test_write_is_deterministic(tmp_path, gaussian_small):
    p1, p2 = tmp_path / "a.h4c", tmp_path / "b.h4c"
    write_field(p1, gaussian_small, time=0.5, meta={"x": 1})
    write_field(p2, gaussian_small, time=0.5, meta={"x": 1})
    assert p1.read_bytes() == p2.read_bytes()


def test_text_variant_ingestion(tmp_path):
    g = RadialGrid(32, 4.0)
    vals = np.exp(-g.r**2) * (1.0 + 0.5j)
    lines = [f"{r:.17g} {v.real:.17g} {v.imag:.17g}" for r, v in zip(g.r, vals)]
    path = tmp_path / "field.txt"
    path.write_text("\n".join(lines) + "\n")
    loaded, t, meta = read_field(path)
    assert loaded.grid == g
    assert np.allclose(loaded.values, vals, rtol=1e-15)
    assert t == 0.0


def test_malformed_files_rejected(tmp_path):
    bad = tmp_path / "bad.h4c"
    bad.write_bytes(b'{"format_version": 99, "n": 4, "r_max": 1.0, "time": 0}\n' + b"\x00" * 64)
    with pytest.raises(CheckpointFormatError):
        read_field(bad)
    bad2 = tmp_path / "bad2.h4c"
    bad2.write_bytes(b'{"format_version": 1, "n": 4, "r_max": 1.0, "time": 0}\n' + b"\x00" * 8)
    with pytest.raises(CheckpointFormatError):
        read_field(bad2)
    garbled = tmp_path / "garbled.txt"
    garbled.write_text("not a checkpoint at all\n")
    with pytest.raises(CheckpointFormatError):
        read_field(garbled)


def test_trajectory_csv_and_run_directory(tmp_path, ground_state_mid):
    u0 = RadialField(ground_state_mid.q.grid, 0.5 * ground_state_mid.q.values)
    cfg = EvolutionConfig(dt0=1e-3, t_end=0.05, checkpoint_stride=256)
    traj = evolve(u0, cfg)
    run = tmp_path / "run"
    write_run_directory(run, traj)

    text = (run / "trajectory.csv").read_text().splitlines()
    assert text[0] == "t,mass,energy,kinetic,lv4,variance,grad_norm,l3_accum,concentration_mass"
    assert text[-1].startswith("# ")

    loaded = read_run_directory(run)
    assert loaded.termination.kind == "completed"
    assert len(loaded.samples) == len(traj.samples)
    assert loaded.samples[-1].t == pytest.approx(traj.samples[-1].t)
    assert loaded.samples[3].kinetic == pytest.approx(traj.samples[3].kinetic)
    assert len(loaded.checkpoints) == len(traj.checkpoints)
    assert np.array_equal(loaded.checkpoints[-1][1].values, traj.checkpoints[-1][1].values)
    assert loaded.initial_mass == pytest.approx(traj.initial_mass)


def test_csv_deterministic(tmp_path, ground_state_mid):
    u0 = RadialField(ground_state_mid.q.grid, 0.5 * ground_state_mid.q.values)
    cfg = EvolutionConfig(dt0=1e-3, t_end=0.02, checkpoint_stride=10**9)
    t1, t2 = evolve(u0, cfg), evolve(u0, cfg)
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    write_trajectory_csv(p1, t1)
    write_trajectory_csv(p2, t2)
    assert p1.read_bytes() == p2.read_bytes()
