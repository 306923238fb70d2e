"""Field checkpoint files and trajectory CSV export.

Checkpoint layout (binary, repo-wide): one UTF-8 JSON header line
``{"format_version": 1, "n": ..., "r_max": ..., "time": ..., "meta": {...}}``
terminated by a newline, followed by n complex samples as interleaved
little-endian float64 (re0, im0, re1, im1, ...).  A plain-text variant with
one ``r re im`` triple per line is accepted on read.

Trajectory CSV: the fixed monitor columns, then one comment-prefixed JSON
footer line carrying the termination record.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import CheckpointFormatError
from .evolution import Trajectory
from .grid import RadialField, RadialGrid

FORMAT_VERSION = 1
CSV_COLUMNS = (
    "t",
    "mass",
    "energy",
    "kinetic",
    "lv4",
    "variance",
    "grad_norm",
    "l3_accum",
    "concentration_mass",
)


def write_field(path, u: RadialField, time: float = 0.0, meta: dict | None = None) -> None:
    header = {
        "format_version": FORMAT_VERSION,
        "n": u.grid.n,
        "r_max": u.grid.r_max,
        "time": time,
        "meta": {str(k): str(v) for k, v in (meta or {}).items()},
    }
    payload = np.empty(2 * u.grid.n, dtype="<f8")
    payload[0::2] = np.real(u.values)
    payload[1::2] = np.imag(u.values)
    with open(path, "wb") as fh:
        fh.write(json.dumps(header, sort_keys=True).encode("utf-8"))
        fh.write(b"\n")
        fh.write(payload.tobytes())


def read_field(path) -> tuple[RadialField, float, dict]:
    """Read a checkpoint (binary or ``r re im`` text); returns (field, time, meta)."""
    raw = Path(path).read_bytes()
    if raw[:1] == b"{":
        nl = raw.find(b"\n")
        if nl < 0:
            raise CheckpointFormatError(f"{path}: missing header terminator")
        try:
            header = json.loads(raw[:nl].decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise CheckpointFormatError(f"{path}: bad header ({exc})") from exc
        if header.get("format_version") != FORMAT_VERSION:
            raise CheckpointFormatError(
                f"{path}: unsupported format_version {header.get('format_version')}"
            )
        n = int(header["n"])
        body = raw[nl + 1:]
        if len(body) != 16 * n:
            raise CheckpointFormatError(
                f"{path}: expected {16 * n} payload bytes, found {len(body)}"
            )
        flat = np.frombuffer(body, dtype="<f8")
        grid = RadialGrid(n, float(header["r_max"]))
        values = flat[0::2] + 1j * flat[1::2]
        return RadialField(grid, values), float(header["time"]), dict(header.get("meta", {}))
    return _read_text(path, raw)


def _read_text(path, raw: bytes) -> tuple[RadialField, float, dict]:
    try:
        rows = np.loadtxt(raw.decode("utf-8").splitlines(), ndmin=2)
    except ValueError as exc:
        raise CheckpointFormatError(f"{path}: neither binary header nor r/re/im text") from exc
    if rows.shape[1] != 3:
        raise CheckpointFormatError(f"{path}: text checkpoints need 3 columns, got {rows.shape[1]}")
    r = rows[:, 0]
    n = len(r)
    dr = r[1] - r[0] if n > 1 else 2.0 * r[0]
    grid = RadialGrid(n, float(n * dr))
    if not np.allclose(r, grid.r, rtol=1e-9, atol=1e-12):
        raise CheckpointFormatError(f"{path}: radii are not a cell-centered uniform mesh")
    return RadialField(grid, rows[:, 1] + 1j * rows[:, 2]), 0.0, {}


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_trajectory_csv(path, traj: Trajectory) -> None:
    term = traj.termination
    footer = {
        "termination": term.kind if term else "unknown",
        "t": term.t if term else None,
        "t_blowup_estimate": term.t_blowup_estimate if term else None,
        "detail": term.detail if term else "",
    }
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for s in traj.samples:
            fh.write(",".join(_fmt(getattr(s, c)) for c in CSV_COLUMNS) + "\n")
        fh.write("# " + json.dumps(footer, sort_keys=True) + "\n")


def write_concentration_csv(path, report) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("t,lambda,window_mass_sq\n")
        for t, lam, wm in report.rows():
            fh.write(f"{_fmt(t)},{_fmt(lam)},{_fmt(wm)}\n")


def write_run_directory(out_dir, traj: Trajectory, meta: dict | None = None) -> None:
    """Persist one evolution run: trajectory CSV plus numbered checkpoints."""
    out = Path(out_dir)
    (out / "checkpoints").mkdir(parents=True, exist_ok=True)
    write_trajectory_csv(out / "trajectory.csv", traj)
    for k, (t, fld) in enumerate(traj.checkpoints):
        write_field(out / "checkpoints" / f"ckpt_{k:06d}.h4c", fld, time=t, meta=meta)


def read_run_directory(run_dir) -> Trajectory:
    """Rebuild a Trajectory (samples, checkpoints, termination) from disk."""
    from .evolution import Termination, TrajectorySample

    run = Path(run_dir)
    lines = (run / "trajectory.csv").read_text(encoding="utf-8").splitlines()
    if not lines or lines[0].split(",") != list(CSV_COLUMNS):
        raise CheckpointFormatError(f"{run}: trajectory.csv has an unexpected header")
    samples = []
    footer = None
    for line in lines[1:]:
        if line.startswith("#"):
            footer = json.loads(line[1:].strip())
            continue
        vals = [float(x) for x in line.split(",")]
        samples.append(TrajectorySample(*vals))
    checkpoints = []
    for p in sorted((run / "checkpoints").glob("ckpt_*.h4c")):
        fld, t, _ = read_field(p)
        checkpoints.append((t, fld))
    if not checkpoints:
        raise CheckpointFormatError(f"{run}: no checkpoints found")
    grid = checkpoints[0][1].grid
    term = None
    if footer is not None:
        term = Termination(
            kind=footer.get("termination", "unknown"),
            t=footer.get("t") or (samples[-1].t if samples else 0.0),
            t_blowup_estimate=footer.get("t_blowup_estimate"),
            detail=footer.get("detail", ""),
        )
    traj = Trajectory(grid=grid, samples=samples, checkpoints=checkpoints, termination=term)
    if samples:
        traj.initial_mass = samples[0].mass
        traj.initial_energy = samples[0].energy
    return traj
