#!/usr/bin/env python3
"""Blow-up portrait: run supercritical data to detection and dump the series.

Produces, under the output directory:
  trajectory.csv      monitor series with the termination footer
  concentration.csv   shrinking-window mass series
  report.json         detection summary (t estimate, l3 growth, virial fit)

Example:
  python scripts/blowup_portrait.py --n 2048 --amplitude 1.2 --out artifacts/blowup
"""

import argparse
import json
from pathlib import Path

from hartree4d import (
    EvolutionConfig,
    RadialField,
    RadialGrid,
    blowup_report,
    concentration_scan,
    evolve,
    solve_ground_state,
)
from hartree4d.checkpoint import write_concentration_csv, write_run_directory


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=2048)
    ap.add_argument("--r-max", type=float, default=32.0)
    ap.add_argument("--amplitude", type=float, default=1.2)
    ap.add_argument("--t-end", type=float, default=3.0)
    ap.add_argument("--alpha", type=float, default=0.3)
    ap.add_argument("--out", default="artifacts/blowup")
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    grid = RadialGrid(args.n, args.r_max)
    print(f"solving ground state on n={args.n}, r_max={args.r_max} ...")
    gs = solve_ground_state(grid)
    print(f"  mass(Q) = {gs.report()['mass']:.8f}, residual = {gs.pde_residual:.2e}")

    u0 = RadialField(grid, args.amplitude * gs.q.values)
    cfg = EvolutionConfig(dt0=1e-3, t_end=args.t_end, checkpoint_stride=256)
    print(f"evolving {args.amplitude} x Q ...")
    traj = evolve(u0, cfg)
    print(f"  terminated: {traj.termination.kind} at t = {traj.termination.t:.4f}")

    write_run_directory(out, traj)
    report = blowup_report(traj)
    if traj.termination.kind == "blowup_detected":
        scan = concentration_scan(traj, gs, args.alpha)
        write_concentration_csv(out / "concentration.csv", scan)
        report["concentration_liminf_over_reference"] = (
            scan.liminf_estimate / scan.reference_mass_sq
        )
        print(f"  window-mass liminf / ||Q||^2 = {report['concentration_liminf_over_reference']:.4f}")
    (out / "report.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    print(f"wrote {out}/")


if __name__ == "__main__":
    main()
