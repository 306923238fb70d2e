"""Experiment runner.

Subcommands: ground-state, evolve, gn-check, concentration, transform,
acceptance.  Configuration comes from one declarative JSON file (--config)
with dotted --set overrides; unknown keys are rejected.  The artifact
directory defaults to $HARTREE_LAB_OUT or ./artifacts.  Identical config
(and seed, for randomized commands) reproduces byte-identical outputs.

Exit codes: 0 success, 1 scientific-check failure, 2 usage or config error,
3 internal error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import checkpoint as ckpt
from .acceptance import AcceptanceLab, run_gn_check
from .diagnostics import blowup_report, concentration_scan
from .errors import IterationLimitError
from .evolution import EvolutionConfig, evolve
from .grid import RadialGrid, mass
from .ground_state import GroundState, solve_ground_state
from .presets import gaussian, ground_state_scaled, pcs_blowup
from .symmetries import apply_pcs, apply_scaling

EXIT_OK = 0
EXIT_SCIENCE = 1
EXIT_CONFIG = 2
EXIT_INTERNAL = 3

DEFECT_NAMES = ("pde_residual", "pohozaev_grad_defect", "pohozaev_lv_defect", "energy_defect")

DEFAULTS = {
    "grid": {"n": 4096, "r_max": 32.0},
    "ground_state": {"tol": 1e-6, "max_iter": 20000, "defect_tol": 1e-3},
    "evolve": {
        "init": "gaussian",
        "amplitude": 1.0,
        "sigma": 2.0,
        "dt0": 1e-3,
        "t_end": 1.0,
        "cfl_safety": 0.9,
        "monitor_stride": 16,
        "checkpoint_stride": 4096,
        "blowup_gradient_factor": 10.0,
        "spectral_tail_threshold": 0.01,
        "nonlinearity": 1.0,
        "pcs_T": 1.0,
        "ground_state": None,
    },
    "gn_check": {"samples": 1000, "seed": None, "ground_state": None},
    "concentration": {"alpha": 0.3, "run_dir": None, "ground_state": None},
    "transform": {"kind": None, "input": None, "output": None, "params": {}},
}


class ConfigError(ValueError):
    pass


def _merge_section(name: str, user: dict) -> dict:
    base = dict(DEFAULTS[name])
    for key, value in user.items():
        if key not in base:
            raise ConfigError(f"unknown key '{name}.{key}'")
        base[key] = value
    return base


def load_config(path: str | None, overrides: list[str]) -> dict:
    raw: dict = {}
    if path:
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("config root must be a JSON object")
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"--set needs key=value, got '{item}'")
        dotted, text = item.split("=", 1)
        keys = dotted.split(".")
        try:
            value = json.loads(text)
        except json.JSONDecodeError:
            value = text
        node = raw
        for k in keys[:-1]:
            node = node.setdefault(k, {})
            if not isinstance(node, dict):
                raise ConfigError(f"--set path '{dotted}' crosses a non-object")
        node[keys[-1]] = value
    unknown = set(raw) - set(DEFAULTS)
    if unknown:
        raise ConfigError(f"unknown config section(s): {sorted(unknown)}")
    return {name: _merge_section(name, raw.get(name, {})) for name in DEFAULTS}


def _grid(cfg: dict) -> RadialGrid:
    g = cfg["grid"]
    n, r_max = int(g["n"]), float(g["r_max"])
    if n < 8:
        raise ConfigError(f"grid.n must be at least 8, got {n}")
    return RadialGrid(n, r_max)


def _write_json(path, payload: dict) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _load_or_solve_ground_state(cfg: dict, grid: RadialGrid, path_opt, out: Path) -> GroundState:
    if path_opt:
        fld, _, _ = ckpt.read_field(path_opt)
        if fld.grid != grid:
            raise ConfigError("ground-state checkpoint grid does not match grid config")
        from .ground_state import pde_residual
        from .grid import integrate, radial_derivative
        from .potential import potential_profile

        vals = np.real(fld.values)
        m2 = integrate(grid, vals**2)
        grad2 = integrate(grid, radial_derivative(grid, vals) ** 2)
        quartic = integrate(grid, potential_profile(grid, vals**2) * vals**2)
        return GroundState(
            q=fld,
            pde_residual=pde_residual(grid, vals),
            pohozaev_grad_defect=abs(grad2 - m2) / m2,
            pohozaev_lv_defect=abs(quartic - 2 * m2) / (2 * m2),
            energy_defect=abs(0.5 * grad2 - 0.25 * quartic) / m2,
            sharp_J=m2 * grad2 / quartic,
            iterations=0,
        )
    gs_cfg = cfg["ground_state"]
    state = solve_ground_state(grid, float(gs_cfg["tol"]), int(gs_cfg["max_iter"]))
    ckpt.write_field(out / "ground_state.h4c", state.q, meta={"kind": "ground_state"})
    return state


def cmd_ground_state(cfg: dict, out: Path) -> int:
    grid = _grid(cfg)
    gs_cfg = cfg["ground_state"]
    try:
        state = solve_ground_state(grid, float(gs_cfg["tol"]), int(gs_cfg["max_iter"]))
    except IterationLimitError as exc:
        _write_json(out / "ground_state_report.json", {"error": str(exc), "report": exc.report})
        print(f"ground-state: {exc}", file=sys.stderr)
        return EXIT_SCIENCE
    ckpt.write_field(out / "ground_state.h4c", state.q, meta={"kind": "ground_state"})
    report = state.report()
    _write_json(out / "ground_state_report.json", report)
    defect_tol = float(gs_cfg["defect_tol"])
    bad = [n for n in DEFECT_NAMES[1:] if report[n] >= defect_tol]
    print(f"ground-state: mass = {report['mass']:.8f}, residual = {report['pde_residual']:.2e}")
    return EXIT_OK if not bad else EXIT_SCIENCE


def _initial_data(cfg: dict, grid: RadialGrid, amplitude: float, out: Path):
    e = cfg["evolve"]
    init = e["init"]
    meta = {"init": str(init), "amplitude": amplitude}
    if init == "gaussian":
        return gaussian(grid, amplitude, float(e["sigma"])), meta
    if init == "ground_state_scaled":
        q = _load_or_solve_ground_state(cfg, grid, e["ground_state"], out)
        return ground_state_scaled(q, amplitude), meta
    if init == "pcs_blowup":
        q = _load_or_solve_ground_state(cfg, grid, e["ground_state"], out)
        u0, mapped = pcs_blowup(q, T=float(e["pcs_T"]))
        meta["mapped_time"] = mapped
        return u0, meta
    path = Path(str(init))
    if not path.exists():
        raise ConfigError(f"evolve.init '{init}' is neither a preset nor a checkpoint file")
    fld, _, _ = ckpt.read_field(path)
    if fld.grid != grid:
        raise ConfigError("checkpoint grid does not match grid config")
    return fld, meta


def _evolve_entry(cfg: dict, amplitude: float, out_dir: str) -> dict:
    grid = _grid(cfg)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    u0, meta = _initial_data(cfg, grid, amplitude, out)
    e = cfg["evolve"]
    run_cfg = EvolutionConfig(
        dt0=float(e["dt0"]),
        t_end=float(e["t_end"]),
        cfl_safety=float(e["cfl_safety"]),
        monitor_stride=int(e["monitor_stride"]),
        checkpoint_stride=int(e["checkpoint_stride"]),
        blowup_gradient_factor=float(e["blowup_gradient_factor"]),
        spectral_tail_threshold=float(e["spectral_tail_threshold"]),
        nonlinearity=float(e["nonlinearity"]),
    )
    traj = evolve(u0, run_cfg)
    ckpt.write_run_directory(out, traj, meta=meta)
    report = blowup_report(traj)
    report["init"] = meta
    _write_json(out / "report.json", report)
    return {"out": str(out), "termination": traj.termination.kind}


def cmd_evolve(cfg: dict, out: Path, jobs: int) -> int:
    amplitude = cfg["evolve"]["amplitude"]
    if isinstance(amplitude, list):
        entries = [(float(a), out / f"run_amp_{float(a):g}") for a in amplitude]
        if jobs > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                futures = [
                    pool.submit(_evolve_entry, cfg, a, str(d)) for a, d in entries
                ]
                results = [f.result() for f in futures]
        else:
            results = [_evolve_entry(cfg, a, str(d)) for a, d in entries]
    else:
        results = [_evolve_entry(cfg, float(amplitude), str(out))]
    for res in results:
        print(f"evolve: {res['out']} -> {res['termination']}")
    return EXIT_OK


def cmd_gn_check(cfg: dict, out: Path) -> int:
    g_cfg = cfg["gn_check"]
    samples = int(g_cfg["samples"])
    if samples < 1:
        raise ConfigError("gn_check.samples must be >= 1")
    if g_cfg["seed"] is None:
        raise ConfigError("gn_check.seed is required (randomized subcommands demand a seed)")
    grid = _grid(cfg)
    out.mkdir(parents=True, exist_ok=True)
    q = _load_or_solve_ground_state(cfg, grid, g_cfg["ground_state"], out)
    min_j, med_j, j_q, hist, edges, resampled = run_gn_check(q, samples, int(g_cfg["seed"]))
    passed = min_j >= j_q * (1.0 - 1e-6)
    near_extremal = abs(min_j - j_q) / j_q < 1e-3
    _write_json(
        out / "gn_check.json",
        {
            "samples": samples,
            "seed": int(g_cfg["seed"]),
            "J_ground_state": j_q,
            "min_J": min_j,
            "median_J": med_j,
            "min_is_near_extremal": near_extremal,
            "degenerate_resampled": resampled,
            "histogram_log10_J_over_JQ": {
                "counts": [int(c) for c in hist],
                "edges": [float(x) for x in edges],
            },
            "passed": passed,
        },
    )
    print(f"gn-check: min J/J(Q) = {min_j / j_q:.9f} over {samples} samples "
          f"({'near-extremal sample present' if near_extremal else 'all samples interior'})")
    return EXIT_OK if passed else EXIT_SCIENCE


def cmd_concentration(cfg: dict, out: Path) -> int:
    c_cfg = cfg["concentration"]
    if not c_cfg["run_dir"]:
        raise ConfigError("concentration.run_dir is required")
    traj = ckpt.read_run_directory(c_cfg["run_dir"])
    grid = traj.grid
    q = _load_or_solve_ground_state(cfg, grid, c_cfg["ground_state"], out)
    report = concentration_scan(traj, q, float(c_cfg["alpha"]))
    out.mkdir(parents=True, exist_ok=True)
    ckpt.write_concentration_csv(out / "concentration.csv", report)
    payload = {
        "alpha": report.alpha,
        "t_blowup_estimate": report.t_blowup_estimate,
        "liminf_estimate": report.liminf_estimate,
        "reference_mass_sq": report.reference_mass_sq,
        "reference_label": "||Q||^2 (conjectured minimal-mass threshold)",
        "ratio": report.liminf_estimate / report.reference_mass_sq,
        "hypothesis_sqrt_ratio_max": report.hypothesis_sqrt_ratio,
        "hypothesis_grad_window_min": report.hypothesis_grad_window,
    }
    _write_json(out / "concentration.json", payload)
    print(f"concentration: liminf/||Q||^2 = {payload['ratio']:.4f}")
    return EXIT_OK if payload["ratio"] >= 0.95 else EXIT_SCIENCE


def cmd_transform(cfg: dict, out: Path) -> int:
    t_cfg = cfg["transform"]
    if t_cfg["kind"] not in ("scaling", "pcs"):
        raise ConfigError("transform.kind must be 'scaling' or 'pcs'")
    if not t_cfg["input"] or not t_cfg["output"]:
        raise ConfigError("transform.input and transform.output are required")
    fld, t_in, meta = ckpt.read_field(t_cfg["input"])
    params = t_cfg["params"]
    if t_cfg["kind"] == "scaling":
        lam = float(params.get("lam", 1.0))
        new = apply_scaling(fld, lam)
        t_out = t_in
        meta.update({"transform": "scaling", "lam": lam})
    else:
        t = float(params.get("t", t_in))
        big_t = float(params.get("T", 1.0))
        new, t_out = apply_pcs(fld, t, big_t)
        meta.update({"transform": "pcs", "t": t, "T": big_t})
    out_path = Path(t_cfg["output"])
    out_path.parent.mkdir(parents=True, exist_ok=True)
    ckpt.write_field(out_path, new, time=t_out, meta=meta)
    print(f"transform: wrote {out_path} (mass {mass(new):.8f})")
    return EXIT_OK


def cmd_acceptance(cfg: dict, out: Path) -> int:
    grid = _grid(cfg)
    lab = AcceptanceLab(n_desk=grid.n, n_fine=2 * grid.n, r_max=grid.r_max)
    results = lab.run_all()
    out.mkdir(parents=True, exist_ok=True)
    for res in results:
        print(res.line())
        for detail in res.details:
            print("      " + detail)
    payload = {
        "criteria": [
            {"index": r.index, "name": r.name, "passed": r.passed, "details": r.details}
            for r in results
        ],
        "all_passed": all(r.passed for r in results),
    }
    _write_json(out / "acceptance.json", payload)
    return EXIT_OK if payload["all_passed"] else EXIT_SCIENCE


def _add_common(parser: argparse.ArgumentParser, root: bool) -> None:
    # on subparsers the defaults are suppressed so values given before the
    # subcommand survive (append actions then extend, store actions override)
    d = {} if root else {"default": argparse.SUPPRESS}
    parser.add_argument("--config", help="JSON config file", **({} if root else d))
    parser.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="dotted config override, e.g. --set grid.n=1024",
                        **({"default": []} if root else d))
    parser.add_argument("--out",
                        help="artifact directory (default $HARTREE_LAB_OUT or ./artifacts)",
                        **({} if root else d))
    parser.add_argument("--jobs", type=int,
                        help="concurrent sweep entries for parameter sweeps",
                        **({"default": 1} if root else d))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hartree4d",
        description="Numerical laboratory for the 4D mass-critical focusing Hartree equation.",
    )
    _add_common(parser, root=True)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("ground-state", "evolve", "gn-check", "concentration", "transform", "acceptance"):
        _add_common(sub.add_parser(name), root=False)
    return parser


COMMANDS = {
    "ground-state": cmd_ground_state,
    "gn-check": cmd_gn_check,
    "concentration": cmd_concentration,
    "transform": cmd_transform,
    "acceptance": cmd_acceptance,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    out = Path(args.out or os.environ.get("HARTREE_LAB_OUT", "artifacts"))
    try:
        cfg = load_config(args.config, args.set)
    except ConfigError as exc:
        print(json.dumps({"error": "config", "message": str(exc)}), file=sys.stderr)
        return EXIT_CONFIG
    try:
        out.mkdir(parents=True, exist_ok=True)
        if args.command == "evolve":
            return cmd_evolve(cfg, out, max(1, args.jobs))
        return COMMANDS[args.command](cfg, out)
    except ConfigError as exc:
        print(json.dumps({"error": "config", "message": str(exc)}), file=sys.stderr)
        return EXIT_CONFIG
    except IterationLimitError as exc:
        print(json.dumps({"error": "science", "message": str(exc)}), file=sys.stderr)
        return EXIT_SCIENCE
    except Exception as exc:  # noqa: BLE001 - the CLI boundary reports and exits
        print(json.dumps({"error": "internal", "message": f"{type(exc).__name__}: {exc}"}),
              file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
