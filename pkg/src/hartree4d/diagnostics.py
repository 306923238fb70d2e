"""Mass-concentration scans and blow-up report assembly.

The concentration window is centered at the origin: radial symmetry pins the
concentration point there, so the sup over centers that appears in the
non-radial theory collapses.  Window radii follow lambda(t) = (T_est - t)^alpha
with alpha < 1/2, which shrinks slower than sqrt(T_est - t); the liminf is
approximated by the minimum over the final covered-time decade before
termination.  Both choices are finite-data proxies and are reported as such.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InsufficientDataError, WrongRegimeError
from .evolution import Trajectory, virial_series
from .grid import RadialField
from .ground_state import GroundState


@dataclass
class ConcentrationReport:
    times: np.ndarray
    window_radii: np.ndarray
    window_mass_sq: np.ndarray
    liminf_estimate: float
    reference_mass_sq: float  # ||Q||^2, standing in for the conjectured threshold
    alpha: float
    t_blowup_estimate: float
    hypothesis_sqrt_ratio: float  # max over samples of sqrt(T-t)/lambda(t); want -> 0
    hypothesis_grad_window: float  # min over samples of lambda(t) * grad_norm; want -> inf

    def rows(self):
        for t, lam, wm in zip(self.times, self.window_radii, self.window_mass_sq):
            yield t, lam, wm


def window_mass(u: RadialField, radius: float) -> float:
    """Squared mass inside |x| <= radius, boundary cell weighted fractionally."""
    grid = u.grid
    if not 0.0 < radius <= grid.r_max:
        raise ValueError(f"radius must lie in (0, r_max], got {radius}")
    dens = np.abs(u.values) ** 2
    contrib = grid.weights * dens
    idx = int(np.searchsorted(grid.faces[1:], radius))
    total = float(np.sum(contrib[:idx]))
    if idx < grid.n:
        frac = (radius - grid.faces[idx]) / grid.dr
        total += float(contrib[idx] * frac)
    return total


def concentration_scan(traj: Trajectory, q: GroundState, alpha: float) -> ConcentrationReport:
    """Window-mass series with shrinking radii on a detected blow-up trajectory."""
    if traj.termination is None or traj.termination.kind != "blowup_detected":
        raise WrongRegimeError(
            "concentration scan requires a trajectory that terminated in blow-up detection"
        )
    if not 0.0 < alpha < 0.5:
        raise ValueError(f"alpha must lie in (0, 1/2), got {alpha}")
    t_est = traj.termination.t_blowup_estimate
    checkpoints = [(t, fld) for t, fld in traj.checkpoints if t < t_est]
    if len(checkpoints) < 2:
        raise InsufficientDataError("need at least two checkpoints before the blow-up estimate")

    times = np.array([t for t, _ in checkpoints])
    radii = np.minimum((t_est - times) ** alpha, traj.grid.r_max)
    masses = np.array(
        [window_mass(fld, rad) for (_, fld), rad in zip(checkpoints, radii)]
    )

    # liminf proxy: minimum over the final decade of recorded checkpoints
    # (adaptive stepping crowds checkpoints toward the singular time, so the
    # index-based decade is the closest finite-data stand-in for t -> T)
    tail_start = max(len(masses) - max(1, len(masses) // 10), 0)
    liminf_estimate = float(np.min(masses[tail_start:]))

    # post-hoc hypothesis checks at the sample cadence
    s_times = traj.times()
    s_grads = traj.series("grad_norm")
    before = s_times < t_est
    lam_s = (t_est - s_times[before]) ** alpha
    sqrt_ratio = float(np.max(np.sqrt(t_est - s_times[before]) / lam_s))
    grad_window = float(np.min(lam_s * s_grads[before]))

    return ConcentrationReport(
        times=times,
        window_radii=radii,
        window_mass_sq=masses,
        liminf_estimate=liminf_estimate,
        reference_mass_sq=q.mass_squared,
        alpha=alpha,
        t_blowup_estimate=float(t_est),
        hypothesis_sqrt_ratio=sqrt_ratio,
        hypothesis_grad_window=grad_window,
    )


def _decade_growth(times: np.ndarray, series: np.ndarray) -> tuple[float, float]:
    """Increments of a cumulative series over the last and second-to-last time decades."""
    span = times[-1] - times[0]
    t1 = times[-1] - 0.1 * span
    t2 = times[-1] - 0.2 * span
    v_end = series[-1]
    v1 = float(np.interp(t1, times, series))
    v2 = float(np.interp(t2, times, series))
    return v_end - v1, v1 - v2


def blowup_report(traj: Trajectory) -> dict:
    """Deterministic JSON-ready summary of one trajectory."""
    if not traj.samples:
        raise InsufficientDataError("cannot report on an empty trajectory")
    term = traj.termination
    times = traj.times()
    grads = traj.series("grad_norm")
    report: dict = {
        "termination": term.kind if term else "unknown",
        "t_final": float(times[-1]),
        "samples": len(traj.samples),
        "mass_initial": traj.initial_mass,
        "energy_initial": traj.initial_energy,
        "mass_drift": float(abs(traj.samples[-1].mass - traj.initial_mass)
                            / max(traj.initial_mass, 1e-300)),
        "grad_growth_factor": float(grads[-1] / grads[0]),
        "blowup": bool(term and term.kind == "blowup_detected"),
    }
    if term and term.kind == "blowup_detected":
        report["t_blowup_estimate"] = float(term.t_blowup_estimate)
        l3 = traj.series("l3_accum")
        last, prev = _decade_growth(times, l3)
        report["l3_last_decade"] = last
        report["l3_previous_decade"] = prev
        report["l3_decade_ratio"] = float(last / prev) if prev > 0 else float("inf")
    if len(traj.samples) >= 10:
        two_c2, rms = virial_series(traj)
        report["virial_fit_2c2"] = two_c2
        report["virial_fit_rms"] = rms
        report["virial_consistency"] = float(abs(two_c2 - 16.0 * traj.initial_energy))
    return report
