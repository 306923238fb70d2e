"""Symmetry group of the equation as it acts on radial fields, plus the
parameter-level group element and its orthogonality predicate.

Field-level actions implemented here: amplitude-critical scaling
u -> lam^2 u(lam r) and the pseudo-conformal transform.  Galilean boosts
(xi != 0) and spatial translations (x0 != 0) break radial symmetry, so they
exist only as parameters: the orthogonality predicate does their arithmetic
but no field is ever boosted or translated.

The pseudo-conformal transform is implemented as the time-paired map

    (t, u) -> (s, v),  s = 1/(t - T),
    v(x) = |s|^{-2} conj(u)(x/s) exp(i |x|^2 / (4s)),

which sends snapshots of solutions to snapshots of solutions (it is the
textbook inversion applied to the T-translated solution) and is an exact
involution when reapplied with the matched parameters (t', T') = (s, 0).
Applied to the standing wave e^{it} Q at t = 0 with T > 0 it produces
initial data of the explicit finite-time blow-up solution of minimal mass.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import AliasingWarning, InsufficientSequenceError, TruncationWarning
from .grid import RadialField, RadialGrid, integrate
from .ground_state import GroundState

DIVERGENCE_FACTOR = 3.0
MIN_SEQUENCE = 8


@dataclass(frozen=True)
class SymmetryParams:
    """One group element (rho, t0, xi, x0); xi and x0 are 4-vectors."""

    rho: float
    t0: float
    xi: tuple[float, float, float, float]
    x0: tuple[float, float, float, float]

    def __post_init__(self):
        if self.rho <= 0:
            raise ValueError(f"scale must be positive, got rho={self.rho}")
        if len(self.xi) != 4 or len(self.x0) != 4:
            raise ValueError("xi and x0 must be 4-vectors")


def _resample(grid: RadialGrid, values: np.ndarray, radii: np.ndarray) -> np.ndarray:
    """Cubic-spline samples of a radial field at arbitrary radii, zero past r_max."""
    f0_re = (9.0 * values[0] - values[1]) / 8.0
    rs = np.concatenate(([0.0], grid.r))
    out = np.zeros(len(radii), dtype=complex)
    inside = radii <= grid.r[-1]
    re = CubicSpline(rs, np.concatenate(([np.real(f0_re)], np.real(values))),
                     bc_type=((1, 0.0), "not-a-knot"))
    out[inside] = re(radii[inside])
    if np.iscomplexobj(values) and np.any(np.imag(values)):
        f0_im = (9.0 * np.imag(values[0]) - np.imag(values[1])) / 8.0
        im = CubicSpline(rs, np.concatenate(([f0_im], np.imag(values))),
                         bc_type=((1, 0.0), "not-a-knot"))
        out[inside] = out[inside] + 1j * im(radii[inside])
    return out


def _typical_wavenumber(grid: RadialGrid, values: np.ndarray) -> float:
    """RMS wavenumber estimate from first differences."""
    diff = np.abs(np.diff(values)) ** 2
    w_face = 0.5 * (grid.weights[:-1] + grid.weights[1:])
    num = float(np.dot(w_face, diff)) / grid.dr**2
    den = integrate(grid, np.abs(values) ** 2)
    return np.sqrt(num / den) if den > 0 else 0.0


def apply_scaling(u: RadialField, lam: float) -> RadialField:
    """Mass-critical spatial scaling u -> lam^2 u(lam r), resampled onto the grid."""
    if lam <= 0:
        raise ValueError(f"need lam > 0, got {lam}")
    if lam == 1.0:
        return u.copy()
    k_typ = _typical_wavenumber(u.grid, u.values)
    if lam * k_typ > 0.5 * np.pi / u.grid.dr:
        warnings.warn(
            f"scaling by lam={lam} pushes the typical wavenumber past half the "
            "resolvable band; expect aliasing",
            AliasingWarning,
            stacklevel=2,
        )
    vals = lam**2 * _resample(u.grid, u.values, lam * u.grid.r)
    return RadialField(u.grid, vals)


def apply_pcs(u: RadialField, t: float, T: float) -> tuple[RadialField, float]:
    """Pseudo-conformal transform of the snapshot (t, u); returns (field, mapped time)."""
    if t == T:
        raise ValueError("the transform is singular at t = T")
    s = 1.0 / (t - T)
    radii = u.grid.r / abs(s)
    # the output only sees input content at radii <= r_max/|s|
    kept = np.where(u.grid.r <= u.grid.r_max / abs(s), u.values, 0.0)
    lost = integrate(u.grid, np.abs(u.values) ** 2) - integrate(u.grid, np.abs(kept) ** 2)
    if lost > 1e-12 * integrate(u.grid, np.abs(u.values) ** 2):
        warnings.warn(
            f"mapped support exceeds r_max (|s| = {abs(s):.3g}); "
            f"truncated squared mass {lost:.3e}",
            TruncationWarning,
            stacklevel=2,
        )
    prof = np.conj(_resample(u.grid, u.values, radii))
    vals = prof * np.exp(0.25j * u.grid.r**2 / s) / s**2
    return RadialField(u.grid, vals), s


def stationary_solution(q: GroundState, t: float) -> RadialField:
    """The standing wave e^{it} Q at time t."""
    return RadialField(q.q.grid, np.exp(1j * t) * q.q.values)


def _diverges(seq: np.ndarray, factor: float) -> bool:
    """Finite-sample divergence proxy: strictly increasing over the last half
    and the final term beats ``factor`` times the first-half median."""
    n = len(seq)
    half = n // 2
    tail = seq[half:]
    if np.any(np.diff(tail) <= 0):
        return False
    head_median = float(np.median(seq[:half]))
    return bool(seq[-1] > factor * max(head_median, 1e-300))


def orthogonal(
    a: list[SymmetryParams],
    b: list[SymmetryParams],
    divergence_factor: float = DIVERGENCE_FACTOR,
) -> bool:
    """Decide the divergence-based orthogonality of two parameter sequences.

    True when the scale quotients rho_a/rho_b + rho_b/rho_a diverge, or when
    the scales agree termwise and the combined frequency/time/translation
    mismatch diverges.  Divergence of a finite sequence is decided by the
    proxy in ``_diverges``; callers needing confidence must supply longer
    sequences.
    """
    if len(a) != len(b):
        raise InsufficientSequenceError("sequences must have equal length")
    if len(a) < MIN_SEQUENCE:
        raise InsufficientSequenceError(
            f"need at least {MIN_SEQUENCE} terms, got {len(a)}"
        )
    rho_a = np.array([p.rho for p in a])
    rho_b = np.array([p.rho for p in b])
    quotient = rho_a / rho_b + rho_b / rho_a
    if _diverges(quotient, divergence_factor):
        return True
    if not np.allclose(rho_a, rho_b, rtol=1e-12, atol=0.0):
        return False
    xi_a = np.array([p.xi for p in a])
    xi_b = np.array([p.xi for p in b])
    x_a = np.array([p.x0 for p in a])
    x_b = np.array([p.x0 for p in b])
    t_a = np.array([p.t0 for p in a])
    t_b = np.array([p.t0 for p in b])
    dxi = np.linalg.norm(xi_a - xi_b, axis=1)
    drift = np.linalg.norm(
        (xi_a - xi_b) * (t_a / rho_a)[:, None] + x_a - x_b, axis=1
    )
    combined = dxi / rho_a + np.abs(t_a - t_b) + drift
    return _diverges(combined, divergence_factor)
