"""Initial-data presets and the seeded random field family for inequality checks."""

from __future__ import annotations

import numpy as np

from .grid import RadialField, RadialGrid
from .ground_state import GroundState
from .symmetries import apply_pcs, stationary_solution

GAUSSIAN_SIGMA = 2.0  # wide enough that the grid's dispersion error stays under 1e-5


def gaussian(grid: RadialGrid, amplitude: float, sigma: float = GAUSSIAN_SIGMA) -> RadialField:
    return RadialField(grid, amplitude * np.exp(-grid.r**2 / (2.0 * sigma**2)).astype(complex))


def ground_state_scaled(q: GroundState, amplitude: float) -> RadialField:
    return RadialField(q.q.grid, amplitude * q.q.values)


def pcs_blowup(q: GroundState, T: float = 1.0) -> tuple[RadialField, float]:
    """Initial data of the explicit minimal-mass blow-up solution.

    Pseudo-conformal transform of the standing wave at t = 0; the returned
    mapped time is -1/T, and the transformed solution blows up when its own
    clock reaches 0 (i.e. 1/T time units after the start).
    """
    field, mapped = apply_pcs(stationary_solution(q, 0.0), 0.0, T)
    return field, mapped


def random_smooth_field(grid: RadialGrid, rng: np.random.Generator) -> RadialField:
    """One sample of the seeded random family: five signed Gaussians plus a chirp.

    Widths uniform in [0.3, 4], signed amplitudes in [-1, 1], all centered at
    the origin, multiplied by a random radial quadratic phase.
    """
    vals = np.zeros(grid.n)
    for _ in range(5):
        width = rng.uniform(0.3, 4.0)
        amp = rng.uniform(-1.0, 1.0)
        vals = vals + amp * np.exp(-grid.r**2 / (2.0 * width**2))
    chirp = rng.uniform(-0.5, 0.5)
    return RadialField(grid, vals * np.exp(1j * chirp * grid.r**2))
