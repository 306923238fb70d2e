"""Numerical laboratory for the 4D mass-critical focusing Hartree equation."""

from .diagnostics import ConcentrationReport, blowup_report, concentration_scan, window_mass
from .evolution import (
    EvolutionConfig,
    Termination,
    Trajectory,
    TrajectorySample,
    evolve,
    free_reference,
    spectral_tail_fraction,
    step_strang,
    virial_series,
)
from .grid import (
    RadialField,
    RadialGrid,
    integrate,
    kinetic,
    mass,
    radial_momentum,
    variance,
)
from .ground_state import (
    GroundState,
    gradient_flow_step,
    pde_residual,
    shooting_refine,
    solve_ground_state,
)
from .potential import Potential, energy, gn_functional, lv4, potential, potential_oracle
from .symmetries import SymmetryParams, apply_pcs, apply_scaling, orthogonal, stationary_solution

__version__ = "0.1.0"

__all__ = [
    "ConcentrationReport",
    "EvolutionConfig",
    "GroundState",
    "Potential",
    "RadialField",
    "RadialGrid",
    "SymmetryParams",
    "Termination",
    "Trajectory",
    "TrajectorySample",
    "apply_pcs",
    "apply_scaling",
    "blowup_report",
    "concentration_scan",
    "energy",
    "evolve",
    "free_reference",
    "gn_functional",
    "gradient_flow_step",
    "integrate",
    "kinetic",
    "lv4",
    "mass",
    "orthogonal",
    "pde_residual",
    "potential",
    "potential_oracle",
    "radial_momentum",
    "shooting_refine",
    "solve_ground_state",
    "spectral_tail_fraction",
    "stationary_solution",
    "step_strang",
    "variance",
    "virial_series",
    "window_mass",
]
