"""Single record of numerical tolerances used across the package."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    continuity: float = 1e-9
    boundary: float = 1e-10
    matching: float = 1e-9
    det_rel: float = 1e-12
    energy_rel: float = 1e-6
    series_switch: float = 1e-3  # |x - 1| below which D and g use series in y = x - 1
    degenerate_denominator: float = 1e-30
    contact_root: float = 1e-10
    feasibility: float = 1e-9
    kkt: float = 1e-8
    partition: float = 1e-10
    reconstruction: float = 1e-4
    plancherel: float = 1e-6
    tail_energy: float = 1e-8
    scaling: float = 1e-8
    eps_floor: float = 1e-12
    solver_energy: float = 1e-2  # obstacle solvers vs closed-form energy
    solver_agreement: float = 5e-3  # penalized vs QP energy
    contact_cells: float = 2.0
    pinch_factor: float = 1.05  # allowed excess of the double-log quotient over the sharp constant
    gap_final: float = 1e-6  # feasibility gap at the end of the penalty schedule
    transform: float = 1e-10  # Gaussian self-transform error


TOL = Tolerances()
