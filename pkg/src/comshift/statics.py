"""Closed-form equilibrium analysis for wall pushing.

Three static models live here:

* the frictionless CoM sweep, where the contact force passes through the
  CoM and the normalised CoM ratio ``r_l`` sets how the weight splits
  between the rotor pairs;
* the tool-load equilibrium, where an end-effector force applied at an
  offset ``l_C`` from the contact line must be balanced by a vertical
  share of the back thrust;
* the friction-aware prediction of the plate position at which the back
  rotors can tilt fully horizontal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .params import PlatformParams, plate_from_com


class Infeasible(ValueError):
    """The equilibrium asks the back rotors for more than ``T2``."""


class NoFeasiblePlatePosition(ValueError):
    """A horizontal back-rotor tilt cannot be held for any admissible plate position."""


@dataclass(frozen=True)
class StaticForces:
    r_l: float
    f_g: float
    T1: float
    f_c: float


@dataclass(frozen=True)
class ToolLoadForces:
    f_C1: float
    l_C: float
    f_g: float
    f_h: float
    f_C2: float
    exceeds_capacity: bool = False


@dataclass(frozen=True)
class SweepRow:
    r_l: float
    forces: StaticForces | None

    @property
    def feasible(self) -> bool:
        return self.forces is not None


@dataclass(frozen=True)
class PlatePrediction:
    l_star: float
    l_min: float
    l_cap: float
    d_min: float

    @property
    def feasible_range(self) -> tuple[float, float]:
        return (self.l_min, self.l_cap)


def equilibrium_frictionless(G0: float, T2: float, r_l: float) -> StaticForces:
    """Force split for a pushing vehicle with CoM ratio ``r_l``.

    ``G0`` is the weight. Raises :class:`Infeasible` when the vertical
    share ``G0 * r_l`` is larger than the back thrust ``T2``.
    """
    if not 0.0 <= r_l <= 1.0:
        raise ValueError(f"r_l must lie in [0, 1], got {r_l!r}")
    if T2 <= 0:
        raise ValueError(f"T2 must be positive, got {T2!r}")
    f_g = G0 * r_l
    if f_g > T2:
        raise Infeasible(f"f_g={f_g!r} exceeds T2={T2!r} at r_l={r_l!r}")
    # max() guards the f_g == T2 root against negative rounding
    f_c = math.sqrt(max(T2 * T2 - f_g * f_g, 0.0))
    return StaticForces(r_l=r_l, f_g=f_g, T1=G0 * (1.0 - r_l), f_c=f_c)


def sweep_rl(G0: float, T2: float, grid: Sequence[float]) -> list[SweepRow]:
    grid = list(grid)
    if not grid:
        raise ValueError("r_l grid is empty")
    if any(b < a for a, b in zip(grid, grid[1:])):
        raise ValueError("r_l grid must be sorted ascending")
    rows = []
    for r_l in grid:
        try:
            rows.append(SweepRow(r_l, equilibrium_frictionless(G0, T2, r_l)))
        except Infeasible:
            rows.append(SweepRow(r_l, None))
    return rows


def default_rl_grid(step: float = 0.01) -> list[float]:
    n = int(round(1.0 / step))
    return [i / n for i in range(n + 1)]


def tool_load_equilibrium(T2: float, f_C1: float, l_C: float,
                          wheelbase: float) -> ToolLoadForces:
    """Horizontal force budget while the end effector pushes off-axis.

    ``wheelbase`` is the front-to-back rotor distance. A negative
    alignment-frame force is returned with ``exceeds_capacity`` set rather
    than raised, so sweeps can run through that regime.
    """
    if f_C1 < 0 or l_C < 0:
        raise ValueError("f_C1 and l_C must be non-negative")
    f_g = f_C1 * l_C / wheelbase
    if f_g > T2:
        raise Infeasible(f"f_g={f_g!r} exceeds T2={T2!r}")
    f_h = math.sqrt(max(T2 * T2 - f_g * f_g, 0.0))
    f_C2 = f_h - f_C1
    return ToolLoadForces(f_C1=f_C1, l_C=l_C, f_g=f_g, f_h=f_h, f_C2=f_C2,
                          exceeds_capacity=f_C2 < 0)


def capacity_limit_fC1(T2: float, l_C: float, wheelbase: float) -> float:
    """EE force at which the alignment frame carries no load (f_C2 = 0)."""
    return T2 / math.sqrt(1.0 + (l_C / wheelbase) ** 2)


def sweep_tool_load(T2: float, l_C_values: Iterable[float],
                    f_C1_grid: Sequence[float],
                    wheelbase: float) -> list[ToolLoadForces | None]:
    """One row per (l_C, f_C1) pair, l_C-major. Infeasible points are ``None``."""
    f_C1_grid = list(f_C1_grid)
    if not f_C1_grid:
        raise ValueError("f_C1 grid is empty")
    if any(b < a for a, b in zip(f_C1_grid, f_C1_grid[1:])):
        raise ValueError("f_C1 grid must be sorted ascending")
    l_C_values = list(l_C_values)
    if not l_C_values:
        raise ValueError("l_C list is empty")
    rows: list[ToolLoadForces | None] = []
    for l_C in l_C_values:
        for f_C1 in f_C1_grid:
            try:
                rows.append(tool_load_equilibrium(T2, f_C1, l_C, wheelbase))
            except Infeasible:
                rows.append(None)
    return rows


def wall_friction_required(params: PlatformParams, d: float) -> float:
    """Signed vertical wall friction on the vehicle holding ``alpha = 90 deg``.

    Negative means the wall pulls the vehicle down. Derived from vertical
    balance ``T1 + f = G0`` and the pitch moment about the frame tip
    ``T1 * L0 = G0 * (L + L0 - d)``.
    """
    return params.G0 * (d - params.L) / params.L0


def predict_ideal_plate_position(params: PlatformParams,
                                 T2: float | None = None) -> PlatePrediction:
    if T2 is None:
        T2 = params.T2_max
    d_min = params.L - params.mu_s * T2 * params.L0 / params.G0
    l_min = plate_from_com(params, max(d_min, 0.0))
    l_cap = min(plate_from_com(params, params.L), params.l_max)
    if l_min > l_cap:
        raise NoFeasiblePlatePosition(
            f"need l >= {l_min:.4f} m but plate travel is capped at "
            f"{l_cap:.4f} m (mu_s={params.mu_s!r}, T2={T2!r})"
        )
    return PlatePrediction(l_star=l_min, l_min=l_min, l_cap=l_cap, d_min=d_min)
