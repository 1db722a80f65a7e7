"""Physical parameters, planar state, and the plate/CoM mass relations.

Frames: world x points toward the wall, world z points up. The body frame
origin sits at the vehicle's geometric centre; body x is the interaction
axis and pitch ``theta`` is positive nose-up.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace


class ParameterError(ValueError):
    """Raised when a parameter set violates one or more invariants.

    ``violations`` holds every failed check, not only the first one.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class BoundsError(ValueError):
    pass


@dataclass(frozen=True)
class PlatformParams:
    m: float = 3.12
    m_S: float = 0.9
    L: float = 0.135
    W: float = 0.135  # lateral rotor offset, unused in the planar model
    L0: float = 0.165
    l_S: float = 0.03
    T2_max: float = 20.0
    T1_max: float = 60.0
    g: float = 9.81
    mu_s: float = 0.5
    mu_k: float = 0.45
    I_body: float = 0.06
    I_plate: float = 0.004

    @property
    def G0(self) -> float:
        return self.m * self.g

    @property
    def l_max(self) -> float:
        """Upper bound of plate travel along body x."""
        return self.L + self.L0 - 0.5 * self.l_S

    @property
    def wheelbase(self) -> float:
        return 2.0 * self.L

    def with_(self, **changes) -> "PlatformParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class PlanarState:
    x: float = 0.0
    z: float = 0.0
    theta: float = 0.0
    vx: float = 0.0
    vz: float = 0.0
    omega: float = 0.0
    l: float = 0.0
    alpha: float = 0.0

    def as_tuple(self):
        return tuple(getattr(self, f.name) for f in fields(self))

    def is_finite(self) -> bool:
        return all(math.isfinite(v) for v in self.as_tuple())


@dataclass(frozen=True)
class DerivedMassProperties:
    d: float
    G0: float
    I_total: float


def validate_params(params: PlatformParams) -> PlatformParams:
    """Return ``params`` unchanged if valid, else raise with every violation."""
    p = params
    problems = []
    positive = ("m", "m_S", "L", "L0", "l_S", "T1_max", "T2_max", "g",
                "I_body", "I_plate")
    for name in positive:
        value = getattr(p, name)
        if not (math.isfinite(value) and value > 0):
            problems.append(f"{name} > 0 violated (got {value!r})")
    if not p.m_S < p.m:
        problems.append(f"m_S < m violated (m_S={p.m_S!r}, m={p.m!r})")
    if not p.l_max > 0:
        problems.append(f"L + L0 - 0.5*l_S > 0 violated (got {p.l_max!r})")
    if p.mu_s < 0 or p.mu_k < 0:
        problems.append(f"friction coefficients >= 0 violated "
                        f"(mu_s={p.mu_s!r}, mu_k={p.mu_k!r})")
    if not p.mu_k <= p.mu_s:
        problems.append(f"mu_k <= mu_s violated (mu_k={p.mu_k!r}, "
                        f"mu_s={p.mu_s!r})")
    if problems:
        raise ParameterError(problems)
    return params


def com_from_plate(params: PlatformParams, l: float) -> float:
    """CoM displacement produced by the plate at position ``l``."""
    return params.m_S / params.m * l


def plate_from_com(params: PlatformParams, d: float) -> float:
    """Plate position that yields CoM displacement ``d``."""
    return params.m / params.m_S * d


def check_plate_bounds(params: PlatformParams, l: float, tol: float = 1e-12):
    if not (-tol <= l <= params.l_max + tol):
        raise BoundsError(
            f"plate position l={l!r} outside admissible interval "
            f"[0, {params.l_max!r}]"
        )


def derive_mass_properties(params: PlatformParams, l: float) -> DerivedMassProperties:
    check_plate_bounds(params, l)
    d = com_from_plate(params, l)
    m_body = params.m - params.m_S
    # parallel-axis terms about the combined CoM
    I_total = (params.I_body + params.I_plate
               + m_body * d * d + params.m_S * (l - d) ** 2)
    return DerivedMassProperties(d=d, G0=params.G0, I_total=I_total)
