"""Cascade flight controller: impedance, attitude, allocation, CoM shifting.

The impedance loop renders the vehicle as a spring-damper about a
position setpoint; pushing is requested by placing the setpoint inside
the wall. The attitude loop supplies the pitch torque. Allocation maps the
body-frame wrench onto front thrust ``T1``, back thrust ``T2`` and back
tilt ``alpha``. While the vehicle holds stable wall contact, a PI loop on
the tilt error moves the shifting plate until the back rotors are fully
horizontal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .dynamics import FRAME, ContactConfig, detect_stable_contact
from .params import PlanarState, PlatformParams, com_from_plate

HALF_PI = 0.5 * math.pi


@dataclass(frozen=True)
class ImpedanceConfig:
    Kp: tuple[float, float] = (200.0, 150.0)
    Kd: tuple[float, float] = (60.0, 40.0)
    gravity_ff: bool = True


@dataclass(frozen=True)
class AttitudeConfig:
    Kp_att: float = 48.0
    Kd_att: float = 6.0
    theta_ref: float = 0.0


@dataclass(frozen=True)
class ComShiftConfig:
    k_alpha: float = 0.05
    k_alphaI: float = 0.15
    alpha_max: float = HALF_PI
    integrator_limit: float = 0.4
    enabled_gate: bool = True


@dataclass(frozen=True)
class ControlCommand:
    T1_cmd: float
    T2_cmd: float
    alpha_cmd: float
    l_cmd: float = 0.0
    saturated: bool = False


@dataclass(frozen=True)
class Setpoint:
    x: float
    z: float
    theta: float = 0.0


def impedance_wrench(state: PlanarState, setpoint: Setpoint,
                     cfg: ImpedanceConfig, att: AttitudeConfig,
                     params: PlatformParams) -> tuple[float, float, float]:
    """World-frame force ``(f_x, f_z)`` and pitch torque ``tau_y``."""
    f_x = cfg.Kp[0] * (setpoint.x - state.x) - cfg.Kd[0] * state.vx
    f_z = cfg.Kp[1] * (setpoint.z - state.z) - cfg.Kd[1] * state.vz
    if cfg.gravity_ff:
        f_z += params.m * params.g
    tau = att.Kp_att * (setpoint.theta - state.theta) - att.Kd_att * state.omega
    return f_x, f_z, tau


def world_to_body(f_x: float, f_z: float, theta: float) -> tuple[float, float]:
    c, s = math.cos(theta), math.sin(theta)
    return c * f_x + s * f_z, -s * f_x + c * f_z


def forward_wrench(T1: float, T2: float, alpha: float, d: float,
                   params: PlatformParams) -> tuple[float, float, float]:
    """Body-frame wrench about the CoM produced by the rotor inputs."""
    L = params.L
    u = T2 * math.cos(alpha)
    return T2 * math.sin(alpha), T1 + u, T1 * (L - d) - u * (L + d)


def allocate(wrench: tuple[float, float, float], d: float,
             params: PlatformParams, l_cmd: float = 0.0) -> ControlCommand:
    """Invert :func:`forward_wrench` and saturate to the actuator limits.

    ``d`` is the current CoM offset along body x. Demands for negative
    front thrust or a negative vertical back-thrust share are clamped to
    zero and reported through ``saturated``.
    """
    f_x, f_z, tau = wrench
    L = params.L
    T1 = (tau + f_z * (L + d)) / (2.0 * L)
    u = (f_z * (L - d) - tau) / (2.0 * L)
    saturated = False
    if not u >= 0.0:
        u, saturated = 0.0, True
    if not math.isfinite(f_x):
        f_x, saturated = math.copysign(params.T2_max, f_x), True
    T2_max = params.T2_max
    if math.hypot(f_x, u) > T2_max:
        # keep the vertical share, give the interaction axis what is left
        saturated = True
        u = min(u, T2_max)
        f_x = math.copysign(math.sqrt(T2_max * T2_max - u * u), f_x)
    T2 = min(math.hypot(f_x, u), T2_max)
    alpha = math.atan2(f_x, u) if T2 > 0.0 else 0.0
    alpha = min(max(alpha, -HALF_PI), HALF_PI)
    if not T1 >= 0.0:
        T1, saturated = 0.0, True
    elif T1 > params.T1_max:
        T1, saturated = params.T1_max, True
    l_cmd = min(max(l_cmd, 0.0), params.l_max)
    return ControlCommand(T1, T2, alpha, l_cmd, saturated)


def project_to_tilt(cmd: ControlCommand, alpha_actual: float,
                    params: PlatformParams,
                    push_weight: float = 0.01) -> ControlCommand:
    """Rescale ``T2`` for a servo that has not yet reached ``alpha_cmd``.

    ``T2`` is the weighted least-squares fit of the demanded back-thrust
    vector along the current rotor axis. The vertical share carries
    weight and pitch control, so it is weighted far above the horizontal
    push (``push_weight``): away from horizontal tilt the vertical share
    is matched exactly, and only near 90 deg does the fit hand over to
    the push.
    """
    demand_x = cmd.T2_cmd * math.sin(cmd.alpha_cmd)
    demand_z = cmd.T2_cmd * math.cos(cmd.alpha_cmd)
    s, c = math.sin(alpha_actual), math.cos(alpha_actual)
    T2 = ((push_weight * demand_x * s + demand_z * c)
          / (push_weight * s * s + c * c))
    T2 = min(max(T2, 0.0), params.T2_max)
    return replace(cmd, T2_cmd=T2)


@dataclass
class ComShiftLoop:
    """Position-form PI on the tilt error, driving the plate command.

    ``integrator`` holds the integral term already scaled by
    ``k_alphaI``, so it is in metres and comparable with
    ``integrator_limit``. The command is rate-limited like the plate
    actuator; whenever a travel or rate limit holds it, the integral is
    back-calculated to match the held command, so it cannot wind up
    while the plate lags.
    """

    cfg: ComShiftConfig
    l_max: float
    l_rate_limit: float = 0.02
    integrator: float = 0.0
    l_cmd: float = 0.0

    def update(self, alpha_meas: float, dt: float, gate: bool) -> float:
        if dt <= 0:
            raise ValueError("dt must be positive")
        cfg = self.cfg
        if cfg.enabled_gate and not gate:
            self.l_cmd = max(0.0, self.l_cmd - self.l_rate_limit * dt)
            self.integrator = min(self.integrator, self.l_cmd)
            return self.l_cmd
        e = cfg.alpha_max - alpha_meas
        lim = cfg.integrator_limit
        candidate = min(max(self.integrator + cfg.k_alphaI * e * dt, -lim), lim)
        raw = cfg.k_alpha * e + candidate
        upper = min(self.l_max, self.l_cmd + self.l_rate_limit * dt)
        lower = max(0.0, self.l_cmd - self.l_rate_limit * dt)
        self.l_cmd = min(max(raw, lower), upper)
        if self.l_cmd != raw:
            # back-calculate so the integral tracks the limited command
            candidate = min(max(self.l_cmd - cfg.k_alpha * e, -lim), lim)
        self.integrator = candidate
        return self.l_cmd


@dataclass(frozen=True)
class Waypoint:
    time: float
    x: float
    z: float
    theta: float = 0.0
    phase: str = "approach"


PHASES = ("approach", "push", "retract", "depart")


@dataclass(frozen=True)
class WaypointScript:
    waypoints: tuple[Waypoint, ...]

    def __post_init__(self):
        if not self.waypoints:
            raise ValueError("waypoint script is empty")
        times = [w.time for w in self.waypoints]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("waypoint times must be strictly increasing")
        for w in self.waypoints:
            if w.phase not in PHASES:
                raise ValueError(f"unknown waypoint phase {w.phase!r}")

    def active(self, t: float) -> Waypoint:
        current = self.waypoints[0]
        for w in self.waypoints:
            if w.time <= t + 1e-12:
                current = w
        return current


def sequence(script: WaypointScript, t: float, contacts,
             contact_cfg: ContactConfig) -> tuple[Setpoint, str, bool]:
    """Active setpoint, phase label and CoM-shift gate at time ``t``."""
    wp = script.active(t)
    setpoint = Setpoint(wp.x, wp.z, wp.theta)
    if wp.phase == "push":
        frame = contacts.get(FRAME)
        stable = frame is not None and detect_stable_contact(frame, contact_cfg, t)
        if stable:
            return setpoint, "self-displace", True
        return setpoint, "push", False
    return setpoint, wp.phase, False


@dataclass
class CascadeController:
    """Full vehicle controller ticked at the control rate.

    ``plate_override`` pins the plate command (used when the plate is
    pre-positioned instead of self-calibrated).
    """

    params: PlatformParams
    contact_cfg: ContactConfig
    script: WaypointScript
    impedance: ImpedanceConfig = field(default_factory=ImpedanceConfig)
    attitude: AttitudeConfig = field(default_factory=AttitudeConfig)
    com_shift: ComShiftConfig = field(default_factory=ComShiftConfig)
    control_dt: float = 0.01
    l_rate_limit: float = 0.02
    plate_override: float | None = None

    extra_columns = ("phase", "gate", "integ")

    def __post_init__(self):
        self.loop = ComShiftLoop(self.com_shift, self.params.l_max,
                                 self.l_rate_limit)
        self.phase = "approach"
        self.gate = False
        self.last_alpha_cmd = 0.0
        self.alpha_feedback = 0.0
        self.ee_point = None

    def plate_command(self, t, gate):
        if self.plate_override is not None:
            return self.plate_override
        return self.loop.update(self.alpha_feedback, self.control_dt, gate)

    def __call__(self, t: float, state: PlanarState, contacts) -> ControlCommand:
        self.alpha_feedback = state.alpha
        setpoint, self.phase, self.gate = sequence(self.script, t, contacts,
                                                   self.contact_cfg)
        l_cmd = self.plate_command(t, self.gate)
        f_x, f_z, tau = impedance_wrench(state, setpoint, self.impedance,
                                         self.attitude, self.params)
        bx, bz = world_to_body(f_x, f_z, state.theta)
        d = com_from_plate(self.params, state.l)
        cmd = allocate((bx, bz, tau), min(d, self.params.L), self.params, l_cmd)
        self.last_alpha_cmd = cmd.alpha_cmd
        return project_to_tilt(cmd, state.alpha, self.params)

    def log_fields(self, state, contacts):
        return {"phase": self.phase, "gate": self.gate,
                "integ": self.loop.integrator}
