"""Two-link planar tool arm mounted on the shifting-mass plate.

The arm is treated as statically coupled: link dynamics are neglected,
and the end-effector contact force acts on the vehicle through the rigid
arm. Joint angles are measured in the arm-base frame, which is aligned
with the vehicle body frame (x toward the wall, z up when level).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .control import CascadeController, Waypoint, WaypointScript, world_to_body
from .dynamics import EE, FRAME, ContactConfig, SimTrace, run
from .params import PlanarState, PlatformParams, validate_params


class Unreachable(ValueError):
    """The requested end-effector point lies outside the arm workspace."""


@dataclass(frozen=True)
class ArmParams:
    L1: float
    L2: float
    m_link1: float = 0.05
    m_link2: float = 0.05
    m_tool: float = 0.03
    base_offset: float = -0.06
    base_height: float = 0.01

    def __post_init__(self):
        problems = []
        if not (self.L1 > 0 and self.L2 > 0):
            problems.append("L1, L2 > 0 violated")
        if min(self.m_link1, self.m_link2, self.m_tool) < 0:
            problems.append("arm masses >= 0 violated")
        if problems:
            raise ValueError("; ".join(problems))

    def scaled(self, c: float) -> "ArmParams":
        """Same arm and mount with both links scaled by ``c``."""
        return replace(self, L1=self.L1 * c, L2=self.L2 * c)


@dataclass(frozen=True)
class ArmState:
    q1: float
    q2: float
    tau1: float
    tau2: float

    @classmethod
    def from_signed(cls, q1, q2, tau) -> "ArmState":
        return cls(q1, q2, abs(tau[0]), abs(tau[1]))


def forward_kinematics(arm: ArmParams, q1: float, q2: float) -> tuple[float, float]:
    q12 = q1 + q2
    return (arm.L1 * math.cos(q1) + arm.L2 * math.cos(q12),
            arm.L1 * math.sin(q1) + arm.L2 * math.sin(q12))


def jacobian(arm: ArmParams, q1: float, q2: float) -> np.ndarray:
    s1, c1 = math.sin(q1), math.cos(q1)
    s12, c12 = math.sin(q1 + q2), math.cos(q1 + q2)
    return np.array([
        [-arm.L1 * s1 - arm.L2 * s12, -arm.L2 * s12],
        [arm.L1 * c1 + arm.L2 * c12, arm.L2 * c12],
    ])


def inverse_kinematics(arm: ArmParams, target: tuple[float, float],
                       elbow: str = "down") -> tuple[float, float]:
    """Closed-form two-link solution.

    ``elbow="down"`` returns the branch with ``q2 <= 0`` and ``"up"`` the
    branch with ``q2 >= 0``; both coincide at the workspace boundary.
    """
    if elbow not in ("up", "down"):
        raise ValueError(f"elbow must be 'up' or 'down', got {elbow!r}")
    x, z = target
    r = math.hypot(x, z)
    lo, hi = abs(arm.L1 - arm.L2), arm.L1 + arm.L2
    eps = 1e-12 * hi
    if r < lo - eps or r > hi + eps:
        raise Unreachable(
            f"target ({x!r}, {z!r}) at distance {r:.6g} m is outside "
            f"[{lo:.6g}, {hi:.6g}] m")
    c2 = (r * r - arm.L1 ** 2 - arm.L2 ** 2) / (2.0 * arm.L1 * arm.L2)
    q2 = math.acos(min(max(c2, -1.0), 1.0))
    if elbow == "down":
        q2 = -q2
    q1 = math.atan2(z, x) - math.atan2(arm.L2 * math.sin(q2),
                                       arm.L1 + arm.L2 * math.cos(q2))
    return q1, q2


def _point_jacobians(arm: ArmParams, q1: float, q2: float):
    """Jacobians of the two link CoMs (mid-link) and of the tool point."""
    s1, c1 = math.sin(q1), math.cos(q1)
    s12, c12 = math.sin(q1 + q2), math.cos(q1 + q2)
    h1, h2 = 0.5 * arm.L1, 0.5 * arm.L2
    J_link1 = np.array([[-h1 * s1, 0.0], [h1 * c1, 0.0]])
    J_link2 = np.array([[-arm.L1 * s1 - h2 * s12, -h2 * s12],
                        [arm.L1 * c1 + h2 * c12, h2 * c12]])
    return ((arm.m_link1, J_link1), (arm.m_link2, J_link2),
            (arm.m_tool, jacobian(arm, q1, q2)))


def gravity_torques(arm: ArmParams, q1: float, q2: float,
                    gravity=(0.0, -9.81)) -> np.ndarray:
    """Joint torques from link and tool weights.

    ``gravity`` is the gravity vector expressed in the arm-base frame.
    """
    g = np.asarray(gravity, dtype=float)
    tau = np.zeros(2)
    for mass, J in _point_jacobians(arm, q1, q2):
        tau += J.T @ (mass * g)
    return tau


def static_joint_torques(arm: ArmParams, q1: float, q2: float, F_ee,
                         gravity_on: bool = True,
                         gravity=(0.0, -9.81)) -> tuple[float, float]:
    """Signed joint torques while the EE applies ``F_ee`` to the wall.

    The environment pushes back with ``-F_ee``; its joint-space image
    ``J^T (-F_ee)`` is added to the weight torques.
    """
    tau = jacobian(arm, q1, q2).T @ (-np.asarray(F_ee, dtype=float))
    if gravity_on:
        tau = tau + gravity_torques(arm, q1, q2, gravity)
    return float(tau[0]), float(tau[1])


# ---------------------------------------------------------------------------
# Task 2: the arm presses on the wall while the frame holds contact


@dataclass(frozen=True)
class Task2Config:
    """Timeline, operation point and EE force loop of the arm task.

    The EE tip is commanded to the body point ``(L + L0 + delta, l_C)``,
    i.e. ``l_C`` above the frame tip and ``delta`` beyond it. ``delta``
    starts retracted so the frame touches first, and once frame contact
    is stable it is integrated at ``force_gain`` (m per N per s) on the
    normal-force error until the EE presses ``force_target``.
    """

    wall_height: float = 1.0
    standoff: float = 0.05
    push_depth: float = 0.11
    t_push: float = 3.0
    ramp_steps: int = 8
    ramp_step_dt: float = 0.25
    duration: float = 12.0
    l_C: float = 0.05
    elbow: str = "down"
    force_target: float = 5.0
    force_gain: float = 0.002
    delta_init: float = -0.005
    delta_range: tuple[float, float] = (-0.005, 0.005)

    def validate(self):
        problems = []
        if self.ramp_steps < 1 or self.t_push <= 0:
            problems.append("ramp_steps >= 1 and t_push > 0 violated")
        if self.t_push + self.ramp_steps * self.ramp_step_dt >= self.duration:
            problems.append("push ramp must end before duration")
        lo, hi = self.delta_range
        if not lo <= self.delta_init <= hi:
            problems.append("delta_init must lie inside delta_range")
        if self.force_target < 0 or self.force_gain < 0:
            problems.append("force_target, force_gain >= 0 violated")
        if self.elbow not in ("up", "down"):
            problems.append("elbow must be 'up' or 'down'")
        if problems:
            raise ValueError("; ".join(problems))
        return self


SCENARIO_ARMS = {"a": 0.05, "b": 0.2}


def scenario_arm(scenario: str, base: ArmParams | None = None,
                 length: float | None = None) -> ArmParams:
    """Arm variant of a scenario: short links for (a), long links for (b)."""
    if scenario not in SCENARIO_ARMS:
        raise ValueError(f"scenario must be 'a' or 'b', got {scenario!r}")
    if length is None:
        length = SCENARIO_ARMS[scenario]
    if base is None:
        return ArmParams(length, length)
    return replace(base, L1=length, L2=length)


def ee_target(params: PlatformParams, arm: ArmParams, l: float,
              l_C: float, delta: float) -> tuple[float, float]:
    """Operation point relative to the arm base, which rides on the plate."""
    return (params.L + params.L0 + delta - (l + arm.base_offset),
            l_C - arm.base_height)


def check_operation_point(params, arm, l, cfg: Task2Config):
    """Raise :class:`Unreachable` unless the whole ``delta`` range is reachable."""
    for delta in (cfg.delta_range[0], cfg.delta_init, cfg.delta_range[1]):
        inverse_kinematics(arm, ee_target(params, arm, l, cfg.l_C, delta),
                           cfg.elbow)


def task2_script(params, contact_cfg, cfg: Task2Config) -> WaypointScript:
    touch = contact_cfg.wall_x - (params.L + params.L0)
    x0 = touch - cfg.standoff
    x_push = touch + cfg.push_depth
    n, dt = cfg.ramp_steps, cfg.ramp_step_dt
    wps = [Waypoint(0.0, x0, cfg.wall_height, 0.0, "approach")]
    for i in range(1, n + 1):
        wps.append(Waypoint(cfg.t_push + dt * (i - 1),
                            x0 + (x_push - x0) * i / n, cfg.wall_height,
                            0.0, "push"))
    return WaypointScript(tuple(wps))


@dataclass
class ArmPushController(CascadeController):
    """Cascade controller plus the statically coupled arm.

    Each tick the arm is solved for the operation point and the joint
    torques are evaluated from the measured EE contact force and the
    tool and link weights, both expressed in the body frame.
    """

    arm: ArmParams = field(default_factory=lambda: ArmParams(0.05, 0.05))
    task: Task2Config = field(default_factory=Task2Config)

    extra_columns = ("phase", "gate", "integ", "q1", "q2", "delta")

    def __post_init__(self):
        super().__post_init__()
        self.delta = self.task.delta_init
        self.q = (0.0, 0.0)
        self.tau = (0.0, 0.0)
        self.ee_point = (self.params.L + self.params.L0 + self.delta,
                         self.task.l_C)

    def __call__(self, t, state, contacts):
        cmd = super().__call__(t, state, contacts)
        cfg = self.task
        ee = contacts.get(EE)
        f_n = ee.normal_force if ee is not None else 0.0
        f_t = ee.tangential_force if ee is not None else 0.0
        if self.gate:
            step = cfg.force_gain * (cfg.force_target - f_n) * self.control_dt
            lo, hi = cfg.delta_range
            self.delta = min(max(self.delta + step, lo), hi)
        self.ee_point = (self.params.L + self.params.L0 + self.delta, cfg.l_C)
        self.q = inverse_kinematics(
            self.arm, ee_target(self.params, self.arm, state.l, cfg.l_C,
                                self.delta), cfg.elbow)
        # force applied by the EE on the wall, world then body frame
        F_body = world_to_body(f_n, -f_t, state.theta)
        g_body = world_to_body(0.0, -self.params.g, state.theta)
        self.tau = static_joint_torques(self.arm, *self.q, F_body,
                                        gravity=g_body)
        return cmd

    def log_fields(self, state, contacts):
        out = super().log_fields(state, contacts)
        out.update({"q1": self.q[0], "q2": self.q[1], "delta": self.delta,
                    "tau1": abs(self.tau[0]), "tau2": abs(self.tau[1])})
        return out


def run_task2_scenario(scenario: str,
                       params: PlatformParams = PlatformParams(),
                       arm: ArmParams | None = None,
                       contact_cfg: ContactConfig | None = None,
                       cfg: Task2Config = Task2Config(),
                       gains=None, plate_position: float | None = None,
                       decimation: int = 1) -> SimTrace:
    """Closed-loop arm push; scenario (a) short links at ``l*``, (b) long links at 0.

    ``arm`` is used as given; when omitted the scenario's default arm is
    built by :func:`scenario_arm`. ``plate_position`` defaults to the static prediction of ``l*`` for
    scenario (a) and to the home position for (b).
    """
    from .scenarios import ControllerGains
    from .statics import predict_ideal_plate_position

    validate_params(params)
    cfg.validate()
    if scenario not in SCENARIO_ARMS:
        raise ValueError(f"scenario must be 'a' or 'b', got {scenario!r}")
    if arm is None:
        arm = scenario_arm(scenario)
    if contact_cfg is None:
        contact_cfg = ContactConfig(mu_s=params.mu_s, mu_k=params.mu_k)
    contact_cfg.validate()
    if gains is None:
        gains = ControllerGains()
    if plate_position is None:
        plate_position = (predict_ideal_plate_position(params).l_star
                          if scenario == "a" else 0.0)
    check_operation_point(params, arm, plate_position, cfg)
    script = task2_script(params, contact_cfg, cfg)
    ctl = ArmPushController(params, contact_cfg, script,
                            impedance=gains.impedance, attitude=gains.attitude,
                            com_shift=gains.com_shift,
                            control_dt=gains.control_dt,
                            l_rate_limit=gains.l_rate_limit,
                            plate_override=plate_position, arm=arm, task=cfg)
    initial = PlanarState(x=script.waypoints[0].x, z=cfg.wall_height,
                          l=plate_position)
    trace = run(initial, ctl, params, contact_cfg, cfg.duration,
                control_dt=gains.control_dt, decimation=decimation)
    trace.header.update({
        "scenario": f"task2{scenario}",
        "L1": arm.L1, "L2": arm.L2, "m_link1": arm.m_link1,
        "m_link2": arm.m_link2, "m_tool": arm.m_tool,
        "base_offset": arm.base_offset, "base_height": arm.base_height,
        "plate_position": plate_position, "l_C": cfg.l_C,
        "elbow": cfg.elbow, "force_target": cfg.force_target,
        "force_gain": cfg.force_gain,
    })
    return trace


def peak_torque(trace: SimTrace) -> tuple[float, float]:
    return (max(trace.column("tau1")), max(trace.column("tau2")))
