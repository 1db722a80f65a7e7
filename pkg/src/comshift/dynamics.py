"""Fixed-step planar rigid-body simulator with penalty wall contact.

The vehicle is a single rigid body whose CoM moves with the shifting
plate. Plate motion is treated as a prescribed, quasi-static displacement:
it changes the CoM location and inertia but applies no reaction force.

Contacts are penalty springs against a vertical wall at ``wall_x``. The
tangential direction uses a stick spring anchored where the contact
stuck, clamped by static friction; once the clamp is exceeded the contact
slides with kinetic friction until the tangential velocity stops opposing
the friction force.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Mapping

from .params import PlanarState, PlatformParams, derive_mass_properties

FRAME = "frame"
EE = "ee"

TRACE_COLUMNS = (
    "t", "x", "z", "theta", "vx", "vz", "omega", "l", "d", "alpha",
    "T1", "T2", "f_n_frame", "f_t_frame", "f_n_ee", "f_t_ee", "tau1", "tau2",
)


class NumericalDivergence(RuntimeError):
    def __init__(self, step_index: int, detail: str = ""):
        self.step_index = step_index
        msg = f"non-finite state at step {step_index}"
        super().__init__(f"{msg}: {detail}" if detail else msg)


@dataclass(frozen=True)
class ContactConfig:
    wall_x: float = 1.0
    k_n: float = 1e4
    c_n: float = 50.0
    k_t: float = 5e3
    c_t: float = 50.0
    mu_s: float = 0.5
    mu_k: float = 0.45
    stable_force_threshold: float = 2.0
    stable_duration: float = 0.5

    def validate(self):
        problems = []
        if not (self.k_n > 0 and self.k_t > 0):
            problems.append("k_n, k_t > 0 violated")
        if self.c_n < 0 or self.c_t < 0:
            problems.append("c_n, c_t >= 0 violated")
        if not (self.stable_force_threshold > 0 and self.stable_duration > 0):
            problems.append("stability thresholds > 0 violated")
        if not 0 <= self.mu_k <= self.mu_s:
            problems.append("0 <= mu_k <= mu_s violated")
        if problems:
            raise ValueError("; ".join(problems))
        return self


@dataclass(frozen=True)
class ContactState:
    in_contact: bool = False
    penetration: float = 0.0
    normal_force: float = 0.0
    tangential_force: float = 0.0
    stick: bool = False
    tangential_anchor: float = 0.0
    stable_since: float | None = None


NO_CONTACT = ContactState()


@dataclass(frozen=True)
class ActuatorLimits:
    alpha_rate_limit: float = 1.0
    l_rate_limit: float = 0.02


def _approach(current: float, target: float, max_delta: float) -> float:
    delta = target - current
    if delta > max_delta:
        return current + max_delta
    if delta < -max_delta:
        return current - max_delta
    return target


def update_stable_timer(contact: ContactState, cfg: ContactConfig,
                        t: float) -> ContactState:
    if contact.normal_force >= cfg.stable_force_threshold:
        if contact.stable_since is None:
            return replace(contact, stable_since=t)
        return contact
    if contact.stable_since is not None:
        return replace(contact, stable_since=None)
    return contact


def detect_stable_contact(contact: ContactState, cfg: ContactConfig,
                          t: float) -> bool:
    """True once the normal force has stayed above threshold long enough."""
    if contact.stable_since is None:
        return False
    return t - contact.stable_since >= cfg.stable_duration - 1e-12


def _contact_update(prev: ContactState, px: float, pz: float, vx: float,
                    vz: float, cfg: ContactConfig) -> ContactState:
    penetration = px - cfg.wall_x
    if penetration <= 0.0:
        return ContactState(stable_since=prev.stable_since)
    f_n = max(0.0, cfg.k_n * penetration + cfg.c_n * vx)
    if not prev.in_contact:
        return ContactState(True, penetration, f_n, 0.0, True, pz,
                            prev.stable_since)

    stick = prev.stick
    anchor = prev.tangential_anchor
    if not stick:
        direction = math.copysign(1.0, prev.tangential_force)
        if prev.tangential_force == 0.0 or vz * direction >= 0.0:
            # tangential velocity no longer opposes friction: re-stick here
            stick, anchor = True, pz
        else:
            return ContactState(True, penetration, f_n,
                                direction * cfg.mu_k * f_n, False, anchor,
                                prev.stable_since)

    f_t = cfg.k_t * (anchor - pz) - cfg.c_t * vz
    if abs(f_t) <= cfg.mu_s * f_n:
        return ContactState(True, penetration, f_n, f_t, True, anchor,
                            prev.stable_since)
    direction = math.copysign(1.0, f_t)
    return ContactState(True, penetration, f_n, direction * cfg.mu_k * f_n,
                        False, anchor, prev.stable_since)


@dataclass(frozen=True)
class StepLog:
    T1: float
    T2: float
    d: float
    Fx: float
    Fz: float
    torque: float
    contacts: Mapping[str, ContactState]


def step(state: PlanarState, contacts: Mapping[str, ContactState], command,
         params: PlatformParams, contact_cfg: ContactConfig, dt: float,
         t: float = 0.0, limits: ActuatorLimits = ActuatorLimits(),
         ee_point: tuple[float, float] | None = None, step_index: int = 0):
    """Advance the vehicle by one semi-implicit Euler step of length ``dt``.

    ``command`` needs ``T1_cmd``, ``T2_cmd``, ``alpha_cmd`` and ``l_cmd``.
    ``ee_point`` is the end-effector tip in body coordinates; when given,
    the EE tip also contacts the wall.

    Returns ``(next_state, next_contacts, log)``. Contact forces in the log
    (and in ``next_contacts``) are the ones applied during this step.
    """
    if not 0.0 < dt <= 2e-3 + 1e-15:
        raise ValueError(f"dt must lie in (0, 2 ms], got {dt!r}")
    p = params
    half_pi = 0.5 * math.pi
    alpha_cmd = min(max(command.alpha_cmd, -half_pi), half_pi)
    l_cmd = min(max(command.l_cmd, 0.0), p.l_max)
    alpha = _approach(state.alpha, alpha_cmd, limits.alpha_rate_limit * dt)
    l = _approach(state.l, l_cmd, limits.l_rate_limit * dt)
    T1 = command.T1_cmd
    T2 = command.T2_cmd

    mass = derive_mass_properties(p, l)
    d = mass.d
    c, s = math.cos(state.theta), math.sin(state.theta)
    # body x axis e = (c, s), body z axis n = (-s, c)

    fx = 0.0
    fz = -p.m * p.g
    torque = 0.0

    def apply(bx, bz, Fx, Fz):
        # bx, bz: application point in body coordinates
        nonlocal fx, fz, torque
        rx = (bx - d) * c - bz * s
        rz = (bx - d) * s + bz * c
        fx += Fx
        fz += Fz
        torque += rx * Fz - rz * Fx

    apply(p.L, 0.0, -T1 * s, T1 * c)
    back_x = T2 * math.sin(alpha)
    back_z = T2 * math.cos(alpha)
    apply(-p.L, 0.0, back_x * c - back_z * s, back_x * s + back_z * c)

    new_contacts = dict(contacts)
    points = {FRAME: (p.L + p.L0, 0.0)}
    if ee_point is not None:
        points[EE] = ee_point
    for name in (FRAME, EE):
        if name not in points:
            new_contacts[name] = NO_CONTACT
            continue
        bx, bz = points[name]
        px = state.x + bx * c - bz * s
        pz = state.z + bx * s + bz * c
        vx = state.vx - state.omega * (bx * s + bz * c)
        vz = state.vz + state.omega * (bx * c - bz * s)
        cs = _contact_update(contacts.get(name, NO_CONTACT), px, pz, vx, vz,
                             contact_cfg)
        cs = update_stable_timer(cs, contact_cfg, t)
        new_contacts[name] = cs
        if cs.in_contact:
            apply(bx, bz, -cs.normal_force, cs.tangential_force)

    ax_com = fx / p.m
    az_com = fz / p.m
    omega_dot = torque / mass.I_total
    # origin acceleration from CoM acceleration, rigid offset d along e
    w2 = state.omega * state.omega
    ax = ax_com - d * (-omega_dot * s - w2 * c)
    az = az_com - d * (omega_dot * c - w2 * s)

    vx = state.vx + ax * dt
    vz = state.vz + az * dt
    omega = state.omega + omega_dot * dt
    nxt = PlanarState(
        x=state.x + vx * dt,
        z=state.z + vz * dt,
        theta=state.theta + omega * dt,
        vx=vx, vz=vz, omega=omega, l=l, alpha=alpha,
    )
    if not nxt.is_finite():
        raise NumericalDivergence(step_index, repr(nxt))
    log = StepLog(T1=T1, T2=T2, d=d, Fx=fx, Fz=fz, torque=torque,
                  contacts=new_contacts)
    return nxt, new_contacts, log


@dataclass
class SimTrace:
    columns: tuple[str, ...] = TRACE_COLUMNS
    rows: list[dict] = field(default_factory=list)
    header: dict[str, str] = field(default_factory=dict)

    def __len__(self):
        return len(self.rows)

    def column(self, name):
        return [row[name] for row in self.rows]

    def to_csv(self) -> str:
        buf = io.StringIO()
        for key, value in self.header.items():
            buf.write(f"# {key}: {value}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([_fmt(row.get(col, "")) for col in self.columns])
        return buf.getvalue()

    def write_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            fh.write(self.to_csv())


def _fmt(value):
    if isinstance(value, bool):
        return int(value)
    if isinstance(value, float):
        return repr(value)
    return value


def _row(t, state, d, T1, T2, contacts, extra):
    frame = contacts.get(FRAME, NO_CONTACT)
    ee = contacts.get(EE, NO_CONTACT)
    row = {
        "t": t, "x": state.x, "z": state.z, "theta": state.theta,
        "vx": state.vx, "vz": state.vz, "omega": state.omega,
        "l": state.l, "d": d, "alpha": state.alpha, "T1": T1, "T2": T2,
        "f_n_frame": frame.normal_force, "f_t_frame": frame.tangential_force,
        "f_n_ee": ee.normal_force, "f_t_ee": ee.tangential_force,
        "tau1": 0.0, "tau2": 0.0,
    }
    row.update(extra)
    return row


def run(initial: PlanarState, controller: Callable, params: PlatformParams,
        contact_cfg: ContactConfig, duration: float, physics_dt: float = 1e-3,
        control_dt: float = 0.01, limits: ActuatorLimits = ActuatorLimits(),
        decimation: int = 1, on_step: Callable | None = None) -> SimTrace:
    """Closed-loop run with zero-order hold between control ticks.

    ``controller(t, state, contacts)`` returns a command; it may expose
    ``ee_point`` (body-frame EE tip or ``None``), ``extra_columns`` and
    ``log_fields(state, contacts)`` for additional trace columns.
    ``on_step(state, contacts, log)`` is called after every physics step.
    """
    ratio = control_dt / physics_dt
    substeps = int(round(ratio))
    if substeps < 1 or abs(ratio - substeps) > 1e-9:
        raise ValueError("control_dt must be an integer multiple of physics_dt")
    n_ticks = int(round(duration / control_dt + 1e-9))
    extra_cols = tuple(getattr(controller, "extra_columns", ()))
    trace = SimTrace(columns=TRACE_COLUMNS + extra_cols)
    log_fields = getattr(controller, "log_fields", None)

    state = initial
    contacts = {FRAME: NO_CONTACT, EE: NO_CONTACT}
    d0 = derive_mass_properties(params, state.l).d
    extra = log_fields(state, contacts) if log_fields else {}
    trace.rows.append(_row(0.0, state, d0, 0.0, 0.0, contacts, extra))

    k = 0
    for tick in range(n_ticks):
        t = tick * control_dt
        command = controller(t, state, contacts)
        ee_point = getattr(controller, "ee_point", None)
        for _ in range(substeps):
            state, contacts, log = step(
                state, contacts, command, params, contact_cfg, physics_dt,
                t=k * physics_dt, limits=limits, ee_point=ee_point,
                step_index=k)
            k += 1
            if on_step is not None:
                on_step(state, contacts, log)
        if (tick + 1) % decimation == 0:
            extra = log_fields(state, contacts) if log_fields else {}
            trace.rows.append(_row((tick + 1) * control_dt, state, log.d,
                                   log.T1, log.T2, contacts, extra))
    return trace
