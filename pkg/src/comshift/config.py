"""Run configuration: one INI file per run.

Sections
--------
``[run]``        scenario (task1 | task2a | task2b | custom), decimation, out,
                 duration (custom scenario only, s)
``[platform]``   every :class:`PlatformParams` field
``[contact]``    :class:`ContactConfig` fields except the friction
                 coefficients, which always come from ``[platform]``
``[controller]`` impedance, attitude and CoM-shift gains, control rate,
                 plate rate limit (``alpha_max`` in radians)
``[task1]``      :class:`Task1Config` fields
``[task2]``      :class:`Task2Config` fields, ``delta_range`` split into
                 ``delta_min`` / ``delta_max``
``[arm]``        link masses, tool mass, base mount, and the link lengths
                 of the two scenarios (``length_a``, ``length_b``)
``[waypoints]``  only for ``custom``: ``wNN = time, x, z, theta, phase``

Missing keys take their defaults; unknown sections or keys are errors.
"""

from __future__ import annotations

import configparser
import io
import math
from dataclasses import dataclass, field, fields, replace

from .arm import SCENARIO_ARMS, ArmParams, Task2Config
from .control import (AttitudeConfig, ComShiftConfig, ImpedanceConfig,
                      Waypoint, WaypointScript)
from .dynamics import ContactConfig
from .params import ParameterError, PlatformParams, validate_params
from .scenarios import ControllerGains, Task1Config

SCENARIOS = ("task1", "task2a", "task2b", "custom")


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending key."""


@dataclass(frozen=True)
class ArmConfig:
    length_a: float = SCENARIO_ARMS["a"]
    length_b: float = SCENARIO_ARMS["b"]
    m_link1: float = 0.05
    m_link2: float = 0.05
    m_tool: float = 0.03
    base_offset: float = -0.06
    base_height: float = 0.01

    def for_scenario(self, scenario: str) -> ArmParams:
        length = self.length_a if scenario == "a" else self.length_b
        return ArmParams(length, length, self.m_link1, self.m_link2,
                         self.m_tool, self.base_offset, self.base_height)


@dataclass(frozen=True)
class RunConfig:
    scenario: str = "task1"
    decimation: int = 1
    out: str = "out"
    duration: float = 30.0
    platform: PlatformParams = field(default_factory=PlatformParams)
    contact: ContactConfig = field(default_factory=ContactConfig)
    gains: ControllerGains = field(default_factory=ControllerGains)
    task1: Task1Config = field(default_factory=Task1Config)
    task2: Task2Config = field(default_factory=Task2Config)
    arm: ArmConfig = field(default_factory=ArmConfig)
    waypoints: tuple[Waypoint, ...] = ()

    def contact_config(self) -> ContactConfig:
        return replace(self.contact, mu_s=self.platform.mu_s,
                       mu_k=self.platform.mu_k)

    def script(self) -> WaypointScript:
        if not self.waypoints:
            raise ConfigError("[waypoints]: custom scenario needs at least one waypoint")
        return WaypointScript(self.waypoints)


# --- value (de)serialisation ------------------------------------------------

def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse(raw: str, like, where: str):
    raw = raw.strip()
    try:
        if isinstance(like, bool):
            low = raw.lower()
            if low in ("true", "yes", "on", "1"):
                return True
            if low in ("false", "no", "off", "0"):
                return False
            raise ValueError(raw)
        if isinstance(like, int):
            return int(raw)
        if isinstance(like, float):
            value = float(raw)
            if not math.isfinite(value):
                raise ValueError(raw)
            return value
    except ValueError:
        raise ConfigError(f"{where}: cannot parse {raw!r} as "
                          f"{type(like).__name__}") from None
    return raw


def _flat_fields(obj, skip=()):
    return {f.name: getattr(obj, f.name) for f in fields(obj)
            if f.name not in skip}


def _update(obj, section, name, skip=()):
    """Return ``obj`` with keys of ``section`` applied, rejecting unknown keys."""
    current = _flat_fields(obj, skip)
    changes = {}
    for key, raw in section.items():
        if key not in current:
            raise ConfigError(f"[{name}] {key}: unknown key")
        changes[key] = _parse(raw, current[key], f"[{name}] {key}")
    return replace(obj, **changes)


# --- controller block, flattened -------------------------------------------

def _controller_items(g: ControllerGains) -> dict:
    imp, att, cs = g.impedance, g.attitude, g.com_shift
    return {
        "Kp_x": imp.Kp[0], "Kp_z": imp.Kp[1],
        "Kd_x": imp.Kd[0], "Kd_z": imp.Kd[1],
        "gravity_ff": imp.gravity_ff,
        "Kp_att": att.Kp_att, "Kd_att": att.Kd_att,
        "theta_ref": att.theta_ref,
        "k_alpha": cs.k_alpha, "k_alphaI": cs.k_alphaI,
        "alpha_max": cs.alpha_max,
        "integrator_limit": cs.integrator_limit,
        "enabled_gate": cs.enabled_gate,
        "control_dt": g.control_dt, "l_rate_limit": g.l_rate_limit,
    }


def _controller_from(items: dict) -> ControllerGains:
    return ControllerGains(
        impedance=ImpedanceConfig(Kp=(items["Kp_x"], items["Kp_z"]),
                                  Kd=(items["Kd_x"], items["Kd_z"]),
                                  gravity_ff=items["gravity_ff"]),
        attitude=AttitudeConfig(items["Kp_att"], items["Kd_att"],
                                items["theta_ref"]),
        com_shift=ComShiftConfig(items["k_alpha"], items["k_alphaI"],
                                 items["alpha_max"],
                                 items["integrator_limit"],
                                 items["enabled_gate"]),
        control_dt=items["control_dt"], l_rate_limit=items["l_rate_limit"],
    )


def _task2_items(t: Task2Config) -> dict:
    items = _flat_fields(t, skip=("delta_range",))
    items["delta_min"], items["delta_max"] = t.delta_range
    return items


def _task2_from(items: dict) -> Task2Config:
    items = dict(items)
    lo, hi = items.pop("delta_min"), items.pop("delta_max")
    return Task2Config(**items, delta_range=(lo, hi))


def _parse_items(section, defaults: dict, name: str) -> dict:
    items = dict(defaults)
    for key, raw in section.items():
        if key not in defaults:
            raise ConfigError(f"[{name}] {key}: unknown key")
        items[key] = _parse(raw, defaults[key], f"[{name}] {key}")
    return items


def _parse_waypoint(key: str, raw: str) -> Waypoint:
    parts = [p.strip() for p in raw.split(",")]
    if len(parts) != 5:
        raise ConfigError(f"[waypoints] {key}: expected 'time, x, z, theta, phase'")
    try:
        t, x, z, theta = (float(v) for v in parts[:4])
    except ValueError:
        raise ConfigError(f"[waypoints] {key}: non-numeric entry in {raw!r}") from None
    return Waypoint(t, x, z, theta, parts[4])


# --- public API --------------------------------------------------------------

def _parser() -> configparser.ConfigParser:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str  # keys are case-sensitive (Kp_x, T2_max, ...)
    return cp


def dumps(cfg: RunConfig) -> str:
    cp = _parser()
    cp["run"] = {"scenario": cfg.scenario, "decimation": str(cfg.decimation),
                 "out": cfg.out, "duration": _fmt(cfg.duration)}
    sections = {
        "platform": _flat_fields(cfg.platform),
        "contact": _flat_fields(cfg.contact, skip=("mu_s", "mu_k")),
        "controller": _controller_items(cfg.gains),
        "task1": _flat_fields(cfg.task1),
        "task2": _task2_items(cfg.task2),
        "arm": _flat_fields(cfg.arm),
    }
    for name, items in sections.items():
        cp[name] = {k: _fmt(v) for k, v in items.items()}
    cp["waypoints"] = {
        f"w{i:02d}": f"{_fmt(w.time)}, {_fmt(w.x)}, {_fmt(w.z)}, "
                     f"{_fmt(w.theta)}, {w.phase}"
        for i, w in enumerate(cfg.waypoints)
    }
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()


def loads(text: str) -> RunConfig:
    cp = _parser()
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    known = {"run", "platform", "contact", "controller", "task1", "task2",
             "arm", "waypoints"}
    for name in cp.sections():
        if name not in known:
            raise ConfigError(f"[{name}]: unknown section")
    get = lambda name: cp[name] if cp.has_section(name) else {}
    base = RunConfig()

    run_items = _parse_items(get("run"), {"scenario": base.scenario,
                                          "decimation": base.decimation,
                                          "out": base.out,
                                          "duration": base.duration}, "run")
    if run_items["scenario"] not in SCENARIOS:
        raise ConfigError(f"[run] scenario: {run_items['scenario']!r} not in "
                          f"{', '.join(SCENARIOS)}")
    if run_items["decimation"] < 1:
        raise ConfigError("[run] decimation: must be >= 1")
    if run_items["duration"] <= 0:
        raise ConfigError("[run] duration: must be > 0")

    platform = _update(base.platform, get("platform"), "platform")
    try:
        validate_params(platform)
    except ParameterError as exc:
        raise ConfigError(f"[platform] {exc}") from None
    contact = _update(base.contact, get("contact"), "contact",
                      skip=("mu_s", "mu_k"))
    gains = _controller_from(_parse_items(get("controller"),
                                          _controller_items(base.gains),
                                          "controller"))
    task1 = _update(base.task1, get("task1"), "task1")
    task2 = _task2_from(_parse_items(get("task2"), _task2_items(base.task2),
                                     "task2"))
    try:
        arm = _update(base.arm, get("arm"), "arm")
        arm.for_scenario("a"), arm.for_scenario("b")
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"[arm] {exc}") from None
    waypoints = tuple(_parse_waypoint(k, v) for k, v in get("waypoints").items())

    cfg = RunConfig(scenario=run_items["scenario"],
                    decimation=run_items["decimation"], out=run_items["out"],
                    duration=run_items["duration"],
                    platform=platform, contact=contact, gains=gains,
                    task1=task1, task2=task2, arm=arm, waypoints=waypoints)
    for name, check in (("contact", cfg.contact_config().validate),
                        ("task1", task1.validate), ("task2", task2.validate)):
        try:
            check()
        except ValueError as exc:
            raise ConfigError(f"[{name}] {exc}") from None
    if waypoints:
        try:
            cfg.script()
        except ValueError as exc:
            raise ConfigError(f"[waypoints] {exc}") from None
    return cfg


def load(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            return loads(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None


def default_config_text() -> str:
    return dumps(RunConfig())
