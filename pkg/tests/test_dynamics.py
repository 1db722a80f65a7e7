import math

import pytest

from comshift.control import ControlCommand
from comshift.dynamics import (EE, FRAME, NO_CONTACT, ContactConfig,
                               NumericalDivergence, SimTrace, detect_stable_contact,
                               run, step)
from comshift.params import PlanarState, PlatformParams

P = PlatformParams()
CC = ContactConfig()


def motors_off(t, state, contacts):
    return ControlCommand(0.0, 0.0, 0.0)


def hover(t, state, contacts):
    half = 0.5 * P.G0
    return ControlCommand(half, half, 0.0)


def test_free_fall():
    trace = run(PlanarState(z=10.0), motors_off, P, CC, 1.0)
    drop = 10.0 - trace.rows[-1]["z"]
    assert abs(drop - 0.5 * P.g) / (0.5 * P.g) <= 1e-3
    # semi-implicit Euler: n(n+1)/2 g dt^2
    n, dt = 1000, 1e-3
    assert drop == pytest.approx(P.g * dt * dt * n * (n + 1) / 2, rel=1e-12)


def test_hover_residual():
    trace = run(PlanarState(z=1.0), hover, P, CC, 2.0)
    last = trace.rows[-1]
    for name in ("vx", "vz", "omega"):
        assert abs(last[name]) / 2.0 < 1e-4


def test_zero_duration_trace_has_initial_row_only():
    trace = run(PlanarState(z=1.0), hover, P, CC, 0.0)
    assert len(trace) == 1
    assert trace.rows[0]["t"] == 0.0


def test_sampled_at_control_rate():
    trace = run(PlanarState(z=1.0), hover, P, CC, 0.5)
    assert len(trace) == 51
    assert trace.rows[-1]["t"] == pytest.approx(0.5)
    with pytest.raises(ValueError):
        run(PlanarState(), hover, P, CC, 0.1, control_dt=0.0105)


def test_identical_runs_identical_csv():
    a = run(PlanarState(z=1.0, x=0.5), hover, P, CC, 0.5).to_csv()
    b = run(PlanarState(z=1.0, x=0.5), hover, P, CC, 0.5).to_csv()
    assert a == b


def test_divergence_names_step():
    bad = lambda t, s, c: ControlCommand(float("nan"), 0.0, 0.0)
    with pytest.raises(NumericalDivergence) as info:
        run(PlanarState(z=1.0), bad, P, CC, 0.1)
    assert info.value.step_index == 0


def test_step_rejects_large_dt():
    with pytest.raises(ValueError):
        step(PlanarState(), {}, ControlCommand(0, 0, 0), P, CC, 0.01)


def test_stable_contact_gate():
    cfg = ContactConfig(stable_force_threshold=2.0, stable_duration=0.5)
    tip = cfg.wall_x - (P.L + P.L0)
    # press 5 N into the wall: penetration 5/k_n, no motion
    state = PlanarState(x=tip + 5.0 / cfg.k_n, z=1.0)
    contacts = {FRAME: NO_CONTACT, EE: NO_CONTACT}
    t = 0.0
    dt = 1e-3
    seen_true = None
    for k in range(600):
        _, contacts, log = step(state, contacts, ControlCommand(0, 0, 0), P,
                                cfg, dt, t=t)
        if seen_true is None and detect_stable_contact(contacts[FRAME], cfg, t):
            seen_true = t
        t += dt
    assert contacts[FRAME].normal_force == pytest.approx(5.0)
    assert detect_stable_contact(contacts[FRAME], cfg, 0.6)
    assert seen_true == pytest.approx(0.5, abs=2e-3)


def test_no_adhesion_when_leaving():
    tip = CC.wall_x - (P.L + P.L0)
    state = PlanarState(x=tip + 1e-4, z=1.0, vx=-1.0)
    _, contacts, _ = step(state, {}, ControlCommand(0, 0, 0), P, CC, 1e-3)
    assert contacts[FRAME].normal_force == 0.0


def _press(vz, steps=200):
    """Frame held 1 mm into the wall (10 N) while sliding at ``vz``."""
    tip = CC.wall_x - (P.L + P.L0)
    contacts = {}
    out = []
    for k in range(steps):
        state = PlanarState(x=tip + 1e-3, z=1.0 + vz * k * 1e-3, vz=vz)
        _, contacts, _ = step(state, contacts, ControlCommand(0, 0, 0), P,
                              CC, 1e-3)
        out.append(contacts[FRAME])
    return out


def test_stuck_contact_inside_cone():
    for cs in _press(0.0):
        assert cs.stick
        assert cs.tangential_force == 0.0


def test_sliding_contact_uses_kinetic_friction():
    seq = _press(0.05)
    last = seq[-1]
    assert not last.stick
    assert last.tangential_force == pytest.approx(-CC.mu_k * last.normal_force)
    for cs in seq:
        assert abs(cs.tangential_force) <= CC.mu_s * cs.normal_force + 1e-9


def test_contact_config_validation():
    with pytest.raises(ValueError):
        ContactConfig(mu_s=0.4, mu_k=0.5).validate()
    with pytest.raises(ValueError):
        ContactConfig(k_n=0.0).validate()


def test_trace_csv_layout(tmp_path):
    trace = run(PlanarState(z=1.0), hover, P, CC, 0.02)
    trace.header["scenario"] = "hover"
    path = tmp_path / "t.csv"
    trace.write_csv(path)
    text = path.read_bytes().decode()
    assert "\r" not in text
    lines = text.splitlines()
    assert lines[0] == "# scenario: hover"
    assert lines[1].split(",")[:3] == ["t", "x", "z"]
    assert len(lines) == 2 + 3
    assert float(lines[-1].split(",")[0]) == 0.02
