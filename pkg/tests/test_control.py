import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from comshift.control import (AttitudeConfig, ComShiftConfig, ComShiftLoop,
                              ControlCommand, ImpedanceConfig, Setpoint,
                              Waypoint, WaypointScript, allocate,
                              forward_wrench, impedance_wrench,
                              project_to_tilt, sequence, world_to_body)
from comshift.dynamics import FRAME, ContactConfig, ContactState
from comshift.params import PlanarState, PlatformParams

P = PlatformParams()
HALF_PI = 0.5 * math.pi


def test_hover_feedforward():
    f = impedance_wrench(PlanarState(x=1, z=2), Setpoint(1, 2),
                         ImpedanceConfig(), AttitudeConfig(), P)
    assert f == (0.0, P.m * P.g, 0.0)


def test_push_from_setpoint_inside_wall():
    f_x, _, _ = impedance_wrench(PlanarState(x=0.7), Setpoint(0.8, 0.0),
                                 ImpedanceConfig(gravity_ff=False),
                                 AttitudeConfig(), P)
    assert f_x == pytest.approx(20.0)


def test_attitude_restores():
    _, _, tau = impedance_wrench(PlanarState(theta=0.1), Setpoint(0, 0),
                                 ImpedanceConfig(), AttitudeConfig(Kp_att=10.0), P)
    assert tau == pytest.approx(-1.0)


def test_world_to_body_rotation():
    bx, bz = world_to_body(1.0, 0.0, math.pi / 2)
    assert (bx, bz) == pytest.approx((0.0, -1.0), abs=1e-15)


def test_symmetric_hover_allocation():
    cmd = allocate((0.0, P.G0, 0.0), 0.0, P)
    assert cmd.T1_cmd == pytest.approx(P.G0 / 2)
    assert cmd.T2_cmd == pytest.approx(P.G0 / 2)
    assert cmd.alpha_cmd == 0.0
    assert not cmd.saturated


def test_horizontal_back_rotors_at_full_shift():
    # d = L: the front pair alone carries gravity
    cmd = allocate((P.T2_max, P.G0, 0.0), P.L, P)
    assert cmd.alpha_cmd == pytest.approx(HALF_PI)
    assert cmd.T1_cmd == pytest.approx(P.G0)
    assert cmd.T2_cmd == pytest.approx(P.T2_max)


@settings(max_examples=300)
@given(st.floats(0.0, P.T1_max), st.floats(0.0, P.T2_max),
       st.floats(-HALF_PI, HALF_PI), st.floats(0.0, P.L))
def test_allocation_inverts_forward_wrench(T1, T2, alpha, d):
    wrench = forward_wrench(T1, T2, alpha, d, P)
    cmd = allocate(wrench, d, P)
    again = forward_wrench(cmd.T1_cmd, cmd.T2_cmd, cmd.alpha_cmd, d, P)
    assert again == pytest.approx(wrench, abs=1e-9)
    assert cmd.T1_cmd == pytest.approx(T1, abs=1e-9)
    assert cmd.T2_cmd == pytest.approx(T2, abs=1e-9)
    if T2 > 0.1:
        assert cmd.alpha_cmd == pytest.approx(alpha, abs=1e-9)


@given(st.floats(-1e4, 1e4), st.floats(-1e4, 1e4), st.floats(-1e3, 1e3),
       st.floats(0.0, P.L), st.floats(-1.0, 1.0))
def test_saturation_keeps_invariants(fx, fz, tau, d, l_cmd):
    cmd = allocate((fx, fz, tau), d, P, l_cmd)
    assert 0.0 <= cmd.T1_cmd <= P.T1_max
    assert 0.0 <= cmd.T2_cmd <= P.T2_max + 1e-12
    assert abs(cmd.alpha_cmd) <= HALF_PI
    assert 0.0 <= cmd.l_cmd <= P.l_max


def test_saturation_keeps_vertical_share():
    cmd = allocate((100.0, P.G0, 0.0), 0.0, P)
    assert cmd.saturated
    assert cmd.T2_cmd == pytest.approx(P.T2_max)
    assert cmd.T2_cmd * math.cos(cmd.alpha_cmd) == pytest.approx(P.G0 / 2)


def test_tilt_projection_matches_vertical_share_while_lagging():
    cmd = ControlCommand(20.0, 20.0, math.radians(60))
    out = project_to_tilt(cmd, math.radians(20), P)
    demand_z = 20.0 * math.cos(math.radians(60))
    got_z = out.T2_cmd * math.cos(math.radians(20))
    assert got_z == pytest.approx(demand_z, rel=0.01)
    # aligned servo: unchanged
    assert project_to_tilt(cmd, cmd.alpha_cmd, P).T2_cmd == pytest.approx(20.0)


def test_pi_zero_error():
    loop = ComShiftLoop(ComShiftConfig(), P.l_max)
    assert loop.update(HALF_PI, 0.01, True) == 0.0


def test_pi_arithmetic():
    loop = ComShiftLoop(ComShiftConfig(k_alpha=0.1, k_alphaI=0.2), P.l_max,
                        l_rate_limit=math.inf)
    for _ in range(100):
        l = loop.update(HALF_PI - 0.1, 0.01, True)
    assert l == pytest.approx(0.03, abs=1e-12)


def test_pi_command_rate_limited():
    loop = ComShiftLoop(ComShiftConfig(), P.l_max, l_rate_limit=0.02)
    out = [loop.update(0.0, 0.01, True) for _ in range(50)]
    assert np.all(np.diff([0.0] + out) <= 0.02 * 0.01 + 1e-15)


def test_anti_windup_bound():
    cfg = ComShiftConfig(integrator_limit=0.4)
    loop = ComShiftLoop(cfg, P.l_max, l_rate_limit=math.inf)
    for _ in range(5000):
        l = loop.update(0.0, 0.01, True)
        assert abs(loop.integrator) <= cfg.integrator_limit
    assert l == P.l_max
    # the held command recovers as soon as the error turns around
    loop.update(HALF_PI + 0.5, 0.01, True)
    assert loop.l_cmd < P.l_max


@given(st.lists(st.floats(-HALF_PI, HALF_PI), min_size=1, max_size=50))
def test_gate_off_never_increases(alphas):
    loop = ComShiftLoop(ComShiftConfig(), P.l_max)
    for _ in range(30):
        loop.update(0.0, 0.01, True)
    prev = loop.l_cmd
    for a in alphas:
        l = loop.update(a, 0.01, False)
        assert l <= prev
        prev = l


def test_script_validation():
    with pytest.raises(ValueError):
        WaypointScript(())
    with pytest.raises(ValueError):
        WaypointScript((Waypoint(1.0, 0, 0), Waypoint(1.0, 0, 0)))
    with pytest.raises(ValueError):
        WaypointScript((Waypoint(0.0, 0, 0, 0.0, "hover"),))


def _script():
    return WaypointScript((Waypoint(0.0, 0.6, 1.0, 0.0, "approach"),
                           Waypoint(1.0, 0.8, 1.0, 0.0, "push"),
                           Waypoint(5.0, 0.8, 1.0, 0.0, "retract")))


def test_sequence_phases():
    cc = ContactConfig()
    sp, phase, gate = sequence(_script(), -1.0, {}, cc)
    assert (sp.x, phase, gate) == (0.6, "approach", False)
    stuck = ContactState(True, 1e-3, 10.0, 0.0, True, 1.0, stable_since=1.0)
    _, phase, gate = sequence(_script(), 2.0, {FRAME: stuck}, cc)
    assert (phase, gate) == ("self-displace", True)
    _, phase, gate = sequence(_script(), 1.2, {FRAME: stuck}, cc)
    assert (phase, gate) == ("push", False)
    _, phase, gate = sequence(_script(), 6.0, {FRAME: stuck}, cc)
    assert (phase, gate) == ("retract", False)
