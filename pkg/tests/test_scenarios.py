import math

import pytest

from comshift.params import PlatformParams
from comshift.scenarios import (ALPHA_PLATEAU_DEG, Task1Config, detect_zones,
                                friction_cone_holds, run_task1,
                                summarize_task1, task1_script, touch_x)
from comshift.dynamics import ContactConfig

P = PlatformParams()


@pytest.fixture(scope="module")
def task1():
    trace = run_task1(P)
    return trace, summarize_task1(trace, P)


def test_script_shape():
    script = task1_script(P, ContactConfig())
    phases = [w.phase for w in script.waypoints]
    assert phases[0] == "approach"
    assert phases.count("retract") == 1
    assert phases[-1] == "depart"
    assert touch_x(P, ContactConfig()) == pytest.approx(0.7)


def test_config_validation():
    with pytest.raises(ValueError):
        Task1Config(t_retract=5.0).validate()
    with pytest.raises(ValueError):
        Task1Config(settle_window=0.0).validate()


def test_summary_checks_pass(task1):
    _, s = task1
    assert s.passed, s.checks
    assert s.alpha_steady >= ALPHA_PLATEAU_DEG
    assert 0.24 <= s.l_star_achieved <= 0.30


def test_zones_in_order(task1):
    trace, s = task1
    names = [z for z, _ in s.zones]
    times = [t for _, t in s.zones]
    assert names == ["ramp", "plateau", "return"]
    assert times == sorted(times)


def _worst_alpha_dip(trace, s):
    t_ramp, t_plateau = s.zones[0][1], s.zones[1][1]
    peak, worst = -math.inf, 0.0
    for r in trace.rows:
        if t_ramp <= r["t"] <= t_plateau:
            peak = max(peak, r["alpha"])
            worst = max(worst, peak - r["alpha"])
    return math.degrees(worst)


@pytest.mark.xfail(strict=True, reason="stick-to-slip transitions while the "
                   "push bias loads the friction cone dip alpha by ~2.7 deg")
def test_alpha_engages_monotonically_within_one_degree(task1):
    assert _worst_alpha_dip(*task1) <= 1.0


def test_alpha_dips_stay_small(task1):
    assert _worst_alpha_dip(*task1) <= 3.0


def test_plate_never_rises_without_gate(task1):
    trace, _ = task1
    prev = None
    for r in trace.rows:
        if prev is not None and not r["gate"] and not prev["gate"]:
            assert r["l"] <= prev["l"] + 1e-12
        prev = r


def test_friction_cone(task1):
    trace, _ = task1
    assert friction_cone_holds(trace, P.mu_s)


def test_departs_and_settles(task1):
    trace, _ = task1
    last = trace.rows[-1]
    assert last["f_n_frame"] == 0.0
    assert abs(last["vx"]) < 1e-3 and abs(last["theta"]) < 1e-3


def test_frictionless_wall_cannot_reach_horizontal():
    p = P.with_(mu_s=0.0, mu_k=0.0)
    cfg = Task1Config(duration=31.0, t_depart=30.5)
    s = summarize_task1(run_task1(p, cfg=cfg), p, cfg)
    assert s.l_star_predicted is None
    assert "NoFeasiblePlatePosition" in s.prediction_note
    assert s.alpha_steady < 90.0
    assert not s.passed


def test_detect_zones_on_handmade_rows():
    class T:
        rows = [
            {"t": 0.0, "gate": False, "l": 0.0, "alpha": 0.0},
            {"t": 1.0, "gate": True, "l": 0.01, "alpha": 0.5},
            {"t": 2.0, "gate": True, "l": 0.2, "alpha": 1.56},
            {"t": 3.0, "gate": False, "l": 0.1, "alpha": 1.0},
            {"t": 4.0, "gate": False, "l": 0.0, "alpha": 0.2},
        ]
    assert detect_zones(T()) == (("ramp", 1.0), ("plateau", 2.0), ("return", 4.0))
