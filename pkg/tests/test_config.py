import math

import pytest
from hypothesis import given, strategies as st

from comshift.config import (ConfigError, RunConfig, default_config_text,
                             dumps, load, loads)
from comshift.control import Waypoint


def test_defaults_round_trip():
    text = default_config_text()
    cfg = loads(text)
    assert cfg == RunConfig()
    assert dumps(cfg) == text


@given(st.floats(0.05, 1.5), st.floats(1.0, 1e5), st.integers(1, 20),
       st.floats(0.0, 1.0))
def test_round_trip_is_idempotent(mu, k_n, dec, alpha_max):
    text = default_config_text()
    text = text.replace("mu_s = 0.5", f"mu_s = {mu!r}")
    text = text.replace("mu_k = 0.45", f"mu_k = {0.9 * mu!r}")
    text = text.replace("k_n = 10000.0", f"k_n = {k_n!r}")
    text = text.replace("decimation = 1", f"decimation = {dec}")
    text = text.replace(f"alpha_max = {math.pi / 2!r}", f"alpha_max = {alpha_max!r}")
    once = loads(text)
    assert once.platform.mu_s == mu and once.decimation == dec
    assert loads(dumps(once)) == once
    assert dumps(loads(dumps(once))) == dumps(once)


def test_friction_flows_into_contact():
    cfg = loads("[platform]\nmu_s = 0.3\nmu_k = 0.27\n")
    assert cfg.contact_config().mu_s == 0.3
    assert cfg.contact_config().mu_k == 0.27


def test_waypoints_round_trip():
    wps = (Waypoint(0.0, 0.6, 1.0, 0.0, "approach"),
           Waypoint(2.0, 0.8, 1.0, 0.0, "push"))
    cfg = RunConfig(scenario="custom", waypoints=wps)
    back = loads(dumps(cfg))
    assert back.waypoints == wps
    assert back.script().waypoints == wps


@pytest.mark.parametrize("text, key", [
    ("[platform]\nmass = 3\n", "mass"),
    ("[platform]\nm = heavy\n", "[platform] m"),
    ("[platform]\nm_S = 4.0\n", "m_S < m"),
    ("[run]\nscenario = task3\n", "[run] scenario"),
    ("[run]\ndecimation = 0\n", "[run] decimation"),
    ("[rotors]\nn = 4\n", "[rotors]"),
    ("[controller]\ngravity_ff = maybe\n", "gravity_ff"),
    ("[waypoints]\nw0 = 0, 1, 2\n", "w0"),
    ("[waypoints]\nw0 = 0, 1, 2, 0, hover\n", "[waypoints]"),
    ("[task2]\nelbow = sideways\n", "[task2]"),
    ("[contact]\nk_n = -1\n", "[contact]"),
    ("[arm]\nlength_a = 0\n", "[arm]"),
])
def test_errors_name_the_key(text, key):
    with pytest.raises(ConfigError, match=key.replace("[", r"\[").replace("]", r"\]")):
        loads(text)


def test_custom_without_waypoints():
    with pytest.raises(ConfigError, match="waypoint"):
        RunConfig(scenario="custom").script()


def test_load_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load(tmp_path / "nope.ini")
