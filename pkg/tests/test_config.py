import math

import numpy as np
import pytest

from multilzs.config import ConfigError, RunConfig, config_to_text, parse_config

MINIMAL = """
[system]
tls_energy_mhz = 200
tls_coupling_mhz = 25
"""

PANEL_A = """
# two defects, strong upper coupling
[system]
tls_energy_mhz = 200, 400
tls_coupling_mhz = 10, 60

[grid]
t_samples = 100
amp_samples = 100

[engine]
engine = both
stokes = off
dt_ns = 0.002
"""


def test_minimal_config_defaults():
    cfg = parse_config(MINIMAL)
    assert cfg.tls_energy_mhz == (200.0,)
    assert cfg.t_samples == 200 and cfg.amp_samples == 200
    assert cfg.amp_min_mhz == pytest.approx(100.0)
    assert cfg.amp_max_mhz == pytest.approx(600.0)
    assert cfg.engine == "analytic" and cfg.stokes is True
    assert "t_samples" in cfg.defaults and "tls_energy_mhz" not in cfg.defaults
    sys = cfg.system()
    assert sys.epsilon[0] == pytest.approx(2 * math.pi * 0.2)
    assert cfg.a_axis()[-1] == pytest.approx(3 * sys.epsilon[0])
    assert cfg.t_axis()[0] == 1.0 and cfg.t_axis()[-1] == 100.0


def test_round_trip():
    cfg = parse_config(PANEL_A)
    assert cfg.tls_coupling_mhz == (10.0, 60.0)
    again = parse_config(config_to_text(cfg))
    assert again == cfg
    assert config_to_text(again).replace("  # default", "") == config_to_text(cfg).replace("  # default", "")


def test_defaults_are_marked_in_echo():
    text = config_to_text(parse_config(MINIMAL))
    assert "t_samples = 200  # default" in text
    assert "tls_energy_mhz = 200.0\n" in text


@pytest.mark.parametrize(
    "text, line, fragment",
    [
        ("[system]\ntls_energy_mhz = 400, 200\ntls_coupling_mhz = 1, 1\n", 2, "increasing"),
        ("[system]\ntls_energy_mhz = 200\ntls_coupling_mhz = 1\ncolour = red\n", 4, "unknown key"),
        ("[grid]\nt_samples = ten\n", 2, "t_samples"),
        ("[grid]\nt_samples = 1\n", 2, "at least 2"),
        ("[grid]\nt_min_ns = 50\nt_max_ns = 10\n", 3, "ordered"),
        ("[engine]\nengine = quantum\n", 2, "analytic"),
        ("[engine]\nstokes = maybe\n", 2, "on/off"),
        ("[nowhere]\n", 1, "unknown section"),
        ("t_samples = 3\n", 1, "outside"),
        ("[grid]\nt_samples\n", 2, "key = value"),
        ("[grid]\nt_samples = 3\nt_samples = 4\n", 3, "duplicate"),
        ("[system]\ntls_energy_mhz = 200, 300\ntls_coupling_mhz = 1\n", 3, "couplings"),
        ("[system]\ntls_energy_mhz = 200, nan\ntls_coupling_mhz = 1, 1\n", 2, "non-finite"),
        ("[spectral]\nridge_threshold = 1.5\n", 2, "ridge_threshold"),
        ("[run]\nworkers = 0\n", 2, "workers"),
    ],
)
def test_parse_errors_carry_line_numbers(text, line, fragment):
    with pytest.raises(ConfigError) as exc:
        parse_config(text)
    assert exc.value.line == line
    assert fragment in str(exc.value)


def test_system_required_only_when_used():
    cfg = parse_config("[darkstate]\nomega1_mhz = 5\n")
    assert not cfg.has_system
    with pytest.raises(ConfigError):
        cfg.system()


def test_dt_and_kernel_choices():
    cfg = parse_config(PANEL_A + "kernel = python\n")
    assert cfg.dt_policy() == 0.002
    assert cfg.kernel_backend() == "python"
    assert parse_config(MINIMAL).dt_policy() is None
    assert parse_config(MINIMAL).kernel_backend() is None


def test_amplitude_range_explicit():
    cfg = parse_config(MINIMAL + "[grid]\namp_min_mhz = 300\namp_max_mhz = 900\n")
    np.testing.assert_allclose(cfg.a_axis()[[0, -1]], [2 * math.pi * 0.3, 2 * math.pi * 0.9])
    assert "amp_min_mhz" not in cfg.defaults


def test_comments_and_blank_lines():
    cfg = parse_config("; leading\n[grid]   \n t_samples = 7  # inline\n\n")
    assert cfg.t_samples == 7


def test_equality_ignores_default_bookkeeping():
    assert RunConfig(t_samples=3) == RunConfig(t_samples=3, defaults=frozenset({"x"}))
