import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from multilzs.model import (
    NotTraversedError,
    PathDescriptor,
    PatternGrid,
    SystemSpec,
    TrianglePulse,
    adiabatic_phase_rates,
    crossing_times,
    drive_value,
    dynamical_phases,
    existing_paths,
    mhz_to_rad_per_ns,
    path_energy,
    path_phases,
    rad_per_ns_to_mhz,
    traversed_count,
)


def test_mhz_conversion():
    assert mhz_to_rad_per_ns(1000.0) == pytest.approx(2 * math.pi)
    assert rad_per_ns_to_mhz(mhz_to_rad_per_ns(123.0)) == pytest.approx(123.0)


@pytest.mark.parametrize(
    "eps, delta, slope",
    [
        ((), (), 1.0),
        ((1.0, 2.0), (0.1,), 1.0),
        ((2.0, 1.0), (0.1, 0.1), 1.0),
        ((1.0, 1.0), (0.1, 0.1), 1.0),
        ((-1.0,), (0.1,), 1.0),
        ((1.0,), (-0.1,), 1.0),
        ((1.0,), (0.1,), 0.0),
        ((float("nan"),), (0.1,), 1.0),
    ],
)
def test_system_rejects_bad_input(eps, delta, slope):
    with pytest.raises(ValueError):
        SystemSpec(eps, delta, slope)


@pytest.mark.parametrize("amp, width", [(0.0, 1.0), (1.0, 0.0), (-1.0, 2.0), (float("inf"), 1.0)])
def test_pulse_rejects_bad_input(amp, width):
    with pytest.raises(ValueError):
        TrianglePulse(amp, width)


def test_drive_shape():
    p = TrianglePulse(2.0, 10.0)
    assert drive_value(p, 0.0) == 0.0
    assert drive_value(p, 5.0) == 2.0
    assert drive_value(p, 10.0) == 0.0
    assert drive_value(p, 2.5) == pytest.approx(1.0)
    t = np.linspace(0, 10, 101)
    np.testing.assert_allclose(drive_value(p, t), drive_value(p, 10.0 - t[::-1])[::-1])
    with pytest.raises(ValueError):
        drive_value(p, 10.5)
    with pytest.raises(ValueError):
        drive_value(p, -1e-3)


def test_crossing_times_symmetric():
    sys = SystemSpec((1.0, 2.0), (0.1, 0.1), slope=2.0)
    p = TrianglePulse(3.0, 12.0)
    for n in (1, 2):
        up, down = crossing_times(sys, p, n)
        assert up + down == pytest.approx(12.0)
        assert sys.slope * drive_value(p, up) == pytest.approx(sys.epsilon[n - 1])
        assert sys.slope * drive_value(p, down) == pytest.approx(sys.epsilon[n - 1])
    with pytest.raises(IndexError):
        crossing_times(sys, p, 3)


def test_turning_point_counts_as_not_reached():
    sys = SystemSpec((1.0, 2.0), (0.1, 0.1))
    assert traversed_count(sys, TrianglePulse(2.0, 1.0)) == 1
    assert traversed_count(sys, TrianglePulse(2.0 * (1 + 1e-12), 1.0)) == 1
    assert traversed_count(sys, TrianglePulse(2.0 * (1 + 1e-6), 1.0)) == 2
    with pytest.raises(NotTraversedError):
        crossing_times(sys, TrianglePulse(1.5, 1.0), 2)


def test_never_crossed_gives_single_path():
    sys = SystemSpec((5.0,), (0.3,))
    p = TrianglePulse(1.0, 3.0)
    assert existing_paths(sys, p) == [2]
    assert path_phases(sys, p) == [pytest.approx(1.0 * 3.0 / 2)]


def test_path_energy_piecewise():
    sys = SystemSpec((1.0, 2.0), (0.1, 0.1))
    p = TrianglePulse(3.0, 6.0)
    up, down = crossing_times(sys, p, 1)
    mid = 0.5 * (up + down)
    assert path_energy(sys, p, 1, mid) == 1.0
    assert path_energy(sys, p, 3, mid) == pytest.approx(3.0)
    assert path_energy(sys, p, 1, 0.5 * up) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        path_energy(sys, TrianglePulse(1.5, 6.0), 2, 1.0)


def _quad_phase(sys, pulse, i):
    pts = [pulse.width / 2]
    if i <= sys.n_tls:
        pts += list(crossing_times(sys, pulse, i))
    val, _ = quad(lambda t: path_energy(sys, pulse, i, t), 0.0, pulse.width, points=pts, limit=200)
    return val


@settings(max_examples=40, deadline=None)
@given(
    eps=st.lists(st.floats(0.1, 5.0), min_size=1, max_size=4, unique=True),
    amp=st.floats(0.2, 8.0),
    width=st.floats(0.5, 50.0),
    slope=st.floats(0.5, 2.0),
)
def test_closed_form_phases_match_quadrature(eps, amp, width, slope):
    eps = sorted(eps)
    if min(np.diff(eps), default=1.0) < 1e-3:
        return
    sys = SystemSpec(tuple(eps), tuple(0.1 for _ in eps), slope)
    pulse = TrianglePulse(amp, width)
    closed = path_phases(sys, pulse)
    for i, phase in zip(existing_paths(sys, pulse), closed):
        assert phase == pytest.approx(_quad_phase(sys, pulse, i), rel=1e-9, abs=1e-9)


def test_phase_difference_slope_in_width():
    # difference of the two reflecting paths grows linearly in T
    sys = SystemSpec.from_mhz([200, 400], [10, 10])
    e1, e2 = sys.epsilon
    amp = 2.0 * e2
    widths = np.array([10.0, 20.0, 35.0])
    diff = [
        (lambda ph: ph[0] - ph[1])(path_phases(sys, TrianglePulse(amp, w))) for w in widths
    ]
    slopes = np.diff(diff) / np.diff(widths)
    e12 = e2 - e1
    expected = e12 - (e1 + e2) * e12 / (2.0 * amp)
    np.testing.assert_allclose(np.abs(slopes), expected, rtol=1e-12)


def test_dynamical_phases_broadcast():
    eps = (1.0, 2.0)
    ph = dynamical_phases(eps, 1.0, 3.0, np.array([1.0, 2.0, 4.0]), 2)
    assert ph.shape == (3, 3)
    np.testing.assert_allclose(ph[:, 1], 2 * ph[:, 0])


def test_adiabatic_rates_reduce_to_bare_lines():
    eps = (1.0, 2.0)
    weak = SystemSpec(eps, (1e-7, 1e-7))
    peak = 3.7
    rates = adiabatic_phase_rates(weak, peak)
    bare = dynamical_phases(eps, 1.0, peak, 1.0, 2)
    np.testing.assert_allclose(rates, bare, atol=1e-9)


def test_adiabatic_rates_follow_repelled_levels():
    # single TLS: the path on the flat level is pushed down, the qubit path up
    sys = SystemSpec((1.0,), (0.2,))
    peak = 3.0
    rates = adiabatic_phase_rates(sys, peak)
    bare = dynamical_phases(sys.epsilon, 1.0, peak, 1.0, 1)
    assert rates[0] < bare[0]
    assert rates[1] > bare[1]
    lo = lambda q: 0.5 * (q + 1.0) - math.hypot(0.5 * (q - 1.0), 0.2)
    hi = lambda q: 0.5 * (q + 1.0) + math.hypot(0.5 * (q - 1.0), 0.2)
    stay_low = (quad(lo, 0, 1.0)[0] + quad(lo, 1.0, peak)[0]) / peak
    switch_up = (quad(lo, 0, 1.0)[0] + quad(hi, 1.0, peak)[0]) / peak
    assert rates[0] == pytest.approx(stay_low, rel=1e-10)
    assert rates[1] == pytest.approx(switch_up, rel=1e-10)


def test_path_descriptor_bounds():
    PathDescriptor(1, 0.5, 0.0)
    with pytest.raises(ValueError):
        PathDescriptor(1, 1.5, 0.0)


def test_pattern_grid_validation():
    t = np.array([1.0, 2.0, 3.0])
    a = np.array([0.5, 1.0])
    PatternGrid(np.full((2, 3), 0.5), t, a)
    with pytest.raises(ValueError):
        PatternGrid(np.full((3, 2), 0.5), t, a)
    with pytest.raises(ValueError):
        PatternGrid(np.full((2, 3), 1.5), t, a)
    with pytest.raises(ValueError):
        PatternGrid(np.full((2, 3), 0.5), t[::-1], a)
