import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from oracles import random_timeline
from starkfid.sequence import (PRESETS, VoltageRangeWarning, VoltageTimeline,
                               preset_constant, preset_invert_at, preset_invert_then_off,
                               preset_multi_invert, rephasing_times, voltage_at,
                               voltage_integral)

TS = 10e-9


def test_ramp_midpoint_is_zero():
    tl = preset_invert_at(95.0, 0.0, 1e-6, TS)
    assert voltage_at(tl, 1e-6) == pytest.approx(0.0, abs=1e-9)


def test_constant_segment_bit_exact():
    tl = preset_constant(95.0, 0.0, TS)
    assert voltage_at(tl, 0.5e-6) == 95.0
    assert voltage_at(tl, 1.0) == 95.0
    assert voltage_at(tl, -1.0) == 0.0


def test_constant_over_interval():
    tl = VoltageTimeline.from_knots([(0.0, 7.0), (1e-6, 7.0)])
    assert voltage_integral(tl, 0.0, 1e-6) == 7e-6


def test_antisymmetric_instant_sequence_integrates_to_zero():
    tl = preset_invert_at(95.0, 0.0, 1.5e-6, 0.0)
    assert voltage_integral(tl, 0.0, 3e-6) == 0.0


def test_reversed_limits_rejected():
    with pytest.raises(ValueError):
        voltage_integral(preset_constant(1.0), 2e-6, 1e-6)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.1e-6, 6e-6))
def test_additivity(seed, t_end):
    tl = random_timeline(np.random.default_rng(seed))
    whole = voltage_integral(tl, 0.0, t_end)
    parts = voltage_integral(tl, 0.0, t_end / 2) + voltage_integral(tl, t_end / 2, t_end)
    # relative to the largest area the waveform could enclose
    assert abs(whole - parts) <= 4e-15 * np.max(np.abs(tl.volts)) * t_end


def test_integral_matches_adaptive_quadrature():
    rng = np.random.default_rng(2024)
    for _ in range(50):
        tl = random_timeline(rng)
        t1, t2 = np.sort(rng.uniform(0, 6e-6, 2))
        cuts = np.concatenate(([t1], tl.times[(tl.times > t1) & (tl.times < t2)], [t2]))
        expect = mag = 0.0
        for a, b in zip(cuts[:-1], cuts[1:]):
            if b > a:
                expect += integrate.quad(lambda t: voltage_at(tl, t), a, b)[0]
                mag += integrate.quad(lambda t: abs(voltage_at(tl, t)), a, b)[0]
        got = voltage_integral(tl, t1, t2)
        # relative to the integral of |V| so near-cancellations stay meaningful
        assert abs(got - expect) <= 1e-12 * max(mag, 1e-300)


def test_continuity_with_ramps():
    rng = np.random.default_rng(5)
    for _ in range(10):
        tl = random_timeline(rng)
        t = np.linspace(0, 6e-6, 200_001)
        slope = np.max(np.abs(np.diff(tl.volts) / np.diff(tl.times)))
        for eps in (1e-12, 1e-14):
            jump = np.max(np.abs(voltage_at(tl, t + eps) - voltage_at(tl, t)))
            assert jump <= slope * eps * 1.01 + 1e-12


def test_instant_jump_takes_right_value():
    tl = preset_invert_at(95.0, 0.0, 1e-6, 0.0)
    assert voltage_at(tl, 1e-6) == -95.0
    assert voltage_at(tl, np.nextafter(1e-6, 0)) == 95.0


def test_knot_validation():
    with pytest.raises(ValueError, match="increasing"):
        VoltageTimeline.from_knots([(1.0, 0.0), (0.0, 1.0)])
    with pytest.raises(ValueError, match="t_switch == 0"):
        VoltageTimeline.from_knots([(0.0, 0.0), (0.0, 1.0)], t_switch=1e-9)
    with pytest.raises(ValueError, match="two knots"):
        VoltageTimeline.from_knots([(0.0, 0.0), (0.0, 1.0), (0.0, 2.0)], t_switch=0.0)


def test_range_is_a_warning():
    with pytest.warns(VoltageRangeWarning):
        tl = preset_constant(150.0)
    assert voltage_at(tl, 1.0) == 150.0


def test_presets_within_range_for_95v():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        preset_constant(95.0)
        preset_invert_at(-95.0, 0.0, 1e-6)
        preset_invert_then_off(95.0, 0.0, 1e-6)
        preset_multi_invert(95.0, 0.0, 1e-6, 5)


def test_constant_preset():
    assert preset_constant(0.0).is_zero()
    tl = preset_constant(95.0, 0.0, TS)
    assert voltage_at(tl, TS) == 95.0
    assert voltage_at(tl, TS / 2) == 47.5
    assert voltage_at(tl, 0.0) == 0.0


def test_invert_at_preset():
    tau = 1e-6
    tl = preset_invert_at(95.0, 0.2e-6, tau, TS)
    assert voltage_at(tl, 0.2e-6 + tau - TS / 2) == 95.0
    assert voltage_at(tl, 0.2e-6 + tau + TS / 2) == -95.0
    assert voltage_at(tl, 1.0) == -95.0
    inst = preset_invert_at(95.0, 0.2e-6, tau, 0.0)
    assert abs(voltage_integral(inst, 0.2e-6, 0.2e-6 + 2 * tau)) <= 1e-15 * 95.0 * tau


def test_invert_then_off_preset():
    tau, v = 1.5e-6, 95.0
    tl = preset_invert_then_off(v, 0.0, tau, TS)
    assert voltage_at(tl, 2 * tau + TS) == 0.0
    assert voltage_at(tl, 5e-6) == 0.0
    # residual from the on-ramp (v*TS/2) and the centred flip/off ramps
    residual = voltage_integral(tl, 0.0, 10e-6)
    assert residual == pytest.approx(-v * TS / 2, rel=1e-9)
    inst = preset_invert_then_off(v, 0.0, tau, 0.0)
    assert voltage_integral(inst, 0.0, 10e-6) == pytest.approx(0.0, abs=1e-20)


def test_multi_invert_equivalences():
    assert preset_multi_invert(95.0, 0.1e-6, 1e-6, 1, TS) == preset_invert_at(95.0, 0.1e-6, 1e-6, TS)
    assert preset_multi_invert(95.0, 0.1e-6, 1e-6, 0, TS) == preset_constant(95.0, 0.1e-6, TS)


def test_multi_invert_zero_at_even_multiples():
    tau = 1e-6
    tl = preset_multi_invert(95.0, 0.0, tau, 3, 0.0)
    for k in (1, 2, 3):
        assert abs(voltage_integral(tl, 0.0, 2 * k * tau)) < 1e-18
    assert rephasing_times(tl) == pytest.approx([2e-6, 4e-6, 6e-6], abs=1e-18)


def test_ramped_rephasing_shift():
    # each centred flip keeps the echo, the on-ramp moves it early by TS/2
    tl = preset_invert_at(95.0, 0.0, 1e-6, TS)
    assert rephasing_times(tl) == pytest.approx([2e-6 - TS / 2], rel=1e-12)
    off = preset_invert_then_off(95.0, 0.0, 1e-6, TS)
    assert rephasing_times(off) == pytest.approx([2e-6 - TS / 2], rel=1e-12)


def test_rephasing_none_for_constant():
    assert rephasing_times(preset_constant(95.0)) == []
    assert rephasing_times(preset_constant(0.0)) == []


def test_events_closer_than_ramp_rejected():
    with pytest.raises(ValueError, match="ramp"):
        preset_multi_invert(95.0, 0.0, 5e-9, 2, TS)


def test_negated_and_registry():
    tl = preset_invert_at(95.0, 0.0, 1e-6)
    assert np.array_equal(tl.negated().volts, -tl.volts)
    assert set(PRESETS) == {"constant", "invert_at", "invert_then_off", "multi_invert"}
