import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from builders import small_scenario
from starkfid.analysis import (AnalysisReport, ShortTraceWarning, detect_revivals,
                               fit_revival_slope, freeze_rms, fwhm, intensity_ratio,
                               linear_fit, secondary_maximum, spectrum_of_decay,
                               visibility)
from starkfid.dynamics import TimeGrid, Trace, run_scenario


def spectrum(trace, **kw):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ShortTraceWarning)
        return spectrum_of_decay(trace, **kw)


def record_bin(grid):
    """Frequency resolution of the unpadded record."""
    return 1.0 / (grid.n_points * grid.dt)


def test_lorentzian_pair():
    gamma = 1e6
    g = TimeGrid(0.0, 40 / (np.pi * gamma), 4001)
    s = spectrum(Trace(g, np.exp(-np.pi * gamma * g.times)))
    w = fwhm(s)
    assert abs(w.fwhm_hz - gamma) <= s.df
    assert not w.multimodal
    # centred on zero, so +f and -f crossings are symmetric
    assert w.f_low == pytest.approx(-w.f_high, rel=1e-3)


def test_detuned_line_appears_at_positive_frequency():
    g = TimeGrid(0.0, 20e-6, 2001)
    f0 = 2e6
    s = spectrum(Trace(g, np.exp(-1j * 2 * np.pi * f0 * g.times - g.times / 2e-6)))
    assert s.freqs_hz[np.argmax(s.density)] == pytest.approx(f0, abs=s.df)


def test_square_pair_from_sinc():
    b = 1e6
    g = TimeGrid(-100e-6, 100e-6, 4001)
    s = spectrum(Trace(g, np.sinc(b * g.times)))
    assert abs(fwhm(s).fwhm_hz - b) <= record_bin(g)


def test_gaussian_pair():
    sigma = 1e6 / (2 * np.sqrt(2 * np.log(2)))
    g = TimeGrid(-3e-6, 3e-6, 3001)
    s = spectrum(Trace(g, np.exp(-0.5 * (2 * np.pi * sigma * g.times) ** 2)))
    # the power spectrum is narrower than the amplitude spectrum by sqrt(2)
    assert abs(fwhm(s).fwhm_hz - 1e6 / np.sqrt(2)) <= s.df


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, st.integers(2, 300), elements=st.floats(-1e3, 1e3)),
       st.integers(1, 16), st.sampled_from(["field", "intensity"]))
def test_parseval(re, pad, mode):
    n = re.size
    amp = re + 1j * np.roll(re, 1)
    g = TimeGrid(0.0, 1e-6, n)
    tr = Trace(g, amp)
    s = spectrum(tr, zero_pad=pad, mode=mode)
    x = tr.amplitude if mode == "field" else tr.intensity
    energy = np.sum(np.abs(x) ** 2) * g.dt
    assert np.sum(s.density) * s.df == pytest.approx(energy, rel=1e-9, abs=1e-300)


def test_short_trace_flag():
    g = TimeGrid(0.0, 1e-6, 101)
    with pytest.warns(ShortTraceWarning):
        s = spectrum_of_decay(Trace(g, np.exp(-g.times / 1e-5)))
    assert s.short_trace
    long = spectrum(Trace(g, np.exp(-g.times / 1e-8)))
    assert not long.short_trace


def test_spectrum_argument_checks():
    tr = Trace(TimeGrid(0.0, 1.0, 10), np.ones(10, complex))
    with pytest.raises(ValueError):
        spectrum_of_decay(tr, zero_pad=0)
    with pytest.raises(ValueError):
        spectrum_of_decay(tr, mode="phase")


def test_fwhm_multimodal_flag():
    g = TimeGrid(0.0, 50e-6, 5001)
    two_lines = (np.exp(-1j * 2 * np.pi * 3e6 * g.times)
                 + np.exp(1j * 2 * np.pi * 3e6 * g.times)) * np.exp(-g.times / 2e-6)
    w = fwhm(spectrum(Trace(g, two_lines)))
    assert w.multimodal
    assert w.fwhm_hz == pytest.approx(6e6, rel=0.05)


# visibility and revivals --------------------------------------------------

def _bump(g, t0, width, height=1.0):
    return np.sqrt(height) * np.exp(-((g.times - t0) / width) ** 2)


def test_visibility_identical_traces():
    g = TimeGrid(0.0, 1e-6, 101)
    tr = Trace(g, _bump(g, 0.4e-6, 0.1e-6) + 0.1)
    assert visibility(tr, tr, (0.2e-6, 0.6e-6)) == 1.0


@pytest.mark.parametrize("c", [2.0, 0.25, 3.7, 1e-8])
def test_visibility_scale_invariance(c):
    g = TimeGrid(0.0, 1e-6, 101)
    rng = np.random.default_rng(0)
    p = Trace(g, _bump(g, 0.4e-6, 0.1e-6) * (1 + 0.1 * rng.random(101)))
    r = Trace(g, np.exp(-g.times / 1e-6) + 0j)
    sp, sr = Trace(g, p.amplitude * np.sqrt(c)), Trace(g, r.amplitude * np.sqrt(c))
    v1 = visibility(p, r, (0.2e-6, 0.6e-6))
    v2 = visibility(sp, sr, (0.2e-6, 0.6e-6))
    assert abs(v2 - v1) <= 1e-15 * v1 * 4


def test_visibility_reference_floor():
    g = TimeGrid(0.0, 1e-6, 101)
    ref = np.ones(101, complex)
    ref[50] = 0.0
    with pytest.raises(ValueError, match="reference too small for ratio"):
        visibility(Trace(g, _bump(g, 0.5e-6, 0.05e-6)), Trace(g, ref), (0.4e-6, 0.6e-6))


def test_visibility_reports_peak_time():
    g = TimeGrid(0.0, 1e-6, 101)
    v, t = visibility(Trace(g, _bump(g, 0.3e-6, 0.05e-6, 0.5)), Trace(g, np.ones(101, complex)),
                      (0.1e-6, 0.9e-6), return_time=True)
    assert t == pytest.approx(0.3e-6) and v == pytest.approx(0.5)


def test_visibility_ideal_invert():
    sc = small_scenario(timeline={"preset": "invert_at", "v_v": 95.0, "t_on_s": 0.0,
                                  "tau_s": 1e-6, "t_switch_s": 0.0})
    pert, ref = run_scenario(sc)
    assert visibility(pert, ref, (1.8e-6, 2.2e-6)) == pytest.approx(1.0, abs=1e-6)


def test_revivals_single_and_multiple():
    inv = small_scenario()
    pert, ref = run_scenario(inv)
    (t_rev,) = detect_revivals(pert, ref)
    assert abs(t_rev - 2e-6) <= inv.grid.dt

    multi = small_scenario(timeline={"preset": "multi_invert", "v_v": 95.0, "t_on_s": 0.0,
                                     "tau_s": 0.8e-6, "n_flips": 3, "t_switch_s": 1e-8})
    pert, ref = run_scenario(multi)
    revs = detect_revivals(pert, ref)
    assert len(revs) >= 2
    assert abs(revs[0] - 1.6e-6) <= multi.grid.dt
    assert abs(revs[1] - 3.2e-6) <= multi.grid.dt


def test_no_revivals_without_field():
    sc = small_scenario(timeline={"preset": "constant", "v_v": 0.0, "t_switch_s": 1e-8})
    assert detect_revivals(*run_scenario(sc)) == []


def test_no_revivals_for_constant_field():
    sc = small_scenario(timeline={"preset": "constant", "v_v": 95.0, "t_switch_s": 1e-8})
    assert detect_revivals(*run_scenario(sc)) == []


def test_revival_grid_refinement():
    tau = 1.03e-6
    errors = []
    for n in (241, 1281):
        sc = small_scenario(timeline={"preset": "invert_at", "v_v": 95.0, "t_on_s": 0.0,
                                      "tau_s": tau, "t_switch_s": 0.0},
                            grid={"t_start_s": 0.0, "t_end_s": 4e-6, "n_points": n})
        (t_rev,) = detect_revivals(*run_scenario(sc))
        errors.append(abs(t_rev / tau - 2))
    assert errors[1] < errors[0]
    assert errors[1] < 1e-3


def test_revival_threshold_range():
    g = TimeGrid(0.0, 1.0, 10)
    tr = Trace(g, np.ones(10, complex))
    for th in (0.0, 1.0):
        with pytest.raises(ValueError):
            detect_revivals(tr, tr, th)


def test_ratio_floor():
    g = TimeGrid(0.0, 1.0, 4)
    ref = Trace(g, np.array([1.0, 1e-10, 0.5, 0.0], complex))
    pert = Trace(g, np.array([0.5, 1e-10, 0.5, 0.0], complex))
    assert list(intensity_ratio(pert, ref)) == [0.25, 1.0, 1.0, 0.0]
    assert list(intensity_ratio(pert, ref, 1e-3)) == [0.25, 0.0, 1.0, 0.0]


def test_grids_must_match():
    a = Trace(TimeGrid(0.0, 1.0, 10), np.ones(10, complex))
    b = Trace(TimeGrid(0.0, 2.0, 10), np.ones(10, complex))
    with pytest.raises(ValueError, match="grid"):
        visibility(a, b, (0.0, 1.0))


# fits and other observables -----------------------------------------------

def test_linear_fit_exact():
    x = np.array([15.0, 31.0, 47.0, 63.0, 79.0, 95.0])
    fit = linear_fit(x, 3.7e4 * x - 1.2e5)
    assert fit.slope == pytest.approx(3.7e4, rel=1e-12)
    assert fit.intercept == pytest.approx(-1.2e5, rel=1e-12)
    assert fit.r2 == pytest.approx(1.0, abs=1e-12)


def test_revival_slope_exact_pairs():
    tau = [0.5e-6, 1e-6, 1.5e-6, 2e-6]
    fit = fit_revival_slope([(t, 2 * t) for t in tau])
    assert fit.slope == pytest.approx(2.0, abs=1e-12)
    assert fit.slope_err <= 1e-12
    with pytest.raises(ValueError):
        fit_revival_slope([(1e-6, 2e-6), (2e-6, 4e-6)])


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, st.integers(3, 20), elements=st.floats(-1e3, 1e3), unique=True),
       arrays(np.float64, 20, elements=st.floats(-1e3, 1e3)))
def test_r2_in_unit_interval(x, y):
    if np.ptp(x) < 1e-6:
        return
    fit = linear_fit(x, y[:x.size])
    assert 0.0 <= fit.r2 <= 1.0 + 1e-12


def test_freeze_rms():
    g = TimeGrid(0.0, 1.0, 11)
    ref = Trace(g, np.full(11, 2.0 + 0j))
    pert = Trace(g, np.full(11, 2.0 + 0j) * np.sqrt(1.01))
    assert freeze_rms(pert, ref, 0.5) == pytest.approx(0.01, rel=1e-12)
    assert freeze_rms(ref, ref, 0.0) == 0.0
    with pytest.raises(ValueError):
        freeze_rms(pert, ref, 2.0)


def test_secondary_maximum_of_sinc_squared():
    g = TimeGrid(0.0, 3e-6, 3001)
    s = secondary_maximum(Trace(g, np.sinc(1e6 * g.times) + 0j))
    assert s is not None
    t, h = s
    # first side lobe of sinc^2 sits near 1.43/B with height 0.0472
    assert t == pytest.approx(1.4303e-6, abs=2e-9)
    assert h == pytest.approx(0.04719, rel=1e-3)
    assert secondary_maximum(Trace(g, np.exp(-g.times / 1e-6) + 0j)) is None


def test_report_text_and_row():
    rep = AnalysisReport(fwhm_hz=1e6, revival_times=[2e-6], visibility=0.99)
    row = rep.as_row()
    assert row["t_revival_s"] == 2e-6 and row["n_revivals"] == 1
    assert "visibility" in rep.to_text()
