"""Observables extracted from emission traces.

Spectra use the convention S(f) = |int A(t) exp(+2 pi i f t) dt|^2, so an
atom detuned by +f from the line centre shows up at +f (the field carries
exp(-i delta t)).
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy import stats

from .dynamics import Trace

REFERENCE_FLOOR = 1e-30


class ShortTraceWarning(UserWarning):
    pass


@dataclass(frozen=True, eq=False)
class Spectrum:
    freqs_hz: np.ndarray
    density: np.ndarray
    df: float
    mode: str = "field"
    short_trace: bool = False


class Width(NamedTuple):
    fwhm_hz: float
    f_low: float
    f_high: float
    multimodal: bool


class LinearFit(NamedTuple):
    slope: float
    slope_err: float
    intercept: float
    r2: float


@dataclass
class AnalysisReport:
    fwhm_hz: float = float("nan")
    fwhm_multimodal: bool = False
    revival_times: list = field(default_factory=list)
    visibility: float = float("nan")
    visibility_time: float = float("nan")
    freeze_rms: float = float("nan")
    sidelobe_ratio: float = float("nan")
    fit_slope: float = float("nan")
    fit_slope_err: float = float("nan")
    fit_r2: float = float("nan")
    warnings: list = field(default_factory=list)

    def as_row(self) -> dict:
        return {
            "fwhm_hz": self.fwhm_hz,
            "t_revival_s": self.revival_times[0] if self.revival_times else float("nan"),
            "n_revivals": len(self.revival_times),
            "visibility": self.visibility,
            "freeze_rms": self.freeze_rms,
            "sidelobe_ratio": self.sidelobe_ratio,
        }

    def to_text(self) -> str:
        lines = [f"fwhm_hz            {self.fwhm_hz:.6g}"
                 + ("  (multimodal)" if self.fwhm_multimodal else ""),
                 "revival_times_s    " + (", ".join(f"{t:.6g}" for t in self.revival_times)
                                          or "none"),
                 f"visibility         {self.visibility:.6g}",
                 f"freeze_rms         {self.freeze_rms:.6g}",
                 f"sidelobe_ratio     {self.sidelobe_ratio:.6g}"]
        if np.isfinite(self.fit_slope):
            lines.append(f"fit_slope          {self.fit_slope:.6g} +/- {self.fit_slope_err:.2g}"
                         f"  (r2 = {self.fit_r2:.6f})")
        lines += [f"warning: {w}" for w in self.warnings]
        return "\n".join(lines) + "\n"


def spectrum_of_decay(trace: Trace, zero_pad: int = 8, mode: str = "field",
                      decay_floor: float = 0.01) -> Spectrum:
    """Power spectrum of the field (default) or of the intensity trace.

    The trace is zero-padded to ``zero_pad`` times its length and no window
    is applied. Sum(density) * df equals sum(|x|^2) * dt exactly, x being the
    transformed signal.
    """
    if zero_pad < 1:
        raise ValueError("zero_pad must be >= 1")
    if mode == "field":
        x = trace.amplitude
    elif mode == "intensity":
        x = trace.intensity.astype(complex)
    else:
        raise ValueError("mode must be 'field' or 'intensity'")

    inten = trace.intensity
    short = bool(inten[-1] > decay_floor * inten[0])
    if short:
        warnings.warn("trace ends before the decay falls below 1% of I(0)",
                      ShortTraceWarning, stacklevel=2)

    dt = trace.grid.dt
    m = zero_pad * x.size
    xf = dt * m * np.fft.ifft(x, n=m)
    freqs = np.fft.fftfreq(m, dt)
    # time origin at t_start adds only a phase
    density = np.fft.fftshift(np.abs(xf) ** 2)
    return Spectrum(np.fft.fftshift(freqs), density, 1.0 / (m * dt), mode, short)


def fwhm(spec: Spectrum) -> Width:
    """Width between the outermost half-maximum crossings, linearly interpolated."""
    f, d = spec.freqs_hz, spec.density
    peak = int(np.argmax(d))
    half = 0.5 * d[peak]
    above = d >= half
    idx = np.flatnonzero(above)
    lo, hi = idx[0], idx[-1]

    def cross(i, j):
        # half level lies between samples i and j
        if d[j] == d[i]:
            return f[i]
        return f[i] + (half - d[i]) * (f[j] - f[i]) / (d[j] - d[i])

    f_lo = cross(lo - 1, lo) if lo > 0 else f[lo]
    f_hi = cross(hi, hi + 1) if hi < f.size - 1 else f[hi]
    n_cross = int(np.count_nonzero(np.diff(above.astype(np.int8))))
    return Width(float(f_hi - f_lo), float(f_lo), float(f_hi), n_cross > 2)


def _same_grid(a: Trace, b: Trace):
    if a.grid != b.grid:
        raise ValueError("traces must share one time grid")


def visibility(perturbed: Trace, reference: Trace, search_window, return_time=False):
    """Revival intensity over the unperturbed intensity at the same time.

    The revival time is the intensity maximum of the perturbed trace inside
    ``search_window`` = (t_lo, t_hi).
    """
    _same_grid(perturbed, reference)
    t = perturbed.times
    sel = np.flatnonzero((t >= search_window[0]) & (t <= search_window[1]))
    if sel.size == 0:
        raise ValueError("search window contains no grid points")
    k = sel[np.argmax(perturbed.intensity[sel])]
    i_ref = reference.intensity[k]
    if not i_ref > REFERENCE_FLOOR * np.max(reference.intensity):
        raise ValueError("reference too small for ratio")
    v = float(perturbed.intensity[k] / i_ref)
    return (v, float(t[k])) if return_time else v


def intensity_ratio(perturbed: Trace, reference: Trace,
                    floor: float = REFERENCE_FLOOR) -> np.ndarray:
    """I_pert / I_ref, set to 0 where the reference is below floor * max(I_ref)."""
    _same_grid(perturbed, reference)
    ref = reference.intensity
    ok = ref > floor * np.max(ref)
    out = np.zeros_like(ref)
    out[ok] = perturbed.intensity[ok] / ref[ok]
    return out


def _parabolic_peak(y, k):
    y0, y1, y2 = y[k - 1], y[k], y[k + 1]
    den = y0 - 2.0 * y1 + y2
    return 0.0 if den == 0 else 0.5 * (y0 - y2) / den


def detect_revivals(perturbed: Trace, reference: Trace, threshold: float = 0.2,
                    ref_floor: float = 1e-3):
    """Times of the revival maxima of I_pert / I_ref.

    A revival is the largest ratio above ``threshold`` between two collapses
    below ``threshold / 4``; the emission at t = 0 is not a revival. Peak
    positions are refined with a three-point parabola. Where the reference
    has itself decayed below ``ref_floor`` of its peak the ratio is sampling
    noise, and those points count as collapsed.
    """
    if not 0 < threshold < 1:
        raise ValueError("threshold must be in (0, 1)")
    r = intensity_ratio(perturbed, reference, ref_floor)
    t = perturbed.times
    dt = perturbed.grid.dt
    low = r < threshold / 4.0
    out = []
    k = 0
    n = r.size
    while k < n:
        # wait for a collapse, then scan until the next one
        while k < n and not low[k]:
            k += 1
        while k < n and low[k]:
            k += 1
        if k >= n:
            break
        start = k
        while k < n and not low[k]:
            k += 1
        seg = slice(start, k)
        j = start + int(np.argmax(r[seg]))
        if r[j] > threshold and 0 < j < n - 1:
            out.append(float(t[j] + _parabolic_peak(r, j) * dt))
    return out


def linear_fit(x, y) -> LinearFit:
    """Ordinary least squares with intercept."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 3:
        raise ValueError("need at least 3 points for a fit")
    res = stats.linregress(x, y)
    return LinearFit(float(res.slope), float(res.stderr), float(res.intercept),
                     float(res.rvalue ** 2))


def fit_revival_slope(pairs) -> LinearFit:
    """Slope of revival time against the first Stark pulse duration tau."""
    pairs = list(pairs)
    if len(pairs) < 3:
        raise ValueError("need at least 3 (tau, t_revival) pairs")
    tau, t_rev = zip(*pairs)
    return linear_fit(tau, t_rev)


def freeze_rms(perturbed: Trace, reference: Trace, t_from: float) -> float:
    """RMS of (I_pert - I_ref) / I_ref over t >= t_from."""
    _same_grid(perturbed, reference)
    sel = perturbed.times >= t_from
    ref = reference.intensity[sel]
    if ref.size == 0:
        raise ValueError("no grid points after t_from")
    rel = (perturbed.intensity[sel] - ref) / ref
    return float(np.sqrt(np.mean(rel ** 2)))


def secondary_maximum(trace: Trace):
    """(time, I/I(0)) of the first local maximum after the first minimum of I."""
    inten = trace.intensity
    d = np.diff(inten)
    mins = np.flatnonzero((d[:-1] < 0) & (d[1:] >= 0)) + 1
    if mins.size == 0:
        return None
    after = mins[0]
    maxs = np.flatnonzero((d[after - 1:-1] > 0) & (d[after:] <= 0)) + after
    if maxs.size == 0:
        return None
    k = int(maxs[0])
    return float(trace.times[k]), float(inten[k] / inten[0])
