"""Piecewise-linear electrode voltage waveforms with finite switching ramps.

Times are absolute seconds on the clock where t = 0 is the end of the
optical excitation pulse. Every commanded voltage step is realised as a
linear ramp of duration ``t_switch``; with ``t_switch == 0`` the step is an
ideal jump, stored as two knots sharing one time (the right-hand value wins
when evaluating exactly at the jump).
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

DEFAULT_T_SWITCH_S = 10e-9
V_LIMIT = 100.0


class VoltageRangeWarning(UserWarning):
    pass


@dataclass(frozen=True, eq=False)
class VoltageTimeline:
    times: np.ndarray
    volts: np.ndarray
    t_switch: float = DEFAULT_T_SWITCH_S

    def __post_init__(self):
        t = np.array(self.times, dtype=float)
        v = np.array(self.volts, dtype=float)
        if t.ndim != 1 or t.shape != v.shape or t.size < 1:
            raise ValueError("times and volts must be equal-length 1-d sequences")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(v))):
            raise ValueError("knots must be finite")
        if self.t_switch < 0:
            raise ValueError("t_switch must be >= 0")
        dt = np.diff(t)
        if np.any(dt < 0):
            raise ValueError("knot times must be increasing")
        if np.any(dt == 0):
            if self.t_switch > 0:
                raise ValueError("coincident knot times require t_switch == 0")
            if np.any((dt[1:] == 0) & (dt[:-1] == 0)):
                raise ValueError("at most two knots may share a time")
        if np.any(np.abs(v) > V_LIMIT):
            warnings.warn(f"voltage exceeds the +/-{V_LIMIT:g} V switch range",
                          VoltageRangeWarning, stacklevel=3)
        t.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "volts", v)
        # running integral at each knot, measured from the first knot
        seg = 0.5 * dt * (v[1:] + v[:-1])
        cum = np.concatenate(([0.0], np.cumsum(seg)))
        cum.setflags(write=False)
        object.__setattr__(self, "_cum", cum)

    @classmethod
    def from_knots(cls, knots, t_switch=DEFAULT_T_SWITCH_S):
        knots = list(knots)
        return cls(np.array([k[0] for k in knots], dtype=float),
                   np.array([k[1] for k in knots], dtype=float), t_switch)

    @property
    def knots(self) -> list[tuple[float, float]]:
        return list(zip(self.times.tolist(), self.volts.tolist()))

    def negated(self) -> "VoltageTimeline":
        return VoltageTimeline(self.times, -self.volts, self.t_switch)

    def is_zero(self) -> bool:
        return not np.any(self.volts)

    def __eq__(self, other):
        if not isinstance(other, VoltageTimeline):
            return NotImplemented
        return (np.array_equal(self.times, other.times)
                and np.array_equal(self.volts, other.volts)
                and self.t_switch == other.t_switch)

    __hash__ = None


def voltage_at(tl: VoltageTimeline, t):
    """Applied voltage at time(s) t, held constant outside the knot range."""
    t_arr = np.asarray(t, dtype=float)
    tk, vk = tl.times, tl.volts
    i = np.searchsorted(tk, t_arr, side="right")
    lo = np.clip(i - 1, 0, tk.size - 1)
    hi = np.clip(i, 0, tk.size - 1)
    span = tk[hi] - tk[lo]
    with np.errstate(invalid="ignore", divide="ignore"):
        frac = np.where(span > 0, (t_arr - tk[lo]) / span, 0.0)
    out = vk[lo] + (vk[hi] - vk[lo]) * frac
    return float(out) if out.ndim == 0 else out


def _antiderivative(tl: VoltageTimeline, t):
    t_arr = np.asarray(t, dtype=float)
    tk, vk, cum = tl.times, tl.volts, tl._cum
    i = np.searchsorted(tk, t_arr, side="right")
    lo = np.clip(i - 1, 0, tk.size - 1)
    v_t = voltage_at(tl, t_arr)
    before = t_arr < tk[0]
    partial = 0.5 * (t_arr - tk[lo]) * (vk[lo] + v_t)
    return np.where(before, (t_arr - tk[0]) * vk[0], cum[lo] + partial)


def voltage_integral(tl: VoltageTimeline, t1, t2):
    """Exact integral of V(t) from t1 to t2 (V s)."""
    t1_arr, t2_arr = np.broadcast_arrays(np.asarray(t1, float), np.asarray(t2, float))
    if np.any(t1_arr > t2_arr):
        raise ValueError("voltage_integral requires t1 <= t2")
    out = _antiderivative(tl, t2_arr) - _antiderivative(tl, t1_arr)
    return float(out) if out.ndim == 0 else out


def rephasing_times(tl: VoltageTimeline, t_from=0.0, t_max=np.inf):
    """Times after t_from where the integral of V from t_from changes sign.

    Tangential zeros (stretches of zero field) are not reported.
    """
    tk, vk = tl.times, tl.volts
    pieces = []
    if t_from < tk[0]:
        pieces.append((t_from, tk[0], vk[0], vk[0]))
    for a, b, va, vb in zip(tk[:-1], tk[1:], vk[:-1], vk[1:]):
        if b <= t_from or b == a:
            continue
        if a < t_from:
            va = va + (vb - va) * (t_from - a) / (b - a)
            a = t_from
        pieces.append((a, b, va, vb))
    a_last = max(tk[-1], t_from)
    pieces.append((a_last, np.inf, vk[-1], vk[-1]))

    roots = []
    for a, b, va, vb in pieces:
        h = b - a
        slope = 0.0 if np.isinf(h) else (vb - va) / h
        fa = voltage_integral(tl, t_from, a)
        # fa + va*s + slope*s^2/2 on the piece
        coeffs = [0.5 * slope, va, fa] if slope != 0 else [va, fa]
        if not np.any(coeffs[:-1]):
            continue
        # roots sitting on a knot may round to just outside the piece
        tol = 1e-9 * h if np.isfinite(h) else 0.0
        for s in np.roots(coeffs):
            if s.imag != 0:
                continue
            s = min(max(s.real, 0.0), h) if -tol < s.real <= h + tol else s.real
            if not 0 <= s <= h or va + slope * s == 0:
                continue
            t = a + s
            if t > t_from and t <= t_max:
                roots.append(t)
    out = []
    for t in sorted(roots):
        if not out or t - out[-1] > 1e-9 * max(abs(t), 1e-12):
            out.append(t)
    return out


def _steps(t_on, levels, at, t_switch):
    """Knots for a waveform that is 0 before t_on, ramps to levels[0] starting
    at t_on, and switches to levels[k] with ramps centred on at[k-1]."""
    if t_switch < 0:
        raise ValueError("t_switch must be >= 0")
    gaps = np.diff(np.concatenate(([t_on + t_switch / 2.0], at)))
    if np.any(gaps < t_switch):
        raise ValueError("switching events closer than the ramp duration")
    knots = [(t_on, 0.0), (t_on + t_switch, levels[0])]
    h = t_switch / 2.0
    for t_c, v_prev, v_next in zip(at, levels[:-1], levels[1:]):
        knots += [(t_c - h, v_prev), (t_c + h, v_next)]
    return knots


def preset_constant(v, t_on=0.0, t_switch=DEFAULT_T_SWITCH_S):
    """Field switched on at t_on and held."""
    return VoltageTimeline.from_knots(_steps(t_on, [v], [], t_switch), t_switch)


def preset_multi_invert(v, t_on, tau, n_flips, t_switch=DEFAULT_T_SWITCH_S):
    """Polarity reversed at t_on + tau, 3 tau, 5 tau, ... (n_flips times)."""
    if n_flips < 0:
        raise ValueError("n_flips must be >= 0")
    if not tau > 0:
        raise ValueError("tau must be positive")
    levels = [v * (-1) ** k for k in range(n_flips + 1)]
    at = [t_on + (2 * k + 1) * tau for k in range(n_flips)]
    return VoltageTimeline.from_knots(_steps(t_on, levels, at, t_switch), t_switch)


def preset_invert_at(v, t_on, tau, t_switch=DEFAULT_T_SWITCH_S):
    """Polarity reversed at t_on + tau, then held."""
    return preset_multi_invert(v, t_on, tau, 1, t_switch)


def preset_invert_then_off(v, t_on, tau, t_switch=DEFAULT_T_SWITCH_S):
    """Polarity reversed at t_on + tau and switched off at t_on + 2 tau."""
    if not tau > 0:
        raise ValueError("tau must be positive")
    knots = _steps(t_on, [v, -v, 0.0], [t_on + tau, t_on + 2 * tau], t_switch)
    return VoltageTimeline.from_knots(knots, t_switch)


PRESETS = {
    "constant": preset_constant,
    "invert_at": preset_invert_at,
    "invert_then_off": preset_invert_then_off,
    "multi_invert": preset_multi_invert,
}
