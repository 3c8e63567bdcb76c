"""Poisson photon counting on top of a noiseless intensity trace."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import Trace


@dataclass(frozen=True)
class DetectionParams:
    rng_seed: int
    mean_total_photons: float = 50.0
    bin_width: float = 20e-9

    def __post_init__(self):
        if self.mean_total_photons < 0:
            raise ValueError("mean_total_photons must be >= 0")
        if not self.bin_width > 0:
            raise ValueError("bin_width must be positive")


@dataclass(frozen=True, eq=False)
class Counts:
    t_centers: np.ndarray
    counts: np.ndarray
    expected: np.ndarray


def expected_counts(trace: Trace, params: DetectionParams):
    """Bin centres and mean counts per bin, scaled to mean_total_photons.

    Intensity is integrated exactly for its piecewise-linear interpolant;
    a trailing partial bin is dropped.
    """
    t = trace.times
    n_bins = int(np.floor((t[-1] - t[0]) / params.bin_width * (1 + 1e-12)))
    if n_bins < 1:
        raise ValueError("bin_width is longer than the trace")
    edges = t[0] + params.bin_width * np.arange(n_bins + 1)
    edges[-1] = min(edges[-1], t[-1])
    inten = trace.intensity
    cum = np.concatenate(([0.0], np.cumsum(0.5 * np.diff(t) * (inten[1:] + inten[:-1]))))
    i = np.clip(np.searchsorted(t, edges, side="right") - 1, 0, t.size - 1)
    at_edge = np.interp(edges, t, inten)
    per_bin = np.diff(cum[i] + 0.5 * (edges - t[i]) * (inten[i] + at_edge))
    centers = 0.5 * (edges[1:] + edges[:-1])
    if params.mean_total_photons == 0:
        return centers, np.zeros(n_bins)
    total = per_bin.sum()
    if not total > 0:
        raise ValueError("cannot normalize an all-zero intensity trace")
    return centers, per_bin * (params.mean_total_photons / total)


def add_shot_noise(trace: Trace, params: DetectionParams) -> Counts:
    """Poisson-sampled photon counts per time bin."""
    if np.any(trace.intensity < 0):
        raise ValueError("intensity must be non-negative")
    centers, lam = expected_counts(trace, params)
    rng = np.random.default_rng(params.rng_seed)
    return Counts(centers, rng.poisson(lam).astype(np.int64), lam)
