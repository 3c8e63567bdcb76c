"""Inhomogeneously broadened two-level ensemble and its optical excitation.

Detunings are angular frequencies (rad/s) measured from the line centre;
widths in the parameter objects are ordinary frequencies (Hz).
The ensemble is stored as parallel numpy arrays; ``Ensemble[i]`` gives an
``Atom`` view when a single emitter is needed.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from scipy.special import ndtri, ndtr

TWO_PI = 2.0 * np.pi

LINE_SHAPES = ("lorentzian", "gaussian", "uniform")

# Placeholder only; the true inhomogeneous width of the crystal is not known here.
DEFAULT_GAMMA_INH_HZ = 500e3
DEFAULT_TAU_P_S = 3e-6
# 10x the bandwidth 1/tau_p of the default excitation pulse.
DEFAULT_SAMPLE_WINDOW_HZ = 10.0 / DEFAULT_TAU_P_S
DEFAULT_L_CRYSTAL_M = 6e-3


@dataclass(frozen=True)
class Atom:
    delta_nat: float
    z: float
    dipole_class: int
    weight: complex = 0j

    def __post_init__(self):
        if self.dipole_class not in (-1, 1):
            raise ValueError("dipole_class must be +1 or -1")
        if abs(self.weight) > 0.5 + 1e-12:
            raise ValueError("coherence magnitude cannot exceed 1/2")


@dataclass(frozen=True)
class EnsembleParams:
    rng_seed: int
    n_atoms: int = 100_000
    line_shape: str = "lorentzian"
    gamma_inh: float = DEFAULT_GAMMA_INH_HZ
    sample_window: float = DEFAULT_SAMPLE_WINDOW_HZ
    l_crystal: float = DEFAULT_L_CRYSTAL_M
    class_pairing: bool = True

    def __post_init__(self):
        if int(self.n_atoms) != self.n_atoms or self.n_atoms < 1:
            raise ValueError("n_atoms must be a positive integer")
        if self.line_shape not in LINE_SHAPES:
            raise ValueError(f"unknown line_shape {self.line_shape!r}")
        if not self.gamma_inh > 0:
            raise ValueError("gamma_inh must be positive")
        if not self.sample_window >= self.gamma_inh:
            raise ValueError("sample_window must be >= gamma_inh")
        if not self.l_crystal > 0:
            raise ValueError("l_crystal must be positive")
        if self.class_pairing and self.n_atoms % 2:
            raise ValueError("pairing requires even count")


@dataclass(frozen=True)
class OpticalPulse:
    """Rectangular excitation pulse.

    ``t0`` defaults to ``-tau_p`` so that the pulse ends at t = 0, the origin
    of every emission trace.
    """

    rabi: float
    tau_p: float = DEFAULT_TAU_P_S
    carrier_detuning: float = 0.0
    t0: Optional[float] = None

    def __post_init__(self):
        if not self.tau_p > 0:
            raise ValueError("tau_p must be positive")
        if self.t0 is None:
            object.__setattr__(self, "t0", -self.tau_p)
        if self.t_end > 1e-15 * self.tau_p:
            raise ValueError("the pulse must end at or before t = 0")

    @property
    def t_end(self) -> float:
        return self.t0 + self.tau_p

    @property
    def area(self) -> float:
        return self.rabi * self.tau_p


@dataclass(frozen=True, eq=False)
class Ensemble:
    delta_nat: np.ndarray
    z: np.ndarray
    dipole_class: np.ndarray
    weight: np.ndarray
    l_crystal: float = DEFAULT_L_CRYSTAL_M
    paired: bool = False
    excited: bool = field(default=False)

    def __post_init__(self):
        n = len(self.delta_nat)
        for name in ("z", "dipole_class", "weight"):
            if len(getattr(self, name)) != n:
                raise ValueError(f"{name} length does not match delta_nat")
        if np.any(np.abs(self.dipole_class) != 1):
            raise ValueError("dipole_class entries must be +1 or -1")
        if np.any(self.z < 0) or np.any(self.z > self.l_crystal):
            raise ValueError("atom positions must lie inside the crystal")
        if self.paired and n % 2:
            raise ValueError("pairing requires even count")
        for arr in (self.delta_nat, self.z, self.dipole_class, self.weight):
            arr.setflags(write=False)

    def __len__(self):
        return len(self.delta_nat)

    def __getitem__(self, i) -> Atom:
        return Atom(float(self.delta_nat[i]), float(self.z[i]),
                    int(self.dipole_class[i]), complex(self.weight[i]))

    def atoms(self) -> list[Atom]:
        return [self[i] for i in range(len(self))]

    @classmethod
    def from_atoms(cls, atoms, l_crystal=DEFAULT_L_CRYSTAL_M, paired=False):
        atoms = list(atoms)
        w = np.array([a.weight for a in atoms], dtype=complex)
        return cls(np.array([a.delta_nat for a in atoms], dtype=float),
                   np.array([a.z for a in atoms], dtype=float),
                   np.array([a.dipole_class for a in atoms], dtype=np.int8),
                   w, l_crystal=l_crystal, paired=paired,
                   excited=bool(np.any(w != 0)))

    def equals(self, other: "Ensemble") -> bool:
        """Bit-wise equality of all per-atom arrays."""
        return (len(self) == len(other)
                and all(np.array_equal(getattr(self, k), getattr(other, k))
                        for k in ("delta_nat", "z", "dipole_class", "weight")))


def _truncated_quantiles(u, shape, fwhm, window):
    """Map uniforms in (0, 1) to detunings (Hz) of the truncated line shape."""
    if shape == "lorentzian":
        hwhm = fwhm / 2.0
        edge = np.arctan(window / hwhm)
        return hwhm * np.tan(edge * (2.0 * u - 1.0))
    if shape == "gaussian":
        sigma = fwhm / (2.0 * np.sqrt(2.0 * np.log(2.0)))
        lo = ndtr(-window / sigma)
        return sigma * ndtri(lo + u * (1.0 - 2.0 * lo))
    return 0.5 * fwhm * (2.0 * u - 1.0)


def sample_ensemble(params: EnsembleParams) -> Ensemble:
    """Draw detunings, positions and dipole classes, deterministically from the seed."""
    rng = np.random.default_rng(params.rng_seed)
    n = params.n_atoms
    n_draw = n // 2 if params.class_pairing else n

    f = _truncated_quantiles(rng.random(n_draw), params.line_shape,
                             params.gamma_inh, params.sample_window)
    delta = TWO_PI * f
    z = rng.random(n_draw) * params.l_crystal

    if params.class_pairing:
        delta = np.repeat(delta, 2)
        z = np.repeat(z, 2)
        classes = np.tile(np.array([1, -1], dtype=np.int8), n_draw)
    else:
        classes = np.where(rng.random(n) < 0.5, 1, -1).astype(np.int8)

    return Ensemble(delta, z, classes, np.zeros(n, dtype=complex),
                    l_crystal=params.l_crystal, paired=params.class_pairing)


def rect_pulse_coherence(detuning, rabi, tau_p):
    """Coherence rho_eg after a square pulse acting on the ground state.

    Closed-form solution of the driven two-level system in the frame of the
    laser carrier, H = [[0, rabi/2], [rabi/2, detuning]]. Free precession of
    the returned coherence goes as exp(-i * detuning * t).
    """
    detuning = np.asarray(detuning, dtype=float)
    rabi_g = np.hypot(rabi, detuning)
    half = 0.5 * rabi_g * tau_p
    s, c = np.sin(half), np.cos(half)
    with np.errstate(invalid="ignore", divide="ignore"):
        a = np.where(rabi_g > 0, rabi / rabi_g, 0.0)
        d = np.where(rabi_g > 0, detuning / rabi_g, 0.0)
    return -1j * a * s * c - a * d * s * s


def excite(ensemble: Ensemble, pulse: OpticalPulse) -> Ensemble:
    """Return a copy of the ensemble carrying the post-pulse coherences at t = 0."""
    if ensemble.excited or np.any(ensemble.weight != 0):
        raise ValueError("ensemble is already excited; one pulse per trace")
    detuning = ensemble.delta_nat - pulse.carrier_detuning
    w = rect_pulse_coherence(detuning, pulse.rabi, pulse.tau_p)
    if pulse.t_end < 0:
        # free precession between the end of the pulse and t = 0
        w = w * np.exp(1j * detuning * pulse.t_end)
    return replace(ensemble, weight=np.asarray(w, dtype=complex), excited=True)
