"""Stark-controlled free-induction decay of an inhomogeneously broadened ensemble."""
from .analysis import (AnalysisReport, Spectrum, detect_revivals, fit_revival_slope,
                       freeze_rms, fwhm, linear_fit, secondary_maximum,
                       spectrum_of_decay, visibility)
from .dynamics import (DecoherenceParams, TimeGrid, Trace, collective_amplitude,
                       fid_trace, run_scenario, stark_phase)
from .ensemble import (Atom, Ensemble, EnsembleParams, OpticalPulse, excite,
                       rect_pulse_coherence, sample_ensemble)
from .noise import DetectionParams, add_shot_noise
from .scenario import Scenario, ScenarioError, load, load_bundled
from .sequence import (VoltageTimeline, preset_constant, preset_invert_at,
                       preset_invert_then_off, preset_multi_invert, voltage_at,
                       voltage_integral)
from .stark import StarkGeometry, field_at, stark_detuning

__version__ = "0.1.0"
