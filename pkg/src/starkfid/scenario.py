"""Declarative JSON scenario files.

All quantities are SI and field names carry their unit. Unknown fields are
rejected, seeds are mandatory, and a scenario written back with
``to_dict`` reloads to an identical object.
"""
from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any, Optional

import jsonschema

from .dynamics import DecoherenceParams, TimeGrid
from .ensemble import (DEFAULT_L_CRYSTAL_M, DEFAULT_SAMPLE_WINDOW_HZ, DEFAULT_TAU_P_S,
                       LINE_SHAPES, EnsembleParams, OpticalPulse)
from .noise import DetectionParams
from .sequence import DEFAULT_T_SWITCH_S, PRESETS, VoltageTimeline
from .stark import DEFAULT_GRADIENT_NORM, DEFAULT_STARK_COEFF, StarkGeometry

SCHEMA_ID = "starkfid/scenario-1"
ARTIFACTS = ("traces", "spectra", "report", "counts", "summary")

_num = {"type": "number"}
_pos = {"type": "number", "exclusiveMinimum": 0}
_nonneg = {"type": "number", "minimum": 0}
_seed = {"type": "integer", "minimum": 0, "maximum": 2 ** 64 - 1}


def _obj(props, required=()):
    return {"type": "object", "properties": props, "required": list(required),
            "additionalProperties": False}


SCHEMA = _obj({
    "schema": {"const": SCHEMA_ID},
    "name": {"type": "string", "minLength": 1},
    "description": {"type": "string"},
    "ensemble": _obj({
        "n_atoms": {"type": "integer", "minimum": 1},
        "line_shape": {"enum": list(LINE_SHAPES)},
        "gamma_inh_hz": _pos,
        "sample_window_hz": _pos,
        "l_crystal_m": _pos,
        "class_pairing": {"type": "boolean"},
        "rng_seed": _seed,
    }, required=("n_atoms", "line_shape", "gamma_inh_hz", "rng_seed")),
    "pulse": _obj({
        "tau_p_s": _pos,
        "rabi_rad_s": _num,
        "carrier_detuning_rad_s": _num,
        "t0_s": _num,
    }, required=("rabi_rad_s",)),
    "geometry": _obj({
        "stark_coeff_rad_s_per_v_m": _num,
        "gradient_norm_per_m2": _num,
        "l_crystal_m": _pos,
        "lorentz_eps": {"type": ["number", "null"]},
    }),
    "timeline": _obj({
        "preset": {"enum": list(PRESETS)},
        "v_v": _num,
        "t_on_s": _nonneg,
        "tau_s": _pos,
        "n_flips": {"type": "integer", "minimum": 0},
        "knots": {"type": "array", "minItems": 1,
                  "items": {"type": "array", "prefixItems": [_num, _num],
                            "minItems": 2, "maxItems": 2}},
        "t_switch_s": _nonneg,
    }),
    "grid": _obj({
        "t_start_s": _nonneg,
        "t_end_s": _pos,
        "n_points": {"type": "integer", "minimum": 2},
    }, required=("t_end_s", "n_points")),
    "decoherence": _obj({
        "t2_s": {"oneOf": [_pos, {"type": "null"}]},
        "beer_lambert": {"type": "boolean"},
        "alpha_l": _nonneg,
    }),
    "detection": _obj({
        "mean_total_photons": _nonneg,
        "bin_width_s": _pos,
        "rng_seed": _seed,
    }, required=("rng_seed",)),
    "sweep": _obj({
        "parameter": {"type": "string", "pattern": r"^[a-z_]+\.[a-z0-9_]+$"},
        "values": {"type": "array", "minItems": 1},
    }, required=("parameter", "values")),
    "analysis": _obj({
        "revival_threshold": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "zero_pad": {"type": "integer", "minimum": 1},
        "fft_mode": {"enum": ["field", "intensity"]},
        "visibility_window_s": {"oneOf": [{"type": "null"}, {
            "type": "array", "prefixItems": [_nonneg, _nonneg],
            "minItems": 2, "maxItems": 2}]},
        "freeze_from_s": {"oneOf": [_nonneg, {"type": "null"}]},
    }),
    "outputs": _obj({
        "dir": {"type": "string"},
        "artifacts": {"type": "array", "items": {"enum": list(ARTIFACTS)}, "uniqueItems": True},
    }),
}, required=("schema", "name", "ensemble", "pulse", "timeline", "grid"))

_PRESET_ARGS = {
    "constant": ("v_v",),
    "invert_at": ("v_v", "tau_s"),
    "invert_then_off": ("v_v", "tau_s"),
    "multi_invert": ("v_v", "tau_s", "n_flips"),
}


class ScenarioError(ValueError):
    """Validation failure; ``errors`` holds 'path: message' strings."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("invalid scenario:\n  " + "\n  ".join(self.errors))


@dataclass(frozen=True)
class AnalysisOptions:
    revival_threshold: float = 0.2
    zero_pad: int = 8
    fft_mode: str = "field"
    visibility_window: Optional[tuple] = None
    freeze_from: Optional[float] = None


@dataclass(frozen=True)
class Sweep:
    parameter: str
    values: tuple


@dataclass(frozen=True)
class Scenario:
    name: str
    ensemble: EnsembleParams
    pulse: OpticalPulse
    geometry: StarkGeometry
    timeline: dict
    grid: TimeGrid
    decoherence: DecoherenceParams = DecoherenceParams()
    detection: Optional[DetectionParams] = None
    sweep: Optional[Sweep] = None
    analysis: AnalysisOptions = AnalysisOptions()
    outputs: Optional[dict] = None
    description: str = ""

    def build_timeline(self) -> VoltageTimeline:
        tl = self.timeline
        t_switch = tl.get("t_switch_s", DEFAULT_T_SWITCH_S)
        if "knots" in tl:
            return VoltageTimeline.from_knots(tl["knots"], t_switch)
        t_on = tl.get("t_on_s", 0.0)
        if tl["preset"] == "constant":
            return PRESETS["constant"](tl["v_v"], t_on, t_switch)
        if tl["preset"] == "multi_invert":
            return PRESETS["multi_invert"](tl["v_v"], t_on, tl["tau_s"], tl["n_flips"],
                                           t_switch)
        return PRESETS[tl["preset"]](tl["v_v"], t_on, tl["tau_s"], t_switch)

    def to_dict(self) -> dict:
        e, p, g, d = self.ensemble, self.pulse, self.geometry, self.decoherence
        out: dict[str, Any] = {
            "schema": SCHEMA_ID,
            "name": self.name,
            "description": self.description,
            "ensemble": {"n_atoms": e.n_atoms, "line_shape": e.line_shape,
                         "gamma_inh_hz": e.gamma_inh, "sample_window_hz": e.sample_window,
                         "l_crystal_m": e.l_crystal, "class_pairing": e.class_pairing,
                         "rng_seed": e.rng_seed},
            "pulse": {"tau_p_s": p.tau_p, "rabi_rad_s": p.rabi,
                      "carrier_detuning_rad_s": p.carrier_detuning},
            "geometry": {"stark_coeff_rad_s_per_v_m": g.stark_coeff,
                         "gradient_norm_per_m2": g.gradient_norm,
                         "l_crystal_m": g.l_crystal, "lorentz_eps": g.lorentz_eps},
            "timeline": copy.deepcopy(self.timeline),
            "grid": {"t_start_s": self.grid.t_start, "t_end_s": self.grid.t_end,
                     "n_points": self.grid.n_points},
            "decoherence": {"t2_s": None if math.isinf(d.t2) else d.t2,
                            "beer_lambert": d.beer_lambert, "alpha_l": d.alpha_l},
            "analysis": {"revival_threshold": self.analysis.revival_threshold,
                         "zero_pad": self.analysis.zero_pad,
                         "fft_mode": self.analysis.fft_mode,
                         "visibility_window_s": (list(self.analysis.visibility_window)
                                                 if self.analysis.visibility_window
                                                 else None),
                         "freeze_from_s": self.analysis.freeze_from},
        }
        if p.t0 != -p.tau_p:
            out["pulse"]["t0_s"] = p.t0
        if self.detection is not None:
            out["detection"] = {"mean_total_photons": self.detection.mean_total_photons,
                                "bin_width_s": self.detection.bin_width,
                                "rng_seed": self.detection.rng_seed}
        if self.sweep is not None:
            out["sweep"] = {"parameter": self.sweep.parameter,
                            "values": list(self.sweep.values)}
        if self.outputs is not None:
            out["outputs"] = copy.deepcopy(self.outputs)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def with_value(self, parameter: str, value, keep_sweep: bool = False) -> "Scenario":
        """Copy with one 'section.field' entry replaced (and revalidated).

        The sweep is dropped unless ``keep_sweep`` is set.
        """
        d = self.to_dict()
        section, key = parameter.split(".", 1)
        d.setdefault(section, {})[key] = value
        if not keep_sweep:
            d.pop("sweep", None)
        return from_dict(d)

    def points(self):
        """(value, scenario) for each sweep value, or (None, self) without a sweep."""
        if self.sweep is None:
            return [(None, self)]
        return [(v, self.with_value(self.sweep.parameter, v)) for v in self.sweep.values]


def _path(err) -> str:
    return "/".join(str(p) for p in err.absolute_path) or "<root>"


def _semantic_errors(d) -> list[str]:
    errs = []
    tl = d["timeline"]
    has_preset, has_knots = "preset" in tl, "knots" in tl
    if has_preset == has_knots:
        errs.append("timeline: give exactly one of 'preset' or 'knots'")
    elif has_preset:
        for key in _PRESET_ARGS[tl["preset"]]:
            if key not in tl:
                errs.append(f"timeline/{key}: required by preset {tl['preset']!r}")
        allowed = set(_PRESET_ARGS[tl["preset"]]) | {"preset", "t_on_s", "t_switch_s"}
        for key in sorted(set(tl) - allowed):
            errs.append(f"timeline/{key}: not used by preset {tl['preset']!r}")
    else:
        for key in sorted(set(tl) - {"knots", "t_switch_s"}):
            errs.append(f"timeline/{key}: not allowed with explicit knots")

    l_e = d["ensemble"].get("l_crystal_m", DEFAULT_L_CRYSTAL_M)
    l_g = d.get("geometry", {}).get("l_crystal_m", l_e)
    if l_g != l_e:
        errs.append("geometry/l_crystal_m: must equal ensemble/l_crystal_m")

    sw = d.get("sweep")
    if sw is not None:
        section, key = sw["parameter"].split(".", 1)
        props = SCHEMA["properties"].get(section, {}).get("properties", {})
        if key not in props or section in ("sweep", "outputs"):
            errs.append(f"sweep/parameter: unknown parameter {sw['parameter']!r}")
    return errs


def from_dict(d: dict) -> Scenario:
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errs = [f"{_path(e)}: {e.message}"
            for e in sorted(validator.iter_errors(d), key=lambda e: list(e.absolute_path))]
    if errs:
        raise ScenarioError(errs)
    errs = _semantic_errors(d)
    if errs:
        raise ScenarioError(errs)

    try:
        e = d["ensemble"]
        ens = EnsembleParams(
            rng_seed=e["rng_seed"], n_atoms=e["n_atoms"], line_shape=e["line_shape"],
            gamma_inh=e["gamma_inh_hz"],
            sample_window=e.get("sample_window_hz", DEFAULT_SAMPLE_WINDOW_HZ),
            l_crystal=e.get("l_crystal_m", DEFAULT_L_CRYSTAL_M),
            class_pairing=e.get("class_pairing", True))
        p = d["pulse"]
        pulse = OpticalPulse(rabi=p["rabi_rad_s"], tau_p=p.get("tau_p_s", DEFAULT_TAU_P_S),
                             carrier_detuning=p.get("carrier_detuning_rad_s", 0.0),
                             t0=p.get("t0_s"))
        g = d.get("geometry", {})
        geom = StarkGeometry(
            stark_coeff=g.get("stark_coeff_rad_s_per_v_m", DEFAULT_STARK_COEFF),
            gradient_norm=g.get("gradient_norm_per_m2", DEFAULT_GRADIENT_NORM),
            l_crystal=g.get("l_crystal_m", ens.l_crystal),
            lorentz_eps=g.get("lorentz_eps"))
        gr = d["grid"]
        grid = TimeGrid(gr.get("t_start_s", 0.0), gr["t_end_s"], gr["n_points"])
        dc = d.get("decoherence", {})
        t2 = dc.get("t2_s")
        dec = DecoherenceParams(math.inf if t2 is None else t2,
                                dc.get("beer_lambert", False), dc.get("alpha_l", 2.0))
        det = None
        if "detection" in d:
            x = d["detection"]
            det = DetectionParams(rng_seed=x["rng_seed"],
                                  mean_total_photons=x.get("mean_total_photons", 50.0),
                                  bin_width=x.get("bin_width_s", 20e-9))
        sweep = None
        if "sweep" in d:
            sweep = Sweep(d["sweep"]["parameter"], tuple(d["sweep"]["values"]))
        a = d.get("analysis", {})
        win = a.get("visibility_window_s")
        analysis = AnalysisOptions(a.get("revival_threshold", 0.2), a.get("zero_pad", 8),
                                   a.get("fft_mode", "field"),
                                   tuple(win) if win else None, a.get("freeze_from_s"))
        sc = Scenario(d["name"], ens, pulse, geom, copy.deepcopy(d["timeline"]), grid, dec,
                      det, sweep, analysis, copy.deepcopy(d.get("outputs")),
                      d.get("description", ""))
        sc.build_timeline()
    except ValueError as exc:
        raise ScenarioError([str(exc)]) from exc

    if sweep is not None:
        # every sweep point must itself be a valid scenario
        for v in sweep.values:
            sc.with_value(sweep.parameter, v)
    return sc


def load(path) -> Scenario:
    path = Path(path)
    try:
        d = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ScenarioError([f"<file>: not valid JSON ({exc})"]) from exc
    return from_dict(d)


def bundled_names() -> list[str]:
    root = resources.files("starkfid") / "scenarios"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def bundled_path(name: str):
    return resources.files("starkfid") / "scenarios" / f"{name}.json"


def load_bundled(name: str) -> Scenario:
    if name not in bundled_names():
        raise KeyError(f"no bundled scenario named {name!r}")
    return from_dict(json.loads(bundled_path(name).read_text()))
