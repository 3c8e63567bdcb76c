"""Scenario sweeps: simulate, analyse, and write artifacts."""
from __future__ import annotations

import multiprocessing
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import analysis as an
from . import io
from .dynamics import Trace, parameter_digest, prepare_ensemble, run_scenario
from .noise import Counts, add_shot_noise
from .scenario import ARTIFACTS, Scenario
from .sequence import rephasing_times

FREEZE_TOLERANCE = 0.01


@dataclass
class PointResult:
    value: object
    scenario: Scenario
    perturbed: Trace
    reference: Trace
    report: an.AnalysisReport
    spectrum: an.Spectrum
    reference_fwhm_hz: float
    counts: Optional[Counts] = None


@dataclass
class SweepResult:
    scenario: Scenario
    points: list
    fit: Optional[an.LinearFit] = None
    fit_kind: str = ""
    warnings: list = field(default_factory=list)

    def summary_header(self):
        name = self.scenario.sweep.parameter.split(".")[-1] if self.scenario.sweep else "point"
        return [name, "fwhm_hz", "fwhm_ref_hz", "t_revival_s", "n_revivals",
                "visibility", "freeze_rms", "sidelobe_ratio"]

    def summary_rows(self):
        rows = []
        for i, p in enumerate(self.points):
            r = p.report.as_row()
            rows.append([p.value if p.value is not None else i, r["fwhm_hz"],
                         p.reference_fwhm_hz, r["t_revival_s"], r["n_revivals"],
                         r["visibility"], r["freeze_rms"], r["sidelobe_ratio"]])
        return rows

    def report_text(self) -> str:
        sc = self.scenario
        out = [f"scenario   {sc.name}",
               f"digest     {parameter_digest(sc.to_dict())}",
               f"seed       {sc.ensemble.rng_seed}", ""]
        for p in self.points:
            label = ("single run" if p.value is None
                     else f"{sc.sweep.parameter} = {p.value!r}")
            out.append(f"[{label}]")
            out.append(p.report.to_text().rstrip())
            if np.isfinite(p.report.freeze_rms):
                ok = p.report.freeze_rms <= FREEZE_TOLERANCE
                out.append(f"match={'true' if ok else 'false'}")
            out.append("")
        if self.fit is not None:
            f = self.fit
            out.append(f"{self.fit_kind}: slope = {f.slope:.8g} +/- {f.slope_err:.3g}, "
                       f"intercept = {f.intercept:.6g}, r2 = {f.r2:.6f}")
        out += [f"warning: {w}" for w in self.warnings]
        return "\n".join(out).rstrip() + "\n"


def _timeline_origin(sc: Scenario, tl) -> float:
    if "t_on_s" in sc.timeline or "preset" in sc.timeline:
        return sc.timeline.get("t_on_s", 0.0)
    nz = np.flatnonzero(tl.volts)
    return float(tl.times[nz[0]]) if nz.size else 0.0


def analyse(sc: Scenario, perturbed: Trace, reference: Trace):
    """Single-point analysis: report, perturbed spectrum, reference FWHM."""
    rep = an.AnalysisReport()
    opts = sc.analysis
    spectra = {}
    for role, tr in (("perturbed", perturbed), ("reference", reference)):
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            spectra[role] = an.spectrum_of_decay(tr, opts.zero_pad, opts.fft_mode)
        rep.warnings += [f"{role}: {m}" for m in sorted({str(w.message) for w in caught})]
    spec, ref_spec = spectra["perturbed"], spectra["reference"]
    width = an.fwhm(spec)
    rep.fwhm_hz, rep.fwhm_multimodal = width.fwhm_hz, width.multimodal

    tl = sc.build_timeline()
    if not tl.is_zero():
        rep.revival_times = an.detect_revivals(perturbed, reference, opts.revival_threshold)
        window = opts.visibility_window
        if window is None:
            t0 = _timeline_origin(sc, tl)
            roots = rephasing_times(tl, 0.0, sc.grid.t_end)
            if roots:
                half = 0.25 * (roots[0] - t0)
                window = (roots[0] - half, roots[0] + half)
        if window is not None:
            try:
                rep.visibility, rep.visibility_time = an.visibility(
                    perturbed, reference, window, return_time=True)
            except ValueError as exc:
                rep.warnings.append(f"visibility: {exc}")

    t_from = opts.freeze_from
    if t_from is None and sc.timeline.get("preset") == "invert_then_off":
        tl_d = sc.timeline
        t_from = (tl_d.get("t_on_s", 0.0) + 2.0 * tl_d["tau_s"]
                  + 3.0 * tl_d.get("t_switch_s", tl.t_switch))
    if t_from is not None and t_from < sc.grid.t_end:
        rep.freeze_rms = an.freeze_rms(perturbed, reference, t_from)

    # a side lobe is only meaningful while the field never rephases the ensemble
    if not tl.is_zero() and not rephasing_times(tl, 0.0, sc.grid.t_end):
        side = an.secondary_maximum(perturbed)
        if side is not None:
            rep.sidelobe_ratio = side[1]
    return rep, spec, an.fwhm(ref_spec).fwhm_hz


def _run_point(args):
    value, sc, mode, atoms, reference = args
    perturbed, reference = run_scenario(sc, mode, atoms=atoms, reference=reference)
    rep, spec, ref_w = analyse(sc, perturbed, reference)
    counts = add_shot_noise(perturbed, sc.detection) if sc.detection else None
    return PointResult(value, sc, perturbed, reference, rep, spec, ref_w, counts)


def _shares_reference(sc: Scenario) -> bool:
    return sc.sweep is not None and sc.sweep.parameter.startswith("timeline.")


def run_sweep(sc: Scenario, mode: str = "deterministic", parallel: bool = False,
              workers: Optional[int] = None) -> SweepResult:
    points = sc.points()
    if _shares_reference(sc) and not parallel:
        # only the waveform changes: one ensemble and one reference serve all points
        atoms = prepare_ensemble(points[0][1])
        first = _run_point((points[0][0], points[0][1], mode, atoms, None))
        results = [first]
        for value, psc in points[1:]:
            results.append(_run_point((value, psc, mode, atoms, first.reference)))
    else:
        jobs = [(value, psc, mode, None, None) for value, psc in points]
        if parallel and len(jobs) > 1:
            # numba's worker pool does not survive fork()
            ctx = multiprocessing.get_context("spawn")
            with ProcessPoolExecutor(max_workers=workers, mp_context=ctx) as ex:
                results = list(ex.map(_run_point, jobs))
        else:
            results = [_run_point(j) for j in jobs]

    out = SweepResult(sc, results)
    if sc.sweep is not None and len(results) >= 3:
        if sc.sweep.parameter == "timeline.v_v":
            x = [abs(p.value) for p in results]
            y = [p.report.fwhm_hz for p in results]
            out.fit, out.fit_kind = an.linear_fit(x, y), "fwhm_vs_voltage"
        elif sc.sweep.parameter == "timeline.tau_s":
            pairs = [(p.value, p.report.revival_times[0]) for p in results
                     if p.report.revival_times]
            if len(pairs) >= 3:
                out.fit, out.fit_kind = an.fit_revival_slope(pairs), "revival_time_vs_tau"
            else:
                out.warnings.append("fewer than 3 revivals detected; no slope fit")
    return out


def write_outputs(result: SweepResult, out_dir, artifacts=ARTIFACTS):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    io.write_atomic(out_dir / "scenario.json", result.scenario.to_json() + "\n")
    for i, p in enumerate(result.points):
        pdir = out_dir / f"point_{i:03d}"
        if "traces" in artifacts:
            io.write_trace(pdir / "trace_perturbed.csv", p.perturbed)
            io.write_trace(pdir / "trace_reference.csv", p.reference)
        if "spectra" in artifacts:
            io.write_spectrum(pdir / "spectrum.csv", p.spectrum)
        if "counts" in artifacts and p.counts is not None:
            io.write_counts(pdir / "counts.csv", p.counts)
        if "report" in artifacts:
            row = p.report.as_row()
            io.write_table(pdir / "report.csv", list(row), [list(row.values())])
            io.write_atomic(pdir / "report.txt", p.report.to_text())
    if "summary" in artifacts:
        io.write_table(out_dir / "summary.csv", result.summary_header(),
                       result.summary_rows())
    if "report" in artifacts:
        io.write_atomic(out_dir / "report.txt", result.report_text())
