"""
Stark broadening of the free-induction decay
============================================

A constant field switched on right after the pulse spreads the ensemble
over a band proportional to the voltage. The decay speeds up and its
spectrum widens linearly. With a uniform natural line the spectrum turns
square and the decay picks up a sinc side lobe.
"""
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from starkfid import analysis as an
from starkfid.pipeline import run_sweep
from starkfid.scenario import load_bundled

out = Path(__file__).with_name("out")
out.mkdir(exist_ok=True)

# the bundled voltage sweep, with fewer atoms so the demo runs quickly
sc = load_bundled("fig2_decay").with_value("ensemble.n_atoms", 20_000, keep_sweep=True)
res = run_sweep(sc)

fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
t_us = res.points[0].reference.times * 1e6
ref = res.points[0].reference
ax1.plot(t_us, ref.intensity / ref.intensity[0], "k", label="0 V")
for p in res.points:
    ax1.plot(t_us, p.perturbed.intensity / p.perturbed.intensity[0], label=f"{p.value:g} V")
ax1.set(xlabel="t (us)", ylabel="I / I(0)", yscale="log", ylim=(1e-4, 1.1))
ax1.legend(fontsize=7)

volts = np.array([p.value for p in res.points])
widths = np.array([p.report.fwhm_hz for p in res.points])
fit = res.fit
ax2.plot(volts, widths / 1e6, "o")
ax2.plot(volts, (fit.slope * volts + fit.intercept) / 1e6, "-")
ax2.set(xlabel="V", ylabel="FWHM (MHz)", title=f"r2 = {fit.r2:.5f}")
fig.tight_layout()
fig.savefig(out / "01_fwhm_vs_voltage.png", dpi=120)
print(f"FWHM slope {fit.slope / 1e3:.1f} kHz/V, r2 = {fit.r2:.6f}")

# square line: the side lobe of the sinc-shaped decay
sq = load_bundled("fig2_sidelobe").with_value("timeline.v_v", 95.0)
sq = sq.with_value("ensemble.n_atoms", 20_000)
pert = run_sweep(sq).points[0].perturbed
t_side, height = an.secondary_maximum(pert)
print(f"uniform line at 95 V: side lobe {height:.3f} of I(0) at {t_side * 1e6:.2f} us")
