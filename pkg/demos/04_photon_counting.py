"""
Photon counting at the single-photon level
==========================================

A detected trace holds only tens of photons. Poisson sampling of the
binned intensity shows what one shot looks like and how averaging many
shots recovers the noiseless shape.
"""
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from starkfid.dynamics import run_scenario
from starkfid.noise import DetectionParams, add_shot_noise
from starkfid.scenario import load_bundled

out = Path(__file__).with_name("out")
out.mkdir(exist_ok=True)

sc = load_bundled("fig3b_freeze").with_value("ensemble.n_atoms", 20_000)
pert, ref = run_scenario(sc)
det = sc.detection

one = add_shot_noise(pert, det)
print(f"one shot: {one.counts.sum()} photons in {one.counts.size} bins "
      f"(expected {one.expected.sum():.1f})")

shots = 2000
total = np.zeros_like(one.expected)
for seed in range(shots):
    total += add_shot_noise(pert, DetectionParams(seed, det.mean_total_photons,
                                                  det.bin_width)).counts
mean = total / shots
rms = np.sqrt(np.mean((mean - one.expected) ** 2)) / np.sqrt(np.mean(one.expected ** 2))
print(f"average of {shots} shots deviates from the expectation by {rms:.3f} rms")

fig, ax = plt.subplots(figsize=(7, 4))
width = det.bin_width * 1e6
ax.bar(one.t_centers * 1e6, one.counts, width=width, alpha=0.4, label="one shot")
ax.step(one.t_centers * 1e6, mean, where="mid", label=f"mean of {shots}")
ax.plot(one.t_centers * 1e6, one.expected, "k--", label="expectation")
ax.set(xlabel="t (us)", ylabel="counts per bin")
ax.legend()
fig.tight_layout()
fig.savefig(out / "04_photon_counting.png", dpi=120)
