import os
import sys
from pathlib import Path

# allow several numba workers even on a single-core machine, so thread-count
# reproducibility can be exercised; must happen before numba is imported
os.environ.setdefault("NUMBA_NUM_THREADS", "4")

sys.path.insert(0, str(Path(__file__).parent))

import pytest

from starkfid.ensemble import EnsembleParams, OpticalPulse, excite, sample_ensemble
from starkfid.stark import StarkGeometry


@pytest.fixture(scope="session")
def geom():
    return StarkGeometry.for_span(4e6, 95.0)


@pytest.fixture(scope="session")
def small_ensemble():
    """Excited, paired, 2000 atoms with a 200 kHz Lorentzian line."""
    p = EnsembleParams(rng_seed=7, n_atoms=2000, gamma_inh=200e3, sample_window=1.5e6)
    return excite(sample_ensemble(p), OpticalPulse(rabi=0.1 / 3e-6))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
