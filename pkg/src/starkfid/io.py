"""CSV export of traces, spectra, counts and sweep summaries."""
from __future__ import annotations

import csv
import io
import os
import tempfile
from pathlib import Path

import numpy as np

from .dynamics import TimeGrid, Trace

TRACE_HEADER = ["t_s", "re_amp", "im_amp", "intensity"]


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return "%.17g" % x
    return str(x)


def write_atomic(path, text: str):
    """Write via a temporary file in the same directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def table_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(x) for x in row])
    return buf.getvalue()


def write_table(path, header, rows):
    write_atomic(path, table_text(header, rows))


def write_trace(path, trace: Trace):
    rows = zip(trace.times, trace.amplitude.real, trace.amplitude.imag, trace.intensity)
    write_table(path, TRACE_HEADER, rows)


def read_trace(path) -> Trace:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    t = data[:, 0]
    grid = TimeGrid(float(t[0]), float(t[-1]), t.size)
    return Trace(grid, data[:, 1] + 1j * data[:, 2])


def write_spectrum(path, spec):
    write_table(path, ["f_hz", "density"], zip(spec.freqs_hz, spec.density))


def write_counts(path, counts):
    write_table(path, ["t_bin_center_s", "counts"], zip(counts.t_centers, counts.counts))
