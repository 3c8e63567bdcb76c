"""Command-line front end: ``starkfid run|list|validate``."""
from __future__ import annotations

import argparse
import json
import sys
import time
import warnings
from pathlib import Path

from . import scenario as scn
from .dynamics import set_threads
from .pipeline import run_sweep, write_outputs


def _resolve(spec: str):
    """A scenario file path, or the name of a bundled scenario."""
    path = Path(spec)
    if path.exists():
        return scn.load(path)
    if spec in scn.bundled_names():
        return scn.load_bundled(spec)
    raise scn.ScenarioError([f"<file>: {spec!r} is neither a file nor a bundled scenario"])


def cmd_list(args) -> int:
    for name in scn.bundled_names():
        desc = json.loads(scn.bundled_path(name).read_text()).get("description", "")
        print(f"{name:18s} {desc}")
    return 0


def cmd_validate(args) -> int:
    try:
        sc = _resolve(args.file)
    except scn.ScenarioError as exc:
        print(exc, file=sys.stderr)
        return 1
    n = len(sc.points())
    print(f"{sc.name}: ok ({n} point{'s' if n != 1 else ''})")
    return 0


def cmd_run(args) -> int:
    try:
        sc = _resolve(args.file)
    except scn.ScenarioError as exc:
        print(exc, file=sys.stderr)
        return 1
    if args.threads is not None:
        set_threads(args.threads)
    out = args.out or (sc.outputs or {}).get("dir") or f"out/{sc.name}"
    artifacts = tuple((sc.outputs or {}).get("artifacts", scn.ARTIFACTS))

    t0 = time.perf_counter()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        result = run_sweep(sc, mode=args.mode, parallel=args.parallel_sweep)
    for msg in sorted({str(w.message) for w in caught}):
        print(f"warning: {msg}", file=sys.stderr)
    write_outputs(result, out, artifacts)
    print(result.report_text(), end="")
    print(f"wrote {out} in {time.perf_counter() - t0:.1f} s")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="starkfid", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a scenario file or bundled scenario")
    r.add_argument("file")
    r.add_argument("--out", help="output directory")
    g = r.add_mutually_exclusive_group()
    g.add_argument("--deterministic", dest="mode", action="store_const",
                   const="deterministic", help="fixed reduction order (default)")
    g.add_argument("--relaxed", dest="mode", action="store_const", const="relaxed",
                   help="BLAS reduction, not bit-reproducible")
    r.add_argument("--threads", type=int, help="worker threads for the phasor sum")
    r.add_argument("--parallel-sweep", action="store_true",
                   help="run sweep points in separate processes")
    r.set_defaults(func=cmd_run, mode="deterministic")

    ls = sub.add_parser("list", help="list bundled scenarios")
    ls.set_defaults(func=cmd_list)

    v = sub.add_parser("validate", help="check a scenario file against the schema")
    v.add_argument("file")
    v.set_defaults(func=cmd_validate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
