"""
Scenario files, programmatically
================================

Everything the command line does is available from Python: build or load
a scenario document, validate it, run the sweep and write the CSV files.
The same document can then be run with ``starkfid run``.
"""
import json
from pathlib import Path

from starkfid.pipeline import run_sweep, write_outputs
from starkfid.scenario import ScenarioError, from_dict, load_bundled

out = Path(__file__).with_name("out")

doc = load_bundled("fig3a_invert").to_dict()
doc["name"] = "demo_multi"
doc["ensemble"]["n_atoms"] = 10_000
doc["timeline"] = {"preset": "multi_invert", "v_v": 95.0, "t_on_s": 0.0,
                   "tau_s": 0.6e-6, "n_flips": 4, "t_switch_s": 1e-8}
doc["sweep"] = {"parameter": "timeline.v_v", "values": [40.0, 95.0]}

# a typo is caught before anything runs, with the offending path
try:
    from_dict({**doc, "timeline": {**doc["timeline"], "tau": 1e-6}})
except ScenarioError as exc:
    print(exc)

sc = from_dict(doc)
path = out / "demo_multi.json"
path.parent.mkdir(exist_ok=True)
path.write_text(json.dumps(doc, indent=2))

result = run_sweep(sc)
write_outputs(result, out / "demo_multi")
print(result.report_text())
print(f"scenario written to {path}; rerun it with: starkfid run {path}")
