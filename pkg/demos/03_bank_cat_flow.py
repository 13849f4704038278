"""Full pipeline over the built-in rupture-and-heal trace.

Three tracked words, four slices, three checked pairs.  "flow" jumps to a
new cluster in slice 3 (rupture) and returns beside its old position in
slice 4 (the ledger heals with a one-hop carry).

The script first writes demos/data/bank_cat_flow.trace.json and its run
config, so the same run also works from the command line:

    python3 -m semdrift run demos/data/bank_cat_flow.trace.json \
        --config demos/data/bank_cat_flow.config.json --out /tmp/drift-out

Run with:  python3 demos/03_bank_cat_flow.py
"""

import json
from pathlib import Path

from semdrift import canonical_json, parse_trace, run_pipeline, serialize_trace
from semdrift.datasets import bank_cat_flow_config, bank_cat_flow_trace
from semdrift.pipeline import config_from_dict

data_dir = Path(__file__).parent / "data"
data_dir.mkdir(exist_ok=True)
trace_path = data_dir / "bank_cat_flow.trace.json"
config_path = data_dir / "bank_cat_flow.config.json"

trace = parse_trace(bank_cat_flow_trace())
trace_path.write_text(serialize_trace(trace), encoding="utf-8")
config_path.write_text(
    canonical_json(bank_cat_flow_config()) + "\n", encoding="utf-8"
)
print(f"wrote {trace_path}")
print(f"wrote {config_path}")

config = config_from_dict(json.loads(config_path.read_text(encoding="utf-8")))
bundle = run_pipeline(trace, config)

print()
print("== decisions ==")
for line in bundle.decisions:
    print(line)

print()
print("== the flow ledger tells the heal story ==")
ledger = bundle.ledgers[("flow", 2)]
for entry in ledger.entries:
    print(f"ts={entry.timestamp}  {entry.kind}", end="")
    if entry.kind == "carry":
        print(f"  chain {entry.payload.chain.vertices}")
    else:
        first = entry.payload.failed_attempts[0]
        print(
            f"  first failed attempt {first.attempt.vertices}"
            f" ({first.violation}: {first.horn.kind})"
        )

print()
print("anchors never mutate: both entries pin the same (surface, time):")
for entry in ledger.entries:
    anchor = entry.payload.anchor
    print(f"  ts={entry.timestamp} -> ({anchor.surface!r}, {anchor.time_index})")
