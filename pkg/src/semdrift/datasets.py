"""A built-in four-slice trace with a scripted rupture-and-heal pattern.

Three tracked words drift through a tiny synthetic embedding space laid
out on a great circle of S^2 (angles add up along the circle, so every
distance below is exact by construction):

* "bank" keeps its sense but always echoes onto a close companion, so
  every check carries at one hop;
* "cat" stays put twice (zero-hop carries) and then echoes onto a
  companion (one hop);
* "flow" stays put, then jumps to a far-off cluster (the rupture), then
  returns next to its old position (the heal, one hop).

Checked pairs are 1->2, 2->3 and 2->4, giving the decisions pattern
CARRY/CARRY/CARRY, CARRY/CARRY/RUPTURE, CARRY/CARRY/CARRY.

Why the numbers work, at the default radius quantile 0.15 and step
quantile 0.2: in slice 2 the sorted intra-cluster angles put the shared
cap radius at 0.05 (10th of 66 pairs), every within-cluster pair except
flow-stream (0.11 > 2r = 0.10) becomes a solid edge, flow-stream closes
to a dashed edge, and the step bound theta_max lands on the 4th of 18
edge angles = 0.018.  That leaves exactly three admissible edges, one per
tracked word: bank-river 0.015, cat-whisker 0.012, flow-current 0.016.
The slice-3 echo of "flow" sits in a separate cluster whose nearest
slice-2 token is "margin", and no edge reaches it: rupture.  The slice-4
echo back-propagates (through slice 3's leftover "current") onto slice
2's "current": a one-hop carry over the 0.016 edge heals the rupture.
"""

from __future__ import annotations

import math
from typing import Any

TRACKED_WORDS = ("bank", "cat", "flow")

CHECKED_PAIRS = ((1, 2), (2, 3), (2, 4))

# (surface, position along the great circle, radians)
_SLICES: tuple[tuple[int, tuple[tuple[str, float], ...]], ...] = (
    (
        1,
        (
            ("bank", 0.00),
            ("river", 0.015),
            ("ledger", 0.06),
            ("cat", 1.50),
            ("page", 1.53),
            ("flow", 3.00),
            ("current", 3.035),
            ("drift", 3.07),
        ),
    ),
    (
        2,
        (
            ("river", 0.005),
            ("bank", 0.02),
            ("ledger", 0.07),
            ("shore", 0.10),
            ("cat", 1.50),
            ("whisker", 1.512),
            ("page", 1.53),
            ("margin", 1.56),
            ("flow", 3.00),
            ("current", 3.016),
            ("drift", 3.08),
            ("stream", 3.11),
        ),
    ),
    (
        3,
        (
            ("bank", 0.00),
            ("river", 0.04),
            ("ledger", 0.08),
            ("cat", 1.50),
            ("whisker", 1.512),
            ("page", 1.54),
            ("flow", 2.00),
            ("error", 2.035),
            ("loop", 2.06),
            ("current", 3.016),
            ("drift", 3.05),
        ),
    ),
    (
        4,
        (
            ("bank", 0.00),
            ("note", 0.03),
            ("cat", 1.512),
            ("page", 1.55),
            ("flow", 3.00),
            ("token", 3.04),
            ("proof", 3.08),
        ),
    ),
)


def bank_cat_flow_trace() -> dict[str, Any]:
    """The demonstration trace as a plain trace-file dict."""
    slices = []
    for time_index, layout in _SLICES:
        tokens = []
        for token_id, (surface, phi) in enumerate(layout):
            start = token_id * 8
            tokens.append(
                {
                    "token_id": token_id,
                    "surface": surface,
                    "char_start": start,
                    "char_end": start + len(surface),
                    "vector": [math.cos(phi), math.sin(phi), 0.0],
                }
            )
        slices.append({"time_index": time_index, "tokens": tokens})
    return {"version": "1", "dim": 3, "slices": slices}


def bank_cat_flow_config() -> dict[str, Any]:
    """Run configuration matching the scripted pattern."""
    return {
        "pairs": [list(p) for p in CHECKED_PAIRS],
        "tracked_surfaces": list(TRACKED_WORDS),
    }
