"""From one text slice to its cap nerve, closure, and open horns.

Five tokens sit on a great circle with a deliberate gap: the two ends of
the gap are not directly connected, but both connect to the middle, so
closing the complex adds a dashed edge between them.

Run with:  python3 demos/02_slice_nerve.py
"""

import math

from semdrift import (
    SliceSample,
    TokenOccurrence,
    build_cover,
    build_nerve,
    ex_infty_close,
    incidence,
    normalize,
    open_horn_for,
)

WORDS = (
    ("alpha", 0.00),
    ("beta", 0.18),
    ("gamma", 0.35),
    ("delta", 0.55),
    ("omega", 1.40),  # far from the rest; stays isolated
)

tokens = tuple(
    TokenOccurrence(
        token_id=i,
        surface=surface,
        char_span=(i * 8, i * 8 + len(surface)),
        vector=normalize([math.cos(phi), math.sin(phi), 0.0]),
    )
    for i, (surface, phi) in enumerate(WORDS)
)
sample = SliceSample(time_index=0, tokens=tokens)

print("== cover ==")
cover = build_cover(sample, 0.3)
print(f"shared radius at q=0.3: {cover.radius:.4f}")

rel = incidence(sample, cover)
for tid, (surface, _) in enumerate(WORDS):
    caps = rel.caps_of(tid)
    print(f"  {surface:<6} sits in caps {caps}")

print()
print("== nerve, then one closure round ==")
nerve = build_nerve(cover, rel, time_index=0)
closed = ex_infty_close(nerve)
print(f"solid edges:  {sorted(closed.solid_edges)}")
print(f"triangles:    {sorted(closed.triangle_witnesses)}")
print(f"dashed edges: {sorted(closed.dashed_edges)}")
for edge, mediator in sorted(closed.dashed_mediators.items()):
    a, b = WORDS[edge[0]][0], WORDS[edge[1]][0]
    print(f"  {a}--{b} weakly connected through {WORDS[mediator][0]}")

print()
print("== open horns name what is missing ==")
horn = open_horn_for(closed, (0, 4), 0)
print(f"alpha -> omega attempt:    {horn.kind}, boundary {horn.boundary}")
horn = open_horn_for(closed, (0, 3), 0)
print(f"alpha -> delta attempt:    {horn.kind}, boundary {horn.boundary}")
