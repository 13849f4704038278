"""Acceptance suite: ten criteria, one printed pass/fail line each.

Each test prints its verdict through capsys.disabled() so the line shows
even under default capture, then asserts. Tolerances and instance counts
are pinned in the constants below.
"""

import json
import math
import time
from dataclasses import replace
from itertools import combinations

import numpy as np
import pytest

from semdrift.calculus import (
    AdmissibilityPolicy,
    CarryWitness,
    RupturePayload,
    admissibility_violation,
    edge_theta_max,
    empty_ledger,
    entry_to_dict,
    enumerate_attempts,
    find_carry,
    ledger_append,
    ledger_to_dict,
)
from semdrift.datasets import bank_cat_flow_config, bank_cat_flow_trace
from semdrift.errors import CapRadiusTooLargeError
from semdrift.evolving import build_evolving_text, restrict, track
from semdrift.geometry import (
    SphericalCap,
    UnitVector,
    angular_distance,
    caps_intersect,
    normalize,
)
from semdrift.nerve import SliceComplex, build_nerve, ex_infty_close
from semdrift.slices import SliceSample, TokenOccurrence, build_cover, incidence
from semdrift.pipeline import config_from_dict, run_pipeline, write_run_outputs
from semdrift.trace import canonical_json, parse_trace

METRIC_TRIPLES_PER_DIM = 10_000
METRIC_DIMS = (2, 8, 64)
METRIC_TOL = 1e-9
METRIC_BUDGET_S = 5.0

CAP_PAIRS = 100
CAP_ORACLE_POINTS = 100_000
CAP_MARGIN = 1e-3
CAP_BUDGET_S = 30.0

NERVE_INSTANCES = 200
NERVE_CAPS = 8

ENUM_INSTANCES = 100
ENUM_MAX_VERTICES = 8

HONESTY_INSTANCES = 500
FUNCTORIALITY_INSTANCES = 100
MONOTONE_INSTANCES = 200

REPRO_BUDGET_S = 1.0

EXPECTED_DECISIONS = (
    "[tau1->tau2] bank: CARRY (1 hop)",
    "[tau1->tau2] cat: CARRY (0 hops)",
    "[tau1->tau2] flow: CARRY (0 hops)",
    "[tau2->tau3] bank: CARRY (1 hop)",
    "[tau2->tau3] cat: CARRY (0 hops)",
    "[tau2->tau3] flow: RUPTURE",
    "[tau2->tau4] bank: CARRY (1 hop)",
    "[tau2->tau4] cat: CARRY (1 hop)",
    "[tau2->tau4] flow: CARRY (1 hop)",
)


@pytest.fixture
def verdict(capsys):
    def _verdict(line: str, problems: list[str]) -> None:
        status = "PASS" if not problems else "FAIL"
        with capsys.disabled():
            print(f"[{status}] {line}")
        assert not problems, "; ".join(problems[:5])

    return _verdict


def random_units(rng, count, dim):
    raw = rng.normal(size=(count, dim))
    raw /= np.linalg.norm(raw, axis=1, keepdims=True)
    return [UnitVector(row) for row in raw]


def circle_tokens(surfaces_phis):
    return tuple(
        TokenOccurrence(
            token_id=i,
            surface=s,
            char_span=(i * 8, i * 8 + max(1, len(s))),
            vector=normalize([math.cos(p), math.sin(p), 0.0]),
        )
        for i, (s, p) in enumerate(surfaces_phis)
    )


def assemble_et(slice_specs, q):
    samples, complexes = [], []
    for time_index, words in slice_specs:
        sample = SliceSample(time_index=time_index, tokens=circle_tokens(words))
        cover = build_cover(sample, q)
        complexes.append(
            ex_infty_close(build_nerve(cover, incidence(sample, cover), time_index))
        )
        samples.append(sample)
    return build_evolving_text(samples, complexes)


def clustered_two_slice(rng, shared_rate=0.85):
    """Random 2-slice instance; angles clustered so covers stay legal."""
    while True:
        n0 = int(rng.integers(2, 8))
        n1 = int(rng.integers(1, 6))
        words0 = [(f"a{k}", float(rng.uniform(0.0, 0.6))) for k in range(n0)]
        words1 = [(f"b{k}", float(rng.uniform(0.0, 0.6))) for k in range(n1)]
        words0[int(rng.integers(n0))] = ("w", words0[int(rng.integers(n0))][1])
        if rng.random() < shared_rate:
            words1[int(rng.integers(n1))] = ("w", words1[int(rng.integers(n1))][1])
        try:
            return assemble_et([(0, words0), (1, words1)], q=0.5)
        except CapRadiusTooLargeError:
            continue


def random_policy(rng):
    return AdmissibilityPolicy(
        max_hops=int(rng.integers(0, 3)),
        step_angle_quantile=float(rng.choice([0.2, 0.5, 0.9, 1.0])),
        allow_dashed_steps=bool(rng.random() < 0.5),
    )


def test_c01_metric_axioms(verdict):
    problems = []
    start = time.perf_counter()
    rng = np.random.default_rng(101)
    for dim in METRIC_DIMS:
        vectors = random_units(rng, 3 * METRIC_TRIPLES_PER_DIM, dim)
        for t in range(METRIC_TRIPLES_PER_DIM):
            u, v, w = vectors[3 * t : 3 * t + 3]
            duv = angular_distance(u, v)
            dvu = angular_distance(v, u)
            if abs(duv - dvu) > METRIC_TOL:
                problems.append(f"symmetry dim {dim} triple {t}")
            if angular_distance(u, w) > duv + angular_distance(v, w) + METRIC_TOL:
                problems.append(f"triangle dim {dim} triple {t}")
        if angular_distance(vectors[0], vectors[0]) != 0.0:
            problems.append(f"self-distance not exactly 0 in dim {dim}")
    elapsed = time.perf_counter() - start
    if elapsed >= METRIC_BUDGET_S:
        problems.append(f"runtime {elapsed:.2f}s over {METRIC_BUDGET_S}s budget")
    verdict(
        f"criterion 1: metric axioms, {METRIC_TRIPLES_PER_DIM} triples per dim "
        f"{METRIC_DIMS}, tol {METRIC_TOL:g}, exact zero self-distance "
        f"({elapsed:.2f}s)",
        problems,
    )


def sample_in_cap(rng, cap, count):
    """Uniform points of an S^2 cap: the rejection oracle's sample set."""
    z = rng.uniform(math.cos(cap.radius), 1.0, size=count)
    azimuth = rng.uniform(0.0, 2.0 * math.pi, size=count)
    sin_polar = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    pts = np.column_stack(
        (sin_polar * np.cos(azimuth), sin_polar * np.sin(azimuth), z)
    )
    pole = np.array([0.0, 0.0, 1.0])
    center = cap.center.coords
    axis = np.cross(pole, center)
    norm = np.linalg.norm(axis)
    if norm < 1e-12:
        if center[2] > 0:
            return pts
        return pts * np.array([1.0, 1.0, -1.0])
    axis = axis / norm
    angle = math.acos(min(1.0, max(-1.0, float(center @ pole))))
    k_mat = np.array(
        [
            [0.0, -axis[2], axis[1]],
            [axis[2], 0.0, -axis[0]],
            [-axis[1], axis[0], 0.0],
        ]
    )
    rot = (
        np.eye(3)
        + math.sin(angle) * k_mat
        + (1.0 - math.cos(angle)) * (k_mat @ k_mat)
    )
    return pts @ rot.T


def test_c02_cap_intersection_oracle(verdict):
    problems = []
    start = time.perf_counter()
    rng = np.random.default_rng(211)
    checked = 0
    for pair_index in range(CAP_PAIRS):
        centers = random_units(rng, 2, 3)
        r1, r2 = rng.uniform(0.25, 1.1, size=2)
        a = SphericalCap(centers[0], float(r1))
        b = SphericalCap(centers[1], float(r2))
        d = angular_distance(a.center, b.center)
        if abs(d - (a.radius + b.radius)) <= CAP_MARGIN:
            continue  # inside the agreed dead zone, the oracle abstains
        small, large = (a, b) if a.radius <= b.radius else (b, a)
        pts = sample_in_cap(rng, small, CAP_ORACLE_POINTS)
        cos_d = pts @ large.center.coords
        oracle_hit = bool(
            np.any(np.arccos(np.clip(cos_d, -1.0, 1.0)) < large.radius)
        )
        if caps_intersect(a, b) != oracle_hit:
            problems.append(
                f"pair {pair_index}: d={d:.4f} r1+r2={a.radius + b.radius:.4f}"
            )
        checked += 1
    elapsed = time.perf_counter() - start
    if elapsed >= CAP_BUDGET_S:
        problems.append(f"runtime {elapsed:.2f}s over {CAP_BUDGET_S}s budget")
    if checked < CAP_PAIRS // 2:
        problems.append(f"only {checked} pairs outside the margin dead zone")
    verdict(
        f"criterion 2: caps_intersect vs {CAP_ORACLE_POINTS}-point sampling "
        f"oracle on {checked}/{CAP_PAIRS} pairs, margin {CAP_MARGIN:g} "
        f"({elapsed:.2f}s)",
        problems,
    )


def random_cap_instance(rng):
    while True:
        base = rng.uniform(0.0, 2.0)
        phis = base + rng.uniform(0.0, 1.2, size=NERVE_CAPS)
        words = [(f"t{k}", float(p)) for k, p in enumerate(phis)]
        sample = SliceSample(time_index=0, tokens=circle_tokens(words))
        try:
            cover = build_cover(sample, float(rng.uniform(0.15, 0.6)))
        except CapRadiusTooLargeError:
            continue
        return sample, cover


def test_c03_nerve_correctness(verdict):
    problems = []
    rng = np.random.default_rng(307)
    for instance in range(NERVE_INSTANCES):
        sample, cover = random_cap_instance(rng)
        complex_ = ex_infty_close(
            build_nerve(cover, incidence(sample, cover), 0)
        )
        brute = frozenset(
            (i, j)
            for i, j in combinations(range(NERVE_CAPS), 2)
            if caps_intersect(cover.caps[i], cover.caps[j])
        )
        if complex_.solid_edges != brute:
            problems.append(f"instance {instance}: solid set mismatch")
        if complex_.solid_edges & complex_.dashed_edges:
            problems.append(f"instance {instance}: dashed duplicates solid")
        for (x, z), y in complex_.dashed_mediators.items():
            leg1 = (min(x, y), max(x, y))
            leg2 = (min(y, z), max(y, z))
            if leg1 not in complex_.solid_edges or leg2 not in complex_.solid_edges:
                problems.append(f"instance {instance}: mediator {y} unbacked")
        for pair in complex_.dashed_edges:
            if pair not in complex_.dashed_mediators:
                problems.append(f"instance {instance}: dashed {pair} unmediated")
    verdict(
        f"criterion 3: nerve vs brute-force intersection on {NERVE_INSTANCES} "
        f"random {NERVE_CAPS}-cap instances, mediators verified",
        problems,
    )


def oracle_walks(adjacency, start, goal, bound):
    out = []

    def extend(path):
        if path[-1] == goal:
            out.append(tuple(path))
            return
        if len(path) - 1 >= bound:
            return
        for nb in adjacency[path[-1]]:
            if nb not in path:
                extend(path + [nb])

    extend([start])
    return out


def test_c04_enumeration_oracle(verdict):
    problems = []
    rng = np.random.default_rng(401)
    for instance in range(ENUM_INSTANCES):
        n = int(rng.integers(2, ENUM_MAX_VERTICES + 1))
        vectors = tuple(random_units(rng, n, 4))
        pairs = [(i, j) for i, j in combinations(range(n), 2)]
        solid = frozenset(p for p in pairs if rng.random() < 0.35)
        angles = {
            (i, j): angular_distance(vectors[i], vectors[j]) for i, j in solid
        }
        complex_ = SliceComplex(
            time_index=0,
            vertices=tuple(range(n)),
            vectors=vectors,
            solid_edges=solid,
            dashed_edges=frozenset(),
            dashed_mediators={},
            triangle_witnesses={},
            edge_angles=angles,
        )
        policy = AdmissibilityPolicy(max_hops=int(rng.integers(1, 4)))
        start, goal = int(rng.integers(n)), int(rng.integers(n))
        adjacency = {v: complex_.neighbors(v, include_dashed=True) for v in range(n)}
        expected = oracle_walks(adjacency, start, goal, policy.max_hops)
        if not expected:
            expected = [(start, goal)]
        got = [a.vertices for a in enumerate_attempts(complex_, start, goal, policy)]
        if sorted(got) != sorted(expected):
            problems.append(f"instance {instance}: walk sets differ")
        if len(got) != len(set(got)):
            problems.append(f"instance {instance}: duplicate attempts")
    verdict(
        f"criterion 4: enumerate_attempts vs recursive oracle on "
        f"{ENUM_INSTANCES} graphs (<= {ENUM_MAX_VERTICES} vertices, walk "
        f"bounds 1-3), order-normalized",
        problems,
    )


def test_c05_honesty(verdict):
    problems = []
    rng = np.random.default_rng(503)
    carries = ruptures = 0
    for instance in range(HONESTY_INSTANCES):
        et = clustered_two_slice(rng)
        anchors = [a for a in track(et, "w") if a.time_index == 0]
        if not anchors:
            continue
        policy = random_policy(rng)
        outcome = find_carry(et, anchors[0], 1, policy)
        if outcome is None:
            continue
        complex_ = et.complex_at(0)
        theta = edge_theta_max(complex_, policy)
        if isinstance(outcome, CarryWitness):
            goal = outcome.chain.vertices[-1]
        else:
            goal = outcome.failed_attempts[0].attempt.vertices[-1]
        attempts = enumerate_attempts(complex_, anchors[0].token_id, goal, policy)
        checks = [admissibility_violation(a, policy, theta) for a in attempts]
        if isinstance(outcome, CarryWitness):
            carries += 1
            if admissibility_violation(outcome.chain, policy, theta) is not None:
                problems.append(f"instance {instance}: inadmissible witness")
            admissible = [
                a.hop_count for a, c in zip(attempts, checks) if c is None
            ]
            if not admissible or outcome.hop_count != min(admissible):
                problems.append(f"instance {instance}: non-minimal witness")
        else:
            ruptures += 1
            if any(c is None for c in checks):
                problems.append(
                    f"instance {instance}: rupture despite admissible chain"
                )
            if not outcome.failed_attempts:
                problems.append(f"instance {instance}: empty rupture payload")
    if carries < 10 or ruptures < 10:
        problems.append(
            f"generator too lopsided: {carries} carries, {ruptures} ruptures"
        )
    verdict(
        f"criterion 5: honesty on {HONESTY_INSTANCES} random 2-slice "
        f"instances ({carries} carries, {ruptures} ruptures cross-checked)",
        problems,
    )


def test_c06_functoriality(verdict):
    problems = []
    rng = np.random.default_rng(601)
    for instance in range(FUNCTORIALITY_INSTANCES):
        specs = []
        for t in range(4):
            n = int(rng.integers(2, 7))
            words = [
                (f"s{t}_{k}", float(rng.uniform(0.0, 1.0))) for k in range(n)
            ]
            specs.append((t, words))
        try:
            et = assemble_et(specs, q=0.6)
        except CapRadiusTooLargeError:
            continue
        for tid in range(len(et.sample_at(3).tokens)):
            direct = restrict(et, 3, 0, tid)
            composed = restrict(
                et, 1, 0, restrict(et, 2, 1, restrict(et, 3, 2, tid))
            )
            if direct != composed:
                problems.append(f"instance {instance} vertex {tid}")
    verdict(
        f"criterion 6: restriction functoriality, exact equality on "
        f"{FUNCTORIALITY_INSTANCES} random 4-slice texts",
        problems,
    )


def test_c07_ledger_laws(verdict):
    problems = []
    trace = parse_trace(bank_cat_flow_trace())
    config = config_from_dict(bank_cat_flow_config())
    bundle = run_pipeline(trace, config)

    flow = bundle.ledgers[("flow", 2)]
    kinds = [e.kind for e in flow.entries]
    if kinds != ["rupture", "carry"]:
        problems.append(f"heal scenario produced {kinds}")

    for key, ledger in bundle.ledgers.items():
        stamps = [e.timestamp for e in ledger.entries]
        if any(b <= a for a, b in zip(stamps, stamps[1:])):
            problems.append(f"{key}: timestamps not strictly increasing")

    # Append-only: serialize, append one more entry, compare prefixes.
    carry = bundle.ledgers[("cat", 1)].entries[0].payload
    base = ledger_append(empty_ledger("cat", 1), carry)
    before = [canonical_json(entry_to_dict(e)) for e in base.entries]
    grown = ledger_append(base, carry)
    after = [canonical_json(entry_to_dict(e)) for e in grown.entries]
    if after[: len(before)] != before:
        problems.append("earlier serialized entries changed after append")
    if base.entries != grown.entries[: len(base.entries)]:
        problems.append("append mutated the shared prefix")
    doc = ledger_to_dict(grown)
    stamps = [e["ts"] for e in doc["entries"]]
    if stamps != sorted(set(stamps)):
        problems.append("serialized timestamps not strictly increasing")
    verdict(
        "criterion 7: ledger append-only laws, strictly increasing "
        "timestamps, rupture-then-carry heal ordering",
        problems,
    )


def test_c08_reproduction(verdict):
    problems = []
    start = time.perf_counter()
    trace = parse_trace(bank_cat_flow_trace())
    config = config_from_dict(bank_cat_flow_config())
    bundle = run_pipeline(trace, config)
    elapsed = time.perf_counter() - start
    if bundle.decisions != EXPECTED_DECISIONS:
        problems.append(
            "decisions diverge: " + " | ".join(bundle.decisions)
        )
    if elapsed >= REPRO_BUDGET_S:
        problems.append(f"runtime {elapsed:.2f}s over {REPRO_BUDGET_S}s budget")
    verdict(
        f"criterion 8: synthetic rupture/heal trace reproduces the expected "
        f"decisions log exactly ({elapsed:.3f}s)",
        problems,
    )


def test_c09_determinism(verdict, tmp_path):
    problems = []
    trace_data = bank_cat_flow_trace()
    config_data = bank_cat_flow_config()
    outputs = []
    for run in (1, 2):
        bundle = run_pipeline(
            parse_trace(trace_data), config_from_dict(config_data)
        )
        out = tmp_path / f"run{run}"
        write_run_outputs(bundle, out)
        outputs.append(out)
    names = sorted(p.name for p in outputs[0].iterdir())
    if names != sorted(p.name for p in outputs[1].iterdir()):
        problems.append("output file sets differ")
    for name in names:
        a = (outputs[0] / name).read_bytes()
        b = (outputs[1] / name).read_bytes()
        if a != b:
            problems.append(f"{name} differs between runs")
    verdict(
        "criterion 9: two pipeline runs byte-identical "
        f"({', '.join(names)})",
        problems,
    )


def test_c10_policy_monotonicity(verdict):
    problems = []
    rng = np.random.default_rng(1009)
    flips_checked = 0
    for instance in range(MONOTONE_INSTANCES):
        et = clustered_two_slice(rng)
        anchors = [a for a in track(et, "w") if a.time_index == 0]
        if not anchors:
            continue
        base_hops = int(rng.integers(1, 3))
        base = AdmissibilityPolicy(
            max_hops=base_hops,
            step_angle_quantile=float(rng.choice([0.2, 0.5, 0.9])),
            allow_dashed_steps=bool(rng.random() < 0.5),
        )
        outcome = find_carry(et, anchors[0], 1, base)
        if not isinstance(outcome, CarryWitness):
            continue
        flips_checked += 1
        theta = edge_theta_max(et.complex_at(0), base)
        if theta > 0.0:
            wider_theta = replace(base, step_angle_max=2.0 * theta)
            if not isinstance(
                find_carry(et, anchors[0], 1, wider_theta), CarryWitness
            ):
                problems.append(
                    f"instance {instance}: doubled theta broke carry"
                )
        wider_hops = replace(base, max_hops=2 * base_hops)
        if not isinstance(
            find_carry(et, anchors[0], 1, wider_hops), CarryWitness
        ):
            problems.append(f"instance {instance}: doubled hops broke carry")
    if flips_checked < 30:
        problems.append(f"only {flips_checked} carry instances exercised")
    verdict(
        f"criterion 10: doubling step-angle bound or hop budget kept all "
        f"{flips_checked} carries across {MONOTONE_INSTANCES} instances",
        problems,
    )
