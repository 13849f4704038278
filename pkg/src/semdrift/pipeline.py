"""End-to-end runs: trace in, complexes, ledgers, decisions and CSV out.

Per slice: cover -> incidence -> nerve -> closure.  Across slices: the
evolving text's restriction maps.  Per (time pair, tracked surface): a
carry/rupture decision appended to that anchor's ledger and echoed as one
line of the decisions log.  Everything downstream of the trace is
deterministic, so two runs over the same input produce identical bytes.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np

from .calculus import (
    AdmissibilityPolicy,
    CarryWitness,
    Ledger,
    MAX_LOGGED_ATTEMPTS,
    RupturePayload,
    empty_ledger,
    find_carry,
    ledger_append,
    ledger_to_dict,
)
from .errors import DegenerateDataError, DriftError, TimeOrderViolationError, TraceFormatError
from .evolving import EvolvingText, build_evolving_text, track
from .nerve import SliceComplex, build_nerve, ex_infty_close
from .slices import CapCover, SliceSample, build_cover, incidence
from .trace import TraceFile, canonical_json

DECISIONS_FILE = "decisions.log"
BUNDLE_FILE = "bundle.json"
PCA_FILE = "pca.csv"

# Eigenvalues at or below this fraction of the largest are treated as
# numerically zero when deciding the covariance rank.
_RANK_REL_TOL = 1e-12


@dataclass(frozen=True)
class RunConfig:
    """Everything a run needs beyond the trace itself.

    pairs, when given, is the exact list of (earlier, later) time pairs to
    check; otherwise all adjacent pairs are checked plus any extra_pairs.
    seed is recorded in outputs for provenance; the run itself draws no
    randomness.
    """

    radius_quantile: float = 0.15
    policy: AdmissibilityPolicy = field(default_factory=AdmissibilityPolicy)
    tracked_surfaces: tuple[str, ...] = ()
    pairs: tuple[tuple[int, int], ...] | None = None
    extra_pairs: tuple[tuple[int, int], ...] = ()
    seed: int = 42
    pca_dims: int = 3
    max_logged_attempts: int = MAX_LOGGED_ATTEMPTS

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "extra_pairs": [list(p) for p in self.extra_pairs],
            "max_logged_attempts": self.max_logged_attempts,
            "pca_dims": self.pca_dims,
            "policy": {
                "allow_dashed_steps": self.policy.allow_dashed_steps,
                "max_hops": self.policy.max_hops,
                "step_angle_max": self.policy.step_angle_max,
                "step_angle_quantile": self.policy.step_angle_quantile,
                "turning_angle_max": self.policy.turning_angle_max,
            },
            "radius_quantile": self.radius_quantile,
            "seed": self.seed,
            "tracked_surfaces": list(self.tracked_surfaces),
        }
        out["pairs"] = None if self.pairs is None else [list(p) for p in self.pairs]
        return out


def config_from_dict(data: Mapping[str, Any]) -> RunConfig:
    """Build a RunConfig from a config-file dict; unknown keys are errors."""
    known = {
        "radius_quantile",
        "policy",
        "tracked_surfaces",
        "pairs",
        "extra_pairs",
        "seed",
        "pca_dims",
        "max_logged_attempts",
    }
    unknown = set(data) - known
    if unknown:
        raise TraceFormatError(f"unknown config keys: {sorted(unknown)}")
    policy_data = data.get("policy", {})
    policy_known = {
        "max_hops",
        "step_angle_quantile",
        "turning_angle_max",
        "allow_dashed_steps",
        "step_angle_max",
    }
    unknown = set(policy_data) - policy_known
    if unknown:
        raise TraceFormatError(f"unknown policy keys: {sorted(unknown)}")
    try:
        policy = AdmissibilityPolicy(**policy_data)
        pairs = data.get("pairs")
        return RunConfig(
            radius_quantile=float(data.get("radius_quantile", 0.15)),
            policy=policy,
            tracked_surfaces=tuple(data.get("tracked_surfaces", ())),
            pairs=None if pairs is None else tuple(tuple(p) for p in pairs),
            extra_pairs=tuple(tuple(p) for p in data.get("extra_pairs", ())),
            seed=int(data.get("seed", 42)),
            pca_dims=int(data.get("pca_dims", 3)),
            max_logged_attempts=int(
                data.get("max_logged_attempts", MAX_LOGGED_ATTEMPTS)
            ),
        )
    except (TypeError, ValueError) as exc:
        raise TraceFormatError(f"bad config value: {exc}") from exc


@dataclass(frozen=True, eq=False)
class RunBundle:
    """Everything a run produced, ready for serialisation."""

    et: EvolvingText
    covers: tuple[CapCover, ...]
    ledgers: Mapping[tuple[str, int], Ledger]
    decisions: tuple[str, ...]
    config: RunConfig


def build_slice_geometry(
    sample: SliceSample, radius_quantile: float
) -> tuple[CapCover, SliceComplex]:
    """Cover, incidence, nerve and closure for one slice."""
    try:
        cover = build_cover(sample, radius_quantile)
        inc = incidence(sample, cover)
        complex_ = ex_infty_close(
            build_nerve(cover, inc, time_index=sample.time_index)
        )
    except DriftError as exc:
        raise type(exc)(f"slice at time {sample.time_index}: {exc}") from exc
    return cover, complex_


def resolve_pairs(
    times: Sequence[int], config: RunConfig
) -> tuple[tuple[int, int], ...]:
    """The time pairs a run will check, in deterministic order."""
    known = set(times)
    if config.pairs is not None:
        chosen = list(config.pairs)
    else:
        chosen = [(a, b) for a, b in zip(times, times[1:])]
        for extra in config.extra_pairs:
            if extra not in chosen:
                chosen.append(extra)
    for earlier, later in chosen:
        if earlier not in known or later not in known:
            raise TraceFormatError(f"pair {(earlier, later)!r} names unknown times")
        if later < earlier:
            raise TimeOrderViolationError(
                f"pair {(earlier, later)!r} runs backwards"
            )
    return tuple((int(a), int(b)) for a, b in chosen)


def decision_line(
    earlier: int, later: int, surface: str, outcome: CarryWitness | RupturePayload
) -> str:
    """One decisions-log line.  Hop counts pluralise ("1 hop", "2 hops")."""
    prefix = f"[tau{earlier}->tau{later}] {surface}:"
    if isinstance(outcome, CarryWitness):
        unit = "hop" if outcome.hop_count == 1 else "hops"
        return f"{prefix} CARRY ({outcome.hop_count} {unit})"
    return f"{prefix} RUPTURE"


def run_pipeline(trace: TraceFile, config: RunConfig) -> RunBundle:
    """Full run over a parsed trace.

    For each checked pair and tracked surface, the anchor at the earlier
    time is tested against the later slice.  A surface absent at the
    earlier time has no anchor there; absent at the later time it counts
    as a disappearance.  Neither case writes a ledger entry or a log line.
    """
    covers: list[CapCover] = []
    complexes: list[SliceComplex] = []
    for sample in trace.samples:
        cover, complex_ = build_slice_geometry(sample, config.radius_quantile)
        covers.append(cover)
        complexes.append(complex_)
    et = build_evolving_text(trace.samples, complexes)

    pairs = resolve_pairs(et.times(), config)
    ledgers: dict[tuple[str, int], Ledger] = {}
    decisions: list[str] = []
    for earlier, later in pairs:
        for surface in config.tracked_surfaces:
            anchors = [
                a for a in track(et, surface) if a.time_index == earlier
            ]
            if not anchors:
                continue
            anchor = anchors[0]
            outcome = find_carry(
                et,
                anchor,
                later,
                config.policy,
                max_logged_attempts=config.max_logged_attempts,
            )
            if outcome is None:
                continue
            key = (surface, earlier)
            ledger = ledgers.get(key) or empty_ledger(surface, earlier)
            ledgers[key] = ledger_append(ledger, outcome)
            decisions.append(decision_line(earlier, later, surface, outcome))

    return RunBundle(
        et=et,
        covers=tuple(covers),
        ledgers=ledgers,
        decisions=tuple(decisions),
        config=config,
    )


def export_pca(et: EvolvingText, dims: int) -> list[tuple[int, int, str, tuple[float, ...]]]:
    """Project every token of every slice into one shared PCA frame.

    The projection is fitted once on the union of all slices' vectors:
    center, eigendecompose the covariance, order components by descending
    eigenvalue.  Each component's largest-magnitude coordinate is made
    positive so the frame is reproducible.  When the covariance rank falls
    short of dims, the missing coordinates are zero for every point.
    """
    all_vectors = []
    rows_meta = []
    for sample in et.samples:
        for token in sample.tokens:
            all_vectors.append(token.vector.coords)
            rows_meta.append((sample.time_index, token.token_id, token.surface))
    if len(all_vectors) < 2:
        raise DegenerateDataError("PCA needs at least 2 points")
    data = np.stack(all_vectors)
    ambient = data.shape[1]
    if not 1 <= dims <= ambient:
        raise ValueError(f"dims must be in 1..{ambient}, got {dims}")

    centered = data - data.mean(axis=0)
    cov = np.cov(centered, rowvar=False, bias=False)
    eigenvalues, eigenvectors = np.linalg.eigh(cov)
    order = np.argsort(eigenvalues)[::-1]
    eigenvalues = eigenvalues[order]
    components = eigenvectors[:, order]

    top = eigenvalues[0] if eigenvalues.size else 0.0
    tol = max(top, 0.0) * _RANK_REL_TOL
    for k in range(dims):
        col = components[:, k]
        pivot = int(np.argmax(np.abs(col)))
        if col[pivot] < 0:
            components[:, k] = -col

    projected = centered @ components[:, :dims]
    for k in range(dims):
        if eigenvalues[k] <= tol:
            # Rank exhausted: this axis carries no variance, pad with zeros.
            projected[:, k] = 0.0

    out = []
    for meta, coords in zip(rows_meta, projected):
        out.append((meta[0], meta[1], meta[2], tuple(float(c) for c in coords)))
    out.sort(key=lambda r: (r[0], r[1]))
    return out


def pca_csv(rows: Sequence[tuple[int, int, str, tuple[float, ...]]], dims: int) -> str:
    """CSV text for PCA rows: header then one line per token."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        ["time_index", "token_id", "surface"] + [f"c{k}" for k in range(dims)]
    )
    for time_index, token_id, surface, coords in rows:
        writer.writerow(
            [time_index, token_id, surface]
            + [format(c, ".17g") for c in coords]
        )
    return buf.getvalue()


def complex_to_dict(complex_: SliceComplex, cover: CapCover) -> dict[str, Any]:
    solid = sorted(complex_.solid_edges)
    dashed = sorted(complex_.dashed_edges)
    return {
        "dashed_edges": [
            {
                "angle": complex_.edge_angles[pair],
                "mediator": complex_.dashed_mediators[pair],
                "pair": list(pair),
            }
            for pair in dashed
        ],
        "radius": cover.radius,
        "solid_edges": [
            {"angle": complex_.edge_angles[pair], "pair": list(pair)}
            for pair in solid
        ],
        "time_index": complex_.time_index,
        "triangles": [
            {"vertices": list(tri), "witness": complex_.triangle_witnesses[tri]}
            for tri in sorted(complex_.triangle_witnesses)
        ],
        "vertices": list(complex_.vertices),
    }


def bundle_to_dict(bundle: RunBundle) -> dict[str, Any]:
    return {
        "config": bundle.config.to_dict(),
        "slices": [
            complex_to_dict(complex_, cover)
            for complex_, cover in zip(bundle.et.complexes, bundle.covers)
        ],
        "version": "1",
    }


def ledger_file_dict(bundle: RunBundle, surface: str) -> dict[str, Any]:
    """Per-surface ledger file: that surface's anchor ledgers, oldest first."""
    ledgers = [
        ledger_to_dict(ledger)
        for (s, _), ledger in sorted(bundle.ledgers.items())
        if s == surface
    ]
    return {"ledgers": ledgers, "surface": surface}


def write_run_outputs(bundle: RunBundle, out_dir: str | Path) -> list[Path]:
    """Write bundle, decisions log, per-surface ledgers, and the PCA CSV."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    bundle_path = out / BUNDLE_FILE
    bundle_path.write_text(canonical_json(bundle_to_dict(bundle)) + "\n")
    written.append(bundle_path)

    decisions_path = out / DECISIONS_FILE
    body = "\n".join(bundle.decisions)
    decisions_path.write_text(body + "\n" if body else "")
    written.append(decisions_path)

    for surface in sorted({s for (s, _) in bundle.ledgers}):
        path = out / f"{surface}.ledger.json"
        path.write_text(canonical_json(ledger_file_dict(bundle, surface)) + "\n")
        written.append(path)

    rows = export_pca(bundle.et, bundle.config.pca_dims)
    pca_path = out / PCA_FILE
    pca_path.write_text(pca_csv(rows, bundle.config.pca_dims))
    written.append(pca_path)
    return written
