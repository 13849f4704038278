"""Command-line front end.

Four subcommands: ``validate`` checks a trace file, ``build`` writes the
per-slice geometry bundle, ``run`` performs the full carry/rupture
analysis, and ``export-viz`` writes the PCA projection CSV.  A config
file may be named with ``--config`` or the DRIFT_CONFIG environment
variable; explicit flags override config values.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace
from pathlib import Path
from typing import Sequence

from .errors import DriftError
from .evolving import build_evolving_text
from .pipeline import (
    RunBundle,
    RunConfig,
    build_slice_geometry,
    bundle_to_dict,
    config_from_dict,
    export_pca,
    pca_csv,
    run_pipeline,
    write_run_outputs,
)
from .trace import TraceFormatError, canonical_json, load_trace

CONFIG_ENV_VAR = "DRIFT_CONFIG"


def _parse_pair(text: str) -> tuple[int, int]:
    for sep in (":", ","):
        if sep in text:
            left, _, right = text.partition(sep)
            try:
                return int(left), int(right)
            except ValueError:
                break
    raise argparse.ArgumentTypeError(
        f"expected a time pair like 1:2, got {text!r}"
    )


def _add_run_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, default=None, help="config JSON file")
    parser.add_argument("--radius-quantile", type=float, default=None)
    parser.add_argument("--max-hops", type=int, default=None)
    parser.add_argument("--step-angle-quantile", type=float, default=None)
    parser.add_argument(
        "--step-angle-max",
        type=float,
        default=None,
        help="absolute step-angle cap; overrides the quantile rule",
    )
    parser.add_argument("--turning-angle-max", type=float, default=None)
    dashed = parser.add_mutually_exclusive_group()
    dashed.add_argument(
        "--allow-dashed-steps", dest="allow_dashed_steps", action="store_true", default=None
    )
    dashed.add_argument(
        "--no-dashed-steps", dest="allow_dashed_steps", action="store_false"
    )
    parser.add_argument(
        "--track",
        action="append",
        default=None,
        metavar="SURFACE",
        help="surface form to follow (repeatable)",
    )
    parser.add_argument(
        "--pair",
        action="append",
        type=_parse_pair,
        default=None,
        metavar="I:J",
        help="exact time pair to check (repeatable; replaces the adjacent default)",
    )
    parser.add_argument(
        "--extra-pair",
        action="append",
        type=_parse_pair,
        default=None,
        metavar="I:J",
        help="time pair to check in addition to adjacent ones (repeatable)",
    )
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--pca-dims", type=int, default=None)
    parser.add_argument("--max-logged-attempts", type=int, default=None)


def _load_config(args: argparse.Namespace) -> RunConfig:
    path = getattr(args, "config", None)
    if path is None:
        env = os.environ.get(CONFIG_ENV_VAR)
        if env:
            path = Path(env)
    if path is None:
        config = RunConfig()
    else:
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise TraceFormatError(f"cannot read config {path}: {exc}") from exc
        config = config_from_dict(data)
    return _apply_flags(config, args)


def _apply_flags(config: RunConfig, args: argparse.Namespace) -> RunConfig:
    policy_updates = {}
    for name in (
        "max_hops",
        "step_angle_quantile",
        "step_angle_max",
        "turning_angle_max",
        "allow_dashed_steps",
    ):
        value = getattr(args, name, None)
        if value is not None:
            policy_updates[name] = value
    if policy_updates:
        config = replace(config, policy=replace(config.policy, **policy_updates))

    updates = {}
    if getattr(args, "radius_quantile", None) is not None:
        updates["radius_quantile"] = args.radius_quantile
    if getattr(args, "track", None):
        updates["tracked_surfaces"] = tuple(args.track)
    if getattr(args, "pair", None):
        updates["pairs"] = tuple(args.pair)
    if getattr(args, "extra_pair", None):
        updates["extra_pairs"] = tuple(args.extra_pair)
    if getattr(args, "seed", None) is not None:
        updates["seed"] = args.seed
    if getattr(args, "pca_dims", None) is not None:
        updates["pca_dims"] = args.pca_dims
    if getattr(args, "max_logged_attempts", None) is not None:
        updates["max_logged_attempts"] = args.max_logged_attempts
    if updates:
        config = replace(config, **updates)
    return config


def _cmd_validate(args: argparse.Namespace) -> int:
    trace = load_trace(args.trace)
    tokens = sum(len(s.tokens) for s in trace.samples)
    print(
        f"ok: {len(trace.samples)} slice(s), {tokens} token(s), dim {trace.dim}"
    )
    return 0


def _geometry_only_bundle(args: argparse.Namespace) -> RunBundle:
    trace = load_trace(args.trace)
    config = _load_config(args)
    covers = []
    complexes = []
    for sample in trace.samples:
        cover, complex_ = build_slice_geometry(sample, config.radius_quantile)
        covers.append(cover)
        complexes.append(complex_)
    et = build_evolving_text(trace.samples, complexes)
    return RunBundle(
        et=et, covers=tuple(covers), ledgers={}, decisions=(), config=config
    )


def _cmd_build(args: argparse.Namespace) -> int:
    bundle = _geometry_only_bundle(args)
    text = canonical_json(bundle_to_dict(bundle)) + "\n"
    if args.out is None:
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text)
        print(f"wrote {args.out}")
    return 0


def _cmd_run(args: argparse.Namespace) -> int:
    trace = load_trace(args.trace)
    config = _load_config(args)
    bundle = run_pipeline(trace, config)
    written = write_run_outputs(bundle, args.out)
    for line in bundle.decisions:
        print(line)
    for path in written:
        print(f"wrote {path}")
    return 0


def _cmd_export_viz(args: argparse.Namespace) -> int:
    bundle = _geometry_only_bundle(args)
    rows = export_pca(bundle.et, bundle.config.pca_dims)
    text = pca_csv(rows, bundle.config.pca_dims)
    if args.out is None:
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text)
        print(f"wrote {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="semdrift",
        description="Track word-meaning carries and ruptures across text slices.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="check a trace file")
    p_validate.add_argument("trace", type=Path)
    p_validate.set_defaults(func=_cmd_validate)

    p_build = sub.add_parser("build", help="write per-slice geometry as JSON")
    p_build.add_argument("trace", type=Path)
    p_build.add_argument("--out", type=Path, default=None)
    _add_run_flags(p_build)
    p_build.set_defaults(func=_cmd_build)

    p_run = sub.add_parser("run", help="full carry/rupture analysis")
    p_run.add_argument("trace", type=Path)
    p_run.add_argument("--out", type=Path, required=True, help="output directory")
    _add_run_flags(p_run)
    p_run.set_defaults(func=_cmd_run)

    p_viz = sub.add_parser("export-viz", help="write the PCA projection CSV")
    p_viz.add_argument("trace", type=Path)
    p_viz.add_argument("--out", type=Path, default=None)
    _add_run_flags(p_viz)
    p_viz.set_defaults(func=_cmd_export_viz)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DriftError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
