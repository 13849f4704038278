"""Command line entry point: trace-encoder encode."""

from __future__ import annotations

import argparse
import sys

from .dialogue import load_script
from .encode import encode_prefixes, write_trace
from .errors import EncoderError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="trace-encoder")
    sub = parser.add_subparsers(dest="command", required=True)

    encode = sub.add_parser("encode", help="encode a dialogue script")
    encode.add_argument("--script", required=True, help="dialogue JSON file")
    encode.add_argument("--out", required=True, help="trace file to write")
    encode.add_argument(
        "--model",
        default="microsoft/deberta-v3-base",
        help="model name, or 'hash' for the offline backend",
    )
    encode.add_argument("--layer", type=int, default=-2, help="hidden layer, from the end")
    encode.add_argument("--revision", default=None, help="model revision to pin")
    encode.add_argument(
        "--track",
        action="append",
        default=[],
        metavar="SURFACE",
        help="surface form that must stay coverable (repeatable)",
    )
    encode.add_argument(
        "--hash-dim",
        type=int,
        default=16,
        help="embedding width when --model hash",
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        script = load_script(args.script)
        from .backends import make_backend

        backend = make_backend(
            args.model, args.layer, args.revision, hash_dim=args.hash_dim
        )
        trace = encode_prefixes(
            script,
            args.model,
            args.layer,
            backend=backend,
            tracked_surfaces=args.track,
        )
        write_trace(trace, args.out)
    except (EncoderError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    slices = trace["slices"]
    tokens = sum(len(s["tokens"]) for s in slices)
    print(f"wrote {args.out}: {len(slices)} slice(s), {tokens} token(s)")
    return 0
