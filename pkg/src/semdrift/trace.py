"""Reading and writing .trace.json files, and canonical JSON output.

A trace file is the package's input format: per-slice token lists with
surfaces, character spans, and embedding vectors.  Vectors in the file
need not be normalised; parsing projects them onto the unit sphere.

Canonical serialisation (sorted keys, floats at 17 significant digits,
ASCII escapes) makes every emitted file reproducible byte-for-byte, and
re-serialising a parsed canonical file reproduces it exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np

from .errors import TraceFormatError, ZeroVectorError
from .slices import SliceSample, TokenOccurrence
from .geometry import UnitVector, normalize

TRACE_VERSION = "1"
TRACE_SUFFIX = ".trace.json"


def _as_unit(values: Sequence[float]) -> UnitVector:
    # Vectors already unit within tolerance are taken verbatim; dividing
    # them by their own near-1 norm would perturb low bits and break the
    # byte-identical round-trip on canonical files.
    arr = np.asarray(values, dtype=np.float64)
    try:
        return UnitVector(arr)
    except ValueError:
        return normalize(arr)


def canonical_json(value: Any) -> str:
    """Deterministic JSON: sorted keys, 17-significant-digit floats."""
    out: list[str] = []
    _emit(value, out)
    return "".join(out)


def _emit(value: Any, out: list[str]) -> None:
    if value is None:
        out.append("null")
    elif value is True:
        out.append("true")
    elif value is False:
        out.append("false")
    elif isinstance(value, int):
        out.append(str(value))
    elif isinstance(value, float):
        if value != value or value in (float("inf"), float("-inf")):
            raise ValueError("non-finite floats cannot be serialised")
        out.append(format(value, ".17g"))
    elif isinstance(value, str):
        out.append(json.dumps(value))
    elif isinstance(value, Mapping):
        keys = list(value.keys())
        if any(not isinstance(k, str) for k in keys):
            raise TypeError("canonical JSON requires string keys")
        out.append("{")
        for i, k in enumerate(sorted(keys)):
            if i:
                out.append(",")
            out.append(json.dumps(k))
            out.append(":")
            _emit(value[k], out)
        out.append("}")
    elif isinstance(value, (list, tuple)):
        out.append("[")
        for i, item in enumerate(value):
            if i:
                out.append(",")
            _emit(item, out)
        out.append("]")
    else:
        raise TypeError(f"cannot serialise {type(value).__name__}")


@dataclass(frozen=True, eq=False)
class TraceFile:
    """Parsed trace: validated raw structure plus normalised samples."""

    version: str
    dim: int
    samples: tuple[SliceSample, ...]
    encoder: Mapping[str, Any] | None = None


def parse_trace(data: Mapping[str, Any]) -> TraceFile:
    """Validate a trace dict and build normalised slice samples.

    Raises TraceFormatError on structural problems and propagates
    ZeroVectorError (wrapped with context) for unnormalisable vectors.
    """
    if not isinstance(data, Mapping):
        raise TraceFormatError("trace root must be an object")
    for key in ("version", "dim", "slices"):
        if key not in data:
            raise TraceFormatError(f"trace is missing {key!r}")
    version = data["version"]
    if not isinstance(version, str):
        raise TraceFormatError("version must be a string")
    dim = data["dim"]
    if not isinstance(dim, int) or dim < 2:
        raise TraceFormatError(f"dim must be an integer >= 2, got {dim!r}")
    raw_slices = data["slices"]
    if not isinstance(raw_slices, Sequence) or isinstance(raw_slices, (str, bytes)):
        raise TraceFormatError("slices must be an array")
    if not raw_slices:
        raise TraceFormatError("a trace needs at least one slice")

    samples: list[SliceSample] = []
    last_time: int | None = None
    for pos, raw in enumerate(raw_slices):
        if not isinstance(raw, Mapping):
            raise TraceFormatError(f"slice {pos} must be an object")
        try:
            time_index = raw["time_index"]
            raw_tokens = raw["tokens"]
        except KeyError as exc:
            raise TraceFormatError(f"slice {pos} is missing {exc}") from None
        if not isinstance(time_index, int):
            raise TraceFormatError(f"slice {pos}: time_index must be an integer")
        if last_time is not None and time_index <= last_time:
            raise TraceFormatError(
                f"time indices must be strictly increasing, "
                f"{time_index} follows {last_time}"
            )
        last_time = time_index
        tokens = []
        for tok_pos, tok in enumerate(raw_tokens):
            where = f"slice {pos} token {tok_pos}"
            if not isinstance(tok, Mapping):
                raise TraceFormatError(f"{where} must be an object")
            try:
                vector = tok["vector"]
                if len(vector) != dim:
                    raise TraceFormatError(
                        f"{where}: vector length {len(vector)} != dim {dim}"
                    )
                tokens.append(
                    TokenOccurrence(
                        token_id=int(tok["token_id"]),
                        surface=str(tok["surface"]),
                        char_span=(int(tok["char_start"]), int(tok["char_end"])),
                        vector=_as_unit(vector),
                    )
                )
            except KeyError as exc:
                raise TraceFormatError(f"{where} is missing {exc}") from None
            except ZeroVectorError as exc:
                raise ZeroVectorError(f"{where}: {exc}") from exc
            except (TypeError, ValueError) as exc:
                raise TraceFormatError(f"{where}: {exc}") from exc
        try:
            samples.append(SliceSample(time_index=time_index, tokens=tuple(tokens)))
        except ValueError as exc:
            raise TraceFormatError(f"slice {pos}: {exc}") from exc

    encoder = data.get("encoder")
    if encoder is not None and not isinstance(encoder, Mapping):
        raise TraceFormatError("encoder metadata must be an object")
    return TraceFile(
        version=version, dim=dim, samples=tuple(samples), encoder=encoder
    )


def load_trace(path: str | Path) -> TraceFile:
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TraceFormatError(f"{path}: not valid JSON ({exc})") from exc
    return parse_trace(data)


def trace_to_dict(trace: TraceFile) -> dict:
    """Raw-structure view of a trace; vectors are the normalised ones."""
    slices = []
    for sample in trace.samples:
        slices.append(
            {
                "time_index": sample.time_index,
                "tokens": [
                    {
                        "char_end": t.char_span[1],
                        "char_start": t.char_span[0],
                        "surface": t.surface,
                        "token_id": t.token_id,
                        "vector": [float(x) for x in t.vector.coords],
                    }
                    for t in sample.tokens
                ],
            }
        )
    out: dict[str, Any] = {
        "dim": trace.dim,
        "slices": slices,
        "version": trace.version,
    }
    if trace.encoder is not None:
        out["encoder"] = dict(trace.encoder)
    return out


def serialize_trace(trace: TraceFile) -> str:
    """Canonical text for a trace; parse -> serialize round-trips
    byte-identically on files this function wrote."""
    return canonical_json(trace_to_dict(trace)) + "\n"
