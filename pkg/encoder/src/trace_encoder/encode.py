"""Growing-prefix encoding: one trace slice per dialogue pair.

Slice i encodes the whole conversation up to and including response i,
turns joined by single newlines. Because each prefix extends the last
one, and backends are deterministic, the vectors of surviving tokens are
reproduced exactly from slice to slice.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .backends import EncoderBackend, make_backend
from .dialogue import DialogueScript
from .errors import EncoderError, TokenizationMismatchError

TURN_SEPARATOR = "\n"


def prefix_texts(script: DialogueScript) -> list[str]:
    """The concatenated conversation prefix for each complete pair."""
    texts = []
    flat: list[str] = []
    for prompt, response in script.pairs():
        flat.extend((prompt.text, response.text))
        texts.append(TURN_SEPARATOR.join(flat))
    return texts


def _check_coverage(
    text: str, spans: Sequence[tuple[int, int]], surfaces: Sequence[str]
) -> None:
    # Latest-use convention: the last character of the last occurrence
    # must sit inside some span, otherwise the word cannot be anchored.
    for surface in surfaces:
        found = text.rfind(surface)
        if found < 0:
            continue
        last = found + len(surface) - 1
        if not any(start <= last < end for start, end in spans):
            raise TokenizationMismatchError(
                f"no token span covers the final character of {surface!r}"
                f" at offset {last}"
            )


def encode_prefixes(
    script: DialogueScript,
    model_name: str = "microsoft/deberta-v3-base",
    layer_offset: int = -2,
    *,
    backend: EncoderBackend | None = None,
    revision: str | None = None,
    tracked_surfaces: Sequence[str] = (),
) -> dict[str, Any]:
    """Encode every pair prefix of a script into a trace-file dict.

    The backend defaults to the named model; pass one explicitly to reuse
    loaded weights across calls. tracked_surfaces, when given, are
    coverage-checked on every slice.

    Raises
    ------
    ModelLoadFailureError
        If the named model cannot be loaded.
    TokenizationMismatchError
        If a tracked surface's last occurrence ends outside all spans.
    """
    if backend is None:
        backend = make_backend(model_name, layer_offset, revision)
    slices = []
    for pair_index, text in enumerate(prefix_texts(script), start=1):
        spans, rows = backend.encode(text)
        norms = np.linalg.norm(rows, axis=1) if len(spans) else np.empty(0)
        if np.any(norms == 0.0):
            raise EncoderError(
                f"backend produced a zero vector in slice {pair_index}"
            )
        _check_coverage(text, spans, tracked_surfaces)
        tokens = []
        for token_id, ((start, end), row, norm) in enumerate(
            zip(spans, rows, norms)
        ):
            tokens.append(
                {
                    "token_id": token_id,
                    "surface": text[start:end],
                    "char_start": start,
                    "char_end": end,
                    "vector": [float(x) for x in row / norm],
                }
            )
        slices.append({"time_index": pair_index, "tokens": tokens})
    return {
        "version": "1",
        "dim": backend.dim,
        "slices": slices,
        "encoder": backend.describe(),
    }


def write_trace(trace: dict[str, Any], path: str | Path) -> None:
    """Write a trace dict as UTF-8 JSON with sorted keys."""
    Path(path).write_text(
        json.dumps(trace, sort_keys=True, indent=1) + "\n", encoding="utf-8"
    )
