"""Encoder backends: text in, token spans and vectors out.

A backend maps a string to (spans, matrix): spans are (char_start,
char_end) pairs into the input, one per kept token, and the matrix holds
one row per span. Special tokens and empty spans never appear in the
output. Backends must be deterministic for a fixed input.
"""

from __future__ import annotations

import hashlib
import re
from typing import Protocol

import numpy as np

from .errors import ModelLoadFailureError

HASH_MODEL_NAME = "hash"


class EncoderBackend(Protocol):
    dim: int

    def encode(self, text: str) -> tuple[list[tuple[int, int]], np.ndarray]:
        ...

    def describe(self) -> dict[str, object]:
        ...


_WORD_RE = re.compile(r"\w+|[^\w\s]", re.UNICODE)


class HashBackend:
    """Offline stand-in: context-hashed pseudo-embeddings.

    Tokens are maximal word or single punctuation matches. Each vector is
    seeded by the full text up to the token's end, so re-encoding any
    prefix reproduces the same rows while distinct contexts get
    independent directions. No model weights involved; useful for
    plumbing tests and air-gapped runs.
    """

    def __init__(self, dim: int = 16) -> None:
        if dim < 2:
            raise ValueError(f"dim must be >= 2, got {dim}")
        self.dim = dim

    def encode(self, text: str) -> tuple[list[tuple[int, int]], np.ndarray]:
        spans = [(m.start(), m.end()) for m in _WORD_RE.finditer(text)]
        rows = np.empty((len(spans), self.dim))
        for row, (_, end) in enumerate(spans):
            digest = hashlib.sha256(text[:end].encode("utf-8")).digest()
            rng = np.random.default_rng(int.from_bytes(digest[:8], "big"))
            rows[row] = rng.standard_normal(self.dim)
        return spans, rows

    def describe(self) -> dict[str, object]:
        return {"backend": HASH_MODEL_NAME, "dim": self.dim}


class HuggingFaceBackend:
    """Frozen transformer encoder read out at a fixed hidden layer.

    layer_offset indexes the hidden-state stack from the end, so -1 is
    the final layer and -2 the penultimate one. Spans come from the fast
    tokenizer's offset map; special tokens and zero-width spans are
    dropped so every kept row points at real characters.
    """

    def __init__(
        self,
        model_name: str,
        layer_offset: int = -2,
        revision: str | None = None,
    ) -> None:
        try:
            import torch
            from transformers import AutoModel, AutoTokenizer
        except ImportError as exc:
            raise ModelLoadFailureError(
                f"transformers/torch not installed: {exc}"
            ) from exc
        try:
            self._tokenizer = AutoTokenizer.from_pretrained(
                model_name, revision=revision, use_fast=True
            )
            self._model = AutoModel.from_pretrained(
                model_name, revision=revision, output_hidden_states=True
            )
        except Exception as exc:
            raise ModelLoadFailureError(
                f"cannot load {model_name!r}"
                f"{f' at {revision!r}' if revision else ''}: {exc}"
            ) from exc
        self._model.eval()
        self._torch = torch
        self.model_name = model_name
        self.revision = revision
        self.layer_offset = layer_offset
        self.dim = int(self._model.config.hidden_size)
        depth = int(self._model.config.num_hidden_layers) + 1
        if not -depth <= layer_offset <= -1:
            raise ValueError(
                f"layer_offset {layer_offset} outside [-{depth}, -1]"
            )

    def encode(self, text: str) -> tuple[list[tuple[int, int]], np.ndarray]:
        encoding = self._tokenizer(
            text,
            return_offsets_mapping=True,
            return_special_tokens_mask=True,
            return_tensors="pt",
        )
        offsets = encoding.pop("offset_mapping")[0].tolist()
        special = encoding.pop("special_tokens_mask")[0].tolist()
        with self._torch.no_grad():
            output = self._model(**encoding)
        hidden = output.hidden_states[self.layer_offset][0].cpu().numpy()
        spans: list[tuple[int, int]] = []
        keep: list[int] = []
        for index, ((start, end), is_special) in enumerate(zip(offsets, special)):
            if is_special or end <= start:
                continue
            spans.append((int(start), int(end)))
            keep.append(index)
        return spans, hidden[keep]

    def describe(self) -> dict[str, object]:
        return {
            "backend": "huggingface",
            "model": self.model_name,
            "revision": self.revision or "main",
            "layer_offset": self.layer_offset,
            "dim": self.dim,
        }


def make_backend(
    model_name: str,
    layer_offset: int = -2,
    revision: str | None = None,
    hash_dim: int = 16,
) -> EncoderBackend:
    """Backend for a model name; the name "hash" selects the offline one."""
    if model_name == HASH_MODEL_NAME:
        return HashBackend(dim=hash_dim)
    return HuggingFaceBackend(model_name, layer_offset, revision)
