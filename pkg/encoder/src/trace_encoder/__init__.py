"""Encode dialogue scripts into trace files of contextual token vectors.

Each complete (prompt, response) pair contributes one slice holding the
whole conversation so far, so downstream consumers can compare a token's
context across growing prefixes.
"""

from .backends import (
    EncoderBackend,
    HashBackend,
    HuggingFaceBackend,
    make_backend,
)
from .dialogue import DialogueScript, Turn, load_script, script_from_dict
from .encode import encode_prefixes, prefix_texts, write_trace
from .errors import (
    EncoderError,
    ModelLoadFailureError,
    ScriptFormatError,
    TokenizationMismatchError,
)

__version__ = "0.1.0"

__all__ = [
    "DialogueScript",
    "EncoderBackend",
    "EncoderError",
    "HashBackend",
    "HuggingFaceBackend",
    "ModelLoadFailureError",
    "ScriptFormatError",
    "TokenizationMismatchError",
    "Turn",
    "encode_prefixes",
    "load_script",
    "make_backend",
    "prefix_texts",
    "script_from_dict",
    "write_trace",
]
