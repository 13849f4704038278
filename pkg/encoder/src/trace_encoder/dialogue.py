"""Dialogue scripts: alternating prompt/response turns.

A script is an ordered list of turns that starts with a prompt and
alternates strictly. Consecutive (prompt, response) pairs are the unit
the encoder slices by; a trailing prompt with no response yet completes
no pair and is never encoded.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping

from .errors import ScriptFormatError

PROMPT = "prompt"
RESPONSE = "response"


@dataclass(frozen=True)
class Turn:
    role: str
    text: str

    def __post_init__(self) -> None:
        if self.role not in (PROMPT, RESPONSE):
            raise ScriptFormatError(f"unknown role {self.role!r}")
        if not isinstance(self.text, str):
            raise ScriptFormatError("turn text must be a string")


@dataclass(frozen=True)
class DialogueScript:
    """Validated turn list. Construction enforces the alternation rule."""

    turns: tuple[Turn, ...]

    def __post_init__(self) -> None:
        if not self.turns:
            raise ScriptFormatError("script has no turns")
        for index, turn in enumerate(self.turns):
            expected = PROMPT if index % 2 == 0 else RESPONSE
            if turn.role != expected:
                raise ScriptFormatError(
                    f"turn {index} has role {turn.role!r}, expected {expected!r}"
                )

    def pairs(self) -> tuple[tuple[Turn, Turn], ...]:
        """Complete (prompt, response) pairs, in order."""
        full = len(self.turns) // 2
        return tuple(
            (self.turns[2 * i], self.turns[2 * i + 1]) for i in range(full)
        )


def script_from_dict(data: Mapping[str, Any]) -> DialogueScript:
    if not isinstance(data, Mapping) or "turns" not in data:
        raise ScriptFormatError("script must be an object with a 'turns' list")
    raw_turns = data["turns"]
    if not isinstance(raw_turns, list):
        raise ScriptFormatError("'turns' must be a list")
    turns = []
    for index, raw in enumerate(raw_turns):
        if not isinstance(raw, Mapping):
            raise ScriptFormatError(f"turn {index} is not an object")
        missing = {"role", "text"} - set(raw)
        if missing:
            raise ScriptFormatError(
                f"turn {index} lacks {', '.join(sorted(missing))}"
            )
        turns.append(Turn(role=raw["role"], text=raw["text"]))
    return DialogueScript(turns=tuple(turns))


def load_script(path: str | Path) -> DialogueScript:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ScriptFormatError(f"{path}: not valid JSON ({exc})") from exc
    return script_from_dict(data)
