"""Shared exception types and lint warnings."""

from __future__ import annotations

from dataclasses import dataclass


class ToolkitError(Exception):
    """Base class for every error raised by this package."""


class ParseError(ToolkitError):
    """Unrecoverable syntax error in call text, literals, or dialogue traces."""

    def __init__(
        self,
        message: str,
        position: int | None = None,
        turn_index: int | None = None,
    ) -> None:
        self.position = position
        self.turn_index = turn_index
        suffix = ""
        if position is not None:
            suffix += f" at position {position}"
        if turn_index is not None:
            suffix += f" in turn {turn_index}"
        super().__init__(message + suffix)


@dataclass
class LintWarning:
    """Non-fatal irregularity that a parser salvaged instead of rejecting.

    Parsers accept an optional ``warnings`` list and append to it, so callers
    that care (validation, reports) can inspect what was repaired while plain
    callers can ignore the sink entirely.
    """

    message: str
    position: int | None = None
    turn_index: int | None = None
