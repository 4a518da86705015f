"""Automated dialogue validation and the human review protocol.

Four error dimensions are checked per dialogue: undefined function calls,
incorrect argument types, argument hallucination, and low-quality reasoning.
The automatic score is binary: 1 exactly when no dimension flags anything.
Human review scores are binary too, with mandatory feedback on zeros.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Sequence, Tuple

import enum

from .calls import ast_equal, render_value
from .errors import ToolkitError
from .mixer import tokenize
from .model import (
    ABSENT,
    ApiCall,
    FunctionRegistry,
    ReactDialogue,
    ViolationKind,
    validate_call_against_schema,
)
from .rng import Xoshiro256StarStar


class NotEnough(ToolkitError):
    """Requested review sample exceeds the population size."""


class UnknownId(ToolkitError):
    """A human score references a dialogue id outside the reviewed set."""


class InvalidScore(ToolkitError):
    """A human score breaks the review protocol (zero without feedback)."""


class ErrorDimension(enum.Enum):
    UNDEFINED_FUNCTION_CALL = "UndefinedFunctionCall"
    INCORRECT_ARGUMENT_TYPE = "IncorrectArgumentType"
    ARGUMENT_HALLUCINATION = "ArgumentHallucination"
    LOW_QUALITY_REASONING = "LowQualityReasoning"


@dataclass(frozen=True)
class ValidationFlag:
    dimension: ErrorDimension
    turn_index: int
    detail: str


@dataclass(frozen=True)
class ValidationReport:
    dialogue_id: str
    flags: Tuple[ValidationFlag, ...] = ()

    @property
    def auto_score(self) -> int:
        return 1 if not self.flags else 0

    def dimensions(self) -> frozenset:
        return frozenset(f.dimension for f in self.flags)


# Minimum whitespace-token count for a substantive thought.
THOUGHT_TOKEN_FLOOR = 3

# A first thought that waves off API use while the turn still calls one.
_NO_API_NEEDED = re.compile(
    r"\b(?:no|not|don'?t|do not|doesn'?t|won'?t|without)\b[^.!?]*\bapi\b",
    re.IGNORECASE,
)


def _is_grounded(value: str, prefix_text: str, prefix_tokens: set, default) -> bool:
    """A string argument is grounded when it appears in the dialogue prefix.

    Accepted evidence, in order: the schema default for that parameter, a
    case-folded substring hit, or every token of the value appearing among
    the prefix tokens (covers values like two names the user mentioned with
    a word in between).
    """
    if default is not ABSENT and value == default:
        return True
    needle = value.strip().casefold()
    if not needle:
        return True
    if needle in prefix_text:
        return True
    tokens = [t.casefold() for t in tokenize(needle)]
    return bool(tokens) and all(t in prefix_tokens for t in tokens)


def check_dialogue(dialogue: ReactDialogue, registry: FunctionRegistry) -> ValidationReport:
    """Run all four dimension checks over one dialogue.

    Grounding for a turn's arguments sees every earlier turn's user, system,
    and observation text plus the current turn's user line. Thoughts are
    deliberately NOT grounding evidence: an invented value restated in the
    model's own reasoning must still flag. Numeric and boolean values are
    exempt.
    """
    flags: List[ValidationFlag] = []
    prefix_parts: List[str] = []
    previous_action: ApiCall | None = None
    for index, turn in enumerate(dialogue.turns):
        prefix_parts.append(turn.user)
        thought1 = turn.thought1 or ""
        if len(thought1.split()) < THOUGHT_TOKEN_FLOOR:
            flags.append(
                ValidationFlag(
                    ErrorDimension.LOW_QUALITY_REASONING,
                    index,
                    "first thought empty or below the token floor",
                )
            )
        if turn.action is not None:
            for violation in validate_call_against_schema(turn.action, registry):
                if violation.kind in (
                    ViolationKind.UNKNOWN_FUNCTION,
                    ViolationKind.UNKNOWN_ARGUMENT,
                ):
                    dimension = ErrorDimension.UNDEFINED_FUNCTION_CALL
                else:
                    dimension = ErrorDimension.INCORRECT_ARGUMENT_TYPE
                flags.append(ValidationFlag(dimension, index, violation.message))
            prefix_text = "\n".join(prefix_parts).casefold()
            prefix_tokens = {t.casefold() for t in tokenize(prefix_text)}
            schema = registry.get(turn.action.name)
            for arg_name, value in turn.action.args:
                if not isinstance(value, str):
                    continue
                param = schema.param(arg_name) if schema is not None else None
                default = param.default if param is not None else ABSENT
                if not _is_grounded(value, prefix_text, prefix_tokens, default):
                    flags.append(
                        ValidationFlag(
                            ErrorDimension.ARGUMENT_HALLUCINATION,
                            index,
                            f"argument {arg_name}={value!r} not grounded in the dialogue",
                        )
                    )
            if not (turn.thought2 or "").strip():
                flags.append(
                    ValidationFlag(
                        ErrorDimension.LOW_QUALITY_REASONING,
                        index,
                        "API turn missing its second thought",
                    )
                )
            if _NO_API_NEEDED.search(thought1):
                flags.append(
                    ValidationFlag(
                        ErrorDimension.LOW_QUALITY_REASONING,
                        index,
                        "thought declares no call is needed, yet the turn calls",
                    )
                )
            if previous_action is not None and ast_equal(turn.action, previous_action):
                flags.append(
                    ValidationFlag(
                        ErrorDimension.LOW_QUALITY_REASONING,
                        index,
                        "action repeats the previous turn's call unchanged",
                    )
                )
            previous_action = turn.action
            prefix_parts.append(render_value(turn.observation))
        else:
            previous_action = None
        prefix_parts.append(turn.system)
    return ValidationReport(dialogue.id, tuple(flags))


def check_corpus(
    dialogues: Iterable[ReactDialogue], registry: FunctionRegistry
) -> List[ValidationReport]:
    return [check_dialogue(d, registry) for d in dialogues]


def sample_for_review(
    dialogues: Sequence[ReactDialogue], n: int, seed: int
) -> List[str]:
    """Uniform sample of n dialogue ids, without replacement, deterministic.

    Ids are sorted before sampling so the draw depends only on the id set,
    the size, and the seed, not on input order.
    """
    ids = sorted(d.id for d in dialogues)
    if n > len(ids):
        raise NotEnough(f"cannot sample {n} of {len(ids)} dialogues")
    if n < 0:
        raise ValueError("sample size must be >= 0")
    return Xoshiro256StarStar(seed).sample(ids, n)


# ---------------------------------------------------------------------------
# Human review
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HumanScore:
    """One reviewer judgment. Score 0 requires nonempty feedback."""

    dialogue_id: str
    score: int
    annotator: str
    feedback: str = ""
    timestamp: str = ""

    def __post_init__(self) -> None:
        if self.score not in (0, 1):
            raise InvalidScore(f"score must be 0 or 1, got {self.score!r}")
        if self.score == 0 and not self.feedback.strip():
            raise InvalidScore("a zero score requires feedback")


@dataclass(frozen=True)
class ReviewSummary:
    auto_reports: int
    human_scored: int
    auto_error_rate: float
    human_error_rate: float
    dimension_counts: Dict[str, int] = field(default_factory=dict)
    feedback: Tuple[str, ...] = ()


def error_rate_report(
    auto: Sequence[ValidationReport], human: Sequence[HumanScore]
) -> ReviewSummary:
    """Aggregate automatic and human review results.

    Error rates are the fraction of zero scores on each side. Dimension
    counts tally dialogues (not individual flags) per dimension. Human
    scores must reference reviewed dialogue ids; anything else raises
    UnknownId.
    """
    known_ids = {r.dialogue_id for r in auto}
    for score in human:
        if score.dialogue_id not in known_ids:
            raise UnknownId(f"score references unknown dialogue {score.dialogue_id!r}")
    dimension_counts: Dict[str, int] = {d.value: 0 for d in ErrorDimension}
    auto_errors = 0
    for report in auto:
        if report.auto_score == 0:
            auto_errors += 1
        for dimension in report.dimensions():
            dimension_counts[dimension.value] += 1
    human_errors = sum(1 for s in human if s.score == 0)
    feedback = tuple(s.feedback for s in human if s.score == 0)
    return ReviewSummary(
        auto_reports=len(auto),
        human_scored=len(human),
        auto_error_rate=auto_errors / len(auto) if auto else 0.0,
        human_error_rate=human_errors / len(human) if human else 0.0,
        dimension_counts=dimension_counts,
        feedback=feedback,
    )
