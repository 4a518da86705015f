"""Parsing and rendering of reasoning-and-acting dialogue traces.

Two surface grammars normalize into the same turn structure:

* generation grammar: ``User / Thought1 / API Name / API Input / API Result /
  Thought2 / System`` (the name and input arrive on separate lines and are
  fused into one call);
* training grammar: ``User / Thought / Action / Observation / Thought /
  System`` (the call is a single structured-text line).

Labels match case-insensitively at the start of a line, followed by ``:``.
Lines that carry no known label attach to the body of the preceding block,
which keeps multi-line thoughts and stray ``Note:`` lines visible to
downstream checks instead of dropping them.
"""

from __future__ import annotations

import enum
import re
from typing import Any, Dict, List, Sequence, Tuple

from .calls import parse_call, parse_literal, render_call, render_value
from .errors import LintWarning, ParseError
from .model import ApiCall, FunctionRegistry, ReactDialogue, ReactTurn


class EmptyTrace(ParseError):
    """The text contains no user line at all."""


class TruncatedTurn(ParseError):
    """A turn stops before its required trailing blocks (observation/system)."""


class BlockLabel(enum.Enum):
    USER = "User"
    THOUGHT = "Thought"
    THOUGHT1 = "Thought1"
    THOUGHT2 = "Thought2"
    API_NAME = "API Name"
    API_INPUT = "API Input"
    API_RESULT = "API Result"
    ACTION = "Action"
    OBSERVATION = "Observation"
    SYSTEM = "System"


_LABELS_BY_KEY = {label.value.casefold(): label for label in BlockLabel}

# Known labels, longest alternatives first so "Thought1" wins over "Thought".
_LABEL_LINE = re.compile(
    r"^\s*(Thought1|Thought2|Thought|API Name|API Input|API Result|User|Action|Observation|System)\s*:\s?(.*)$",
    re.IGNORECASE,
)
# Anything else shaped like "Word:" is an unknown label worth a warning.
_UNKNOWN_LABEL_LINE = re.compile(r"^\s*([A-Za-z][A-Za-z0-9 _-]{0,30}?)\s*:\s")
# Delimiter lines such as [BEGIN OF CONVERSATION HISTORY] are structural noise.
_BRACKET_DELIMITER = re.compile(r"^\s*\[(?:BEGIN|END) OF [^\]]+\]\s*$")

HISTORY_BEGIN = "[BEGIN OF CONVERSATION HISTORY]"
HISTORY_END = "[END OF CONVERSATION HISTORY]"


def _blocks_of(text: str, warnings: List[LintWarning] | None) -> List[List[Tuple[BlockLabel, List[str]]]]:
    """Split raw text into per-turn lists of (label, body lines)."""
    turns: List[List[Tuple[BlockLabel, List[str]]]] = []
    current: List[Tuple[BlockLabel, List[str]]] | None = None
    preamble_warned = False
    for raw in text.splitlines():
        line = raw.rstrip()
        if not line.strip():
            continue
        if _BRACKET_DELIMITER.match(line):
            continue
        m = _LABEL_LINE.match(line)
        if m:
            label = _LABELS_BY_KEY[m.group(1).casefold()]
            body = m.group(2).rstrip()
            if label is BlockLabel.USER:
                current = [(label, [body])]
                turns.append(current)
                continue
            if current is None:
                if warnings is not None:
                    warnings.append(
                        LintWarning(f"{label.value} block before any user line ignored")
                    )
                continue
            current.append((label, [body]))
            continue
        if current is None:
            if not preamble_warned and warnings is not None:
                warnings.append(LintWarning("text before the first user line ignored"))
                preamble_warned = True
            continue
        # Continuation line: attach to the previous block's body.
        if _UNKNOWN_LABEL_LINE.match(line) and warnings is not None:
            warnings.append(
                LintWarning(
                    f"unknown label kept inside previous block: {line.strip()[:40]!r}",
                    turn_index=len(turns) - 1,
                )
            )
        current[-1][1].append(line)
    return turns


def _join_body(lines: Sequence[str]) -> str:
    return "\n".join(lines).strip("\n").rstrip()


_NAME_PREFIX = re.compile(r"\s*([A-Za-z0-9_.]+)")


def _fuse_generation_call(
    name_body: str,
    input_body: str | None,
    turn_index: int,
    warnings: List[LintWarning] | None,
) -> ApiCall:
    """Combine ``API Name`` and ``API Input`` blocks into one call."""
    name_body = name_body.strip()
    base_args: Tuple[Tuple[str, Any], ...] = ()
    if "(" in name_body:
        # The name line may carry a full call or a bare "Name()" suffix.
        try:
            parsed = parse_call(name_body, warnings)
            name = parsed.name
            base_args = parsed.args
        except ParseError:
            name = None
    else:
        name = None
    if name is None:
        m = _NAME_PREFIX.match(name_body)
        if m is None:
            raise ParseError("cannot read API name", turn_index=turn_index)
        name = m.group(1)
    args: Tuple[Tuple[str, Any], ...] = base_args
    if input_body is not None and input_body.strip():
        value = parse_literal(input_body, warnings)
        if isinstance(value, dict):
            args = tuple(value.items())
        elif value == "":
            args = base_args
        else:
            if warnings is not None:
                warnings.append(
                    LintWarning(
                        "API input is not an object; arguments dropped",
                        turn_index=turn_index,
                    )
                )
    return ApiCall(name, args)


def parse_trace(
    text: str,
    registry: "FunctionRegistry | None" = None,
    dialogue_id: str = "",
    warnings: List[LintWarning] | None = None,
) -> ReactDialogue:
    """Parse trace text into a dialogue.

    Raises EmptyTrace when no user line exists, TruncatedTurn when a turn
    stops before its observation or system response, and ParseError (carrying
    the turn index) when an action line fails to parse. Thought blocks are
    prose and salvage as empty strings when missing on the API path; the
    validator, not the parser, judges their quality. The registry is recorded
    as the dialogue's registry_ref; schema conformance is checked downstream.
    """
    turn_blocks = _blocks_of(text, warnings)
    if not turn_blocks:
        raise EmptyTrace("no user line found")
    turns: List[ReactTurn] = []
    for index, blocks in enumerate(turn_blocks):
        turns.append(_normalize_turn(blocks, index, warnings))
    ref = registry.name if registry is not None else ""
    return ReactDialogue(id=dialogue_id, turns=tuple(turns), registry_ref=ref)


def _normalize_turn(
    blocks: List[Tuple[BlockLabel, List[str]]],
    index: int,
    warnings: List[LintWarning] | None,
) -> ReactTurn:
    user = _join_body(blocks[0][1])
    thought1: str | None = None
    thought2: str | None = None
    action: ApiCall | None = None
    api_name_body: str | None = None
    api_input_body: str | None = None
    observation: Any = None
    have_observation = False
    system: str | None = None
    seen_action = False

    def merge(slot: str | None, body: str) -> str:
        return body if slot is None else f"{slot}\n{body}"

    for label, body_lines in blocks[1:]:
        body = _join_body(body_lines)
        if label is BlockLabel.USER:  # unreachable: USER starts a new turn
            continue
        if label in (BlockLabel.THOUGHT, BlockLabel.THOUGHT1, BlockLabel.THOUGHT2):
            if label is BlockLabel.THOUGHT2:
                thought2 = merge(thought2, body)
            elif label is BlockLabel.THOUGHT1:
                thought1 = merge(thought1, body)
            elif seen_action:
                thought2 = merge(thought2, body)
            else:
                thought1 = merge(thought1, body)
            continue
        if label is BlockLabel.ACTION:
            try:
                action = parse_call(body, warnings)
            except ParseError as exc:
                raise ParseError(
                    f"bad action line: {exc}", turn_index=index
                ) from exc
            seen_action = True
            continue
        if label is BlockLabel.API_NAME:
            api_name_body = body
            seen_action = True
            continue
        if label is BlockLabel.API_INPUT:
            api_input_body = body
            continue
        if label in (BlockLabel.API_RESULT, BlockLabel.OBSERVATION):
            try:
                observation = parse_literal(body, warnings)
            except ParseError as exc:
                raise ParseError(
                    f"bad observation literal: {exc}", turn_index=index
                ) from exc
            if observation is None:
                # A literal null would be indistinguishable from "no
                # observation"; keep the raw text instead.
                observation = body.strip()
                if warnings is not None:
                    warnings.append(
                        LintWarning("null observation kept as text", turn_index=index)
                    )
            have_observation = True
            continue
        if label is BlockLabel.SYSTEM:
            system = merge(system, body)
            continue

    if action is None and api_name_body is not None:
        action = _fuse_generation_call(api_name_body, api_input_body, index, warnings)

    if action is not None and not have_observation:
        raise TruncatedTurn("API turn has no observation", turn_index=index)
    if system is None:
        raise TruncatedTurn("turn has no system response", turn_index=index)
    if action is None and have_observation:
        if warnings is not None:
            warnings.append(
                LintWarning("observation without an action dropped", turn_index=index)
            )
        observation = None

    if action is not None:
        thought1 = thought1 or ""
        thought2 = thought2 or ""
    return ReactTurn(
        user=user,
        thought1=thought1,
        action=action,
        observation=observation,
        thought2=None if action is None else thought2,
        system=system,
    )


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------

def _labeled(label: str, body: str) -> List[str]:
    lines = body.split("\n")
    return [f"{label}: {lines[0]}"] + lines[1:]


def render_turn(turn: ReactTurn, include_system: bool = True) -> str:
    """Render one turn in the training grammar (both thoughts as Thought)."""
    lines: List[str] = []
    lines.extend(_labeled("User", turn.user))
    if turn.thought1 is not None:
        lines.extend(_labeled("Thought", turn.thought1))
    if turn.action is not None:
        lines.extend(_labeled("Action", render_call(turn.action)))
        lines.extend(_labeled("Observation", render_value(turn.observation)))
        lines.extend(_labeled("Thought", turn.thought2 or ""))
    if include_system:
        lines.extend(_labeled("System", turn.system))
    return "\n".join(lines)


def render_turn_prefix(turn: ReactTurn, include_api: bool) -> str:
    """Render the pre-response prefix of a turn (sample inputs).

    With ``include_api`` the prefix runs through the second thought; without
    it, only the user line and (when present) the first thought.
    """
    lines: List[str] = []
    lines.extend(_labeled("User", turn.user))
    if turn.thought1 is not None:
        lines.extend(_labeled("Thought", turn.thought1))
    if include_api and turn.action is not None:
        lines.extend(_labeled("Action", render_call(turn.action)))
        lines.extend(_labeled("Observation", render_value(turn.observation)))
        lines.extend(_labeled("Thought", turn.thought2 or ""))
    return "\n".join(lines)


def render_history(
    dialogue: ReactDialogue,
    upto_turn: int,
    include_action_of_last: bool = False,
) -> str:
    """Render the first ``upto_turn`` turns as plain history lines.

    ``include_action_of_last`` additionally appends the next turn's prefix
    through its action, observation, and second thought (no system line),
    which is the shape response-generation contexts need. The returned text
    carries no delimiters; wrap_history adds them.
    """
    if upto_turn < 0 or upto_turn > len(dialogue.turns):
        raise ValueError("upto_turn out of range")
    parts = [render_turn(t) for t in dialogue.turns[:upto_turn]]
    if include_action_of_last and upto_turn < len(dialogue.turns):
        parts.append(render_turn_prefix(dialogue.turns[upto_turn], include_api=True))
    return "\n".join(parts)


def wrap_history(content: str) -> str:
    return f"{HISTORY_BEGIN}\n{content}\n{HISTORY_END}"


# ---------------------------------------------------------------------------
# Structured (de)serialization for dialogue artifacts
# ---------------------------------------------------------------------------

def turn_to_doc(turn: ReactTurn) -> Dict[str, Any]:
    doc: Dict[str, Any] = {"user": turn.user, "system": turn.system}
    if turn.thought1 is not None:
        doc["thought1"] = turn.thought1
    if turn.action is not None:
        doc["action"] = {"name": turn.action.name, "arguments": turn.action.args_dict}
        doc["observation"] = turn.observation
        doc["thought2"] = turn.thought2
    return doc


def turn_from_doc(doc: Dict[str, Any]) -> ReactTurn:
    action = None
    if doc.get("action") is not None:
        action = ApiCall(doc["action"]["name"], tuple(doc["action"].get("arguments", {}).items()))
    return ReactTurn(
        user=doc["user"],
        thought1=doc.get("thought1"),
        action=action,
        observation=doc.get("observation") if action is not None else None,
        thought2=doc.get("thought2") if action is not None else None,
        system=doc["system"],
    )


def dialogue_to_doc(dialogue: ReactDialogue) -> Dict[str, Any]:
    return {
        "id": dialogue.id,
        "registry_ref": dialogue.registry_ref,
        "turns": [turn_to_doc(t) for t in dialogue.turns],
    }


def dialogue_from_doc(doc: Dict[str, Any]) -> ReactDialogue:
    return ReactDialogue(
        id=doc["id"],
        turns=tuple(turn_from_doc(t) for t in doc["turns"]),
        registry_ref=doc.get("registry_ref", ""),
    )
