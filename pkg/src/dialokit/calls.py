"""Parsing, rendering, and structural comparison of function calls.

Two surfaces are covered: the structured-text form ``Name(arg='value', n=2)``
used inside dialogue traces, and the JSON tool-call list used by
function-calling samples. Both parse into ApiCall.

The value grammar accepts single- or double-quoted strings, integers,
decimals, true/false, null/None, bracketed lists, and brace-delimited
objects. Generated traces sometimes drop the quotes around a string value;
those bare tokens are salvaged as strings (up to the next delimiter) with a
LintWarning rather than rejected, so one sloppy value does not discard an
otherwise good dialogue.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Any, Dict, List, Sequence, Tuple

from .errors import LintWarning, ParseError
from .model import ApiCall

_IDENT = re.compile(r"[A-Za-z0-9_.]+")
_NUMBER = re.compile(r"-?(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?")
_WORD = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")

_ESCAPES = {"\\": "\\", "'": "'", '"': '"', "n": "\n", "t": "\t", "r": "\r"}
_ESCAPE_OUT = {"\\": "\\\\", "'": "\\'", "\n": "\\n", "\t": "\\t", "\r": "\\r"}


@dataclass(frozen=True)
class CallMatchPolicy:
    """Equivalence policy for call comparison."""

    name_case_sensitive: bool = True
    string_trim: bool = True
    order_insensitive_sets: bool = True


DEFAULT_POLICY = CallMatchPolicy()


class _Scanner:
    """Cursor over call/literal text with position-carrying errors."""

    def __init__(self, text: str, warnings: List[LintWarning] | None) -> None:
        self.text = text
        self.pos = 0
        self.warnings = warnings

    def error(self, message: str) -> ParseError:
        return ParseError(message, position=self.pos)

    def warn(self, message: str, position: int) -> None:
        if self.warnings is not None:
            self.warnings.append(LintWarning(message, position=position))

    def at_end(self) -> bool:
        return self.pos >= len(self.text)

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos] in " \t\r\n":
            self.pos += 1

    def expect(self, ch: str) -> None:
        if self.peek() != ch:
            raise self.error(f"expected {ch!r}")
        self.pos += 1

    def match_regex(self, pattern: re.Pattern[str]) -> str | None:
        m = pattern.match(self.text, self.pos)
        if m is None:
            return None
        self.pos = m.end()
        return m.group(0)

    # -- values ------------------------------------------------------------

    def parse_value(self, stops: str) -> Any:
        """Parse one value; ``stops`` are the delimiters that may follow it.

        Bare (unquoted) tokens fall back to strings, consuming text up to the
        next stop character (or, with no stops, the rest of the input).
        """
        self.skip_ws()
        ch = self.peek()
        if ch in "'\"":
            return self.parse_quoted()
        if ch == "[":
            return self.parse_list()
        if ch == "{":
            return self.parse_object()
        start = self.pos
        number = self.match_regex(_NUMBER)
        if number is not None and self._cleanly_delimited(stops):
            if re.fullmatch(r"-?\d+", number):
                return int(number)
            return float(number)
        self.pos = start
        word = self.match_regex(_WORD)
        if word is not None and self._cleanly_delimited(stops):
            if word in ("true", "True"):
                return True
            if word in ("false", "False"):
                return False
            if word in ("null", "None"):
                return None
        # Something like "19 minutes" or "Don Sherri": salvage as a string.
        self.pos = start
        return self.parse_bare(stops)

    def _cleanly_delimited(self, stops: str) -> bool:
        """True when only whitespace separates the cursor from a stop or EOF."""
        probe = self.pos
        while probe < len(self.text) and self.text[probe] in " \t\r\n":
            probe += 1
        return probe >= len(self.text) or self.text[probe] in stops

    def parse_bare(self, stops: str) -> str:
        start = self.pos
        while not self.at_end():
            ch = self.text[self.pos]
            if ch in stops:
                break
            if stops and ch == "\n":
                break
            self.pos += 1
        raw = self.text[start:self.pos].strip()
        if not raw:
            raise ParseError("expected a value", position=start)
        self.warn(f"unquoted value {raw!r} treated as a string", start)
        return raw

    def parse_quoted(self) -> str:
        quote = self.peek()
        self.pos += 1
        out: List[str] = []
        while True:
            if self.at_end():
                raise self.error("unterminated string")
            ch = self.text[self.pos]
            if ch == "\\":
                if self.pos + 1 >= len(self.text):
                    raise self.error("dangling escape")
                nxt = self.text[self.pos + 1]
                out.append(_ESCAPES.get(nxt, nxt))
                self.pos += 2
                continue
            if ch == quote:
                self.pos += 1
                return "".join(out)
            out.append(ch)
            self.pos += 1

    def parse_list(self) -> List[Any]:
        self.expect("[")
        items: List[Any] = []
        self.skip_ws()
        if self.peek() == "]":
            self.pos += 1
            return items
        while True:
            items.append(self.parse_value(",]"))
            self.skip_ws()
            ch = self.peek()
            if ch == ",":
                self.pos += 1
                continue
            if ch == "]":
                self.pos += 1
                return items
            raise self.error("expected ',' or ']' in list")

    def parse_object(self) -> Dict[str, Any]:
        self.expect("{")
        obj: Dict[str, Any] = {}
        self.skip_ws()
        if self.peek() == "}":
            self.pos += 1
            return obj
        while True:
            self.skip_ws()
            key_pos = self.pos
            if self.peek() in "'\"":
                key = self.parse_quoted()
            else:
                key = self.match_regex(_IDENT) or ""
                if not key:
                    raise self.error("expected an object key")
                self.warn(f"unquoted key {key!r}", key_pos)
            self.skip_ws()
            self.expect(":")
            value = self.parse_value(",}")
            if key in obj:
                raise ParseError(f"duplicate object key {key!r}", position=key_pos)
            obj[key] = value
            self.skip_ws()
            ch = self.peek()
            if ch == ",":
                self.pos += 1
                continue
            if ch == "}":
                self.pos += 1
                return obj
            raise self.error("expected ',' or '}' in object")


def parse_call(text: str, warnings: List[LintWarning] | None = None) -> ApiCall:
    """Parse ``Name(arg=value, ...)`` into an ApiCall.

    Arguments must be named; positional values are rejected. A repeated
    argument name raises DuplicateArg. ParseError carries the character
    position of the failure.
    """
    sc = _Scanner(text, warnings)
    sc.skip_ws()
    name = sc.match_regex(_IDENT)
    if name is None:
        raise sc.error("expected a function name")
    sc.skip_ws()
    sc.expect("(")
    args: List[Tuple[str, Any]] = []
    sc.skip_ws()
    if sc.peek() == ")":
        sc.pos += 1
    else:
        while True:
            sc.skip_ws()
            arg_pos = sc.pos
            arg_name = sc.match_regex(_IDENT)
            if arg_name is None:
                raise sc.error("expected an argument name")
            sc.skip_ws()
            if sc.peek() != "=":
                raise ParseError(
                    f"argument {arg_name!r} has no '=': positional values are not allowed",
                    position=arg_pos,
                )
            sc.pos += 1
            value = sc.parse_value(",)")
            args.append((arg_name, value))
            sc.skip_ws()
            ch = sc.peek()
            if ch == ",":
                sc.pos += 1
                continue
            if ch == ")":
                sc.pos += 1
                break
            raise sc.error("expected ',' or ')'")
    sc.skip_ws()
    if not sc.at_end():
        raise sc.error("unexpected text after call")
    return ApiCall(name, tuple(args))


def parse_literal(text: str, warnings: List[LintWarning] | None = None) -> Any:
    """Parse a standalone value literal (observation bodies, input objects).

    Lenient: quotes may be single or double, object keys may be bare, and an
    unquoted scalar falls back to a string. Unbalanced brackets raise
    ParseError. An empty body parses as the empty string.
    """
    if text.strip() == "":
        return ""
    sc = _Scanner(text, warnings)
    value = sc.parse_value("")
    sc.skip_ws()
    if not sc.at_end():
        raise sc.error("unexpected trailing content after literal")
    return value


def render_value(value: Any) -> str:
    """Render a canonical value in trace style (single-quoted strings)."""
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if value != value or value in (float("inf"), float("-inf")):
            raise ValueError("non-finite numbers are not renderable")
        return repr(value)
    if isinstance(value, str):
        escaped = "".join(_ESCAPE_OUT.get(ch, ch) for ch in value)
        return f"'{escaped}'"
    if isinstance(value, list):
        return "[" + ", ".join(render_value(v) for v in value) + "]"
    if isinstance(value, dict):
        inner = ", ".join(f"{render_value(str(k))}: {render_value(v)}" for k, v in value.items())
        return "{" + inner + "}"
    raise TypeError(f"not a canonical value: {type(value).__name__}")


def render_call(call: ApiCall) -> str:
    """Inverse of parse_call: ``parse_call(render_call(c)) == c``."""
    inner = ", ".join(f"{k}={render_value(v)}" for k, v in call.args)
    return f"{call.name}({inner})"


def parse_toolcall_json(text: str) -> List[ApiCall]:
    """Parse a JSON tool-call list; the literal empty list means abstain."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", position=exc.pos) from exc
    if not isinstance(doc, list):
        raise ParseError("tool-call document must be a list")
    calls: List[ApiCall] = []
    for i, item in enumerate(doc):
        if not isinstance(item, dict) or not isinstance(item.get("name"), str):
            raise ParseError(f"tool call {i} must be an object with a string 'name'")
        arguments = item.get("arguments", {})
        if not isinstance(arguments, dict):
            raise ParseError(f"tool call {i} arguments must be an object")
        calls.append(ApiCall(item["name"], tuple(arguments.items())))
    return calls


def render_toolcall_json(calls: Sequence[ApiCall]) -> str:
    doc = [{"name": c.name, "arguments": c.args_dict} for c in calls]
    return json.dumps(doc, ensure_ascii=False)


def _values_equal(a: Any, b: Any, policy: CallMatchPolicy) -> bool:
    if isinstance(a, bool) or isinstance(b, bool):
        return isinstance(a, bool) and isinstance(b, bool) and a == b
    if isinstance(a, (int, float)) and isinstance(b, (int, float)):
        return a == b
    if isinstance(a, str) and isinstance(b, str):
        if policy.string_trim:
            return a.strip() == b.strip()
        return a == b
    if isinstance(a, list) and isinstance(b, list):
        return len(a) == len(b) and all(
            _values_equal(x, y, policy) for x, y in zip(a, b)
        )
    if isinstance(a, dict) and isinstance(b, dict):
        if set(a) != set(b):
            return False
        return all(_values_equal(a[k], b[k], policy) for k in a)
    if a is None or b is None:
        return a is None and b is None
    return False


def ast_equal(a: ApiCall, b: ApiCall, policy: CallMatchPolicy = DEFAULT_POLICY) -> bool:
    """Structural call equivalence.

    Argument order never matters; integers and decimals compare numerically
    (2 == 2.0); booleans never equal numbers; lists are order-sensitive;
    objects compare key-wise. String trimming and function-name case follow
    the policy.
    """
    if policy.name_case_sensitive:
        if a.name != b.name:
            return False
    elif a.name.casefold() != b.name.casefold():
        return False
    a_args, b_args = a.args_dict, b.args_dict
    if set(a_args) != set(b_args):
        return False
    return all(_values_equal(a_args[k], b_args[k], policy) for k in a_args)


def match_call_sets(
    predicted: Sequence[ApiCall],
    gold: Sequence[ApiCall],
    policy: CallMatchPolicy = DEFAULT_POLICY,
) -> bool:
    """True when predicted and gold calls pair off one-to-one under ast_equal.

    Order-insensitive by default (a perfect matching over the two multisets);
    with ``order_insensitive_sets`` off, calls must match positionally.
    """
    if len(predicted) != len(gold):
        return False
    if not policy.order_insensitive_sets:
        return all(ast_equal(p, g, policy) for p, g in zip(predicted, gold))
    used = [False] * len(gold)

    def assign(i: int) -> bool:
        if i == len(predicted):
            return True
        for j in range(len(gold)):
            if not used[j] and ast_equal(predicted[i], gold[j], policy):
                used[j] = True
                if assign(i + 1):
                    return True
                used[j] = False
        return False

    return assign(0)
