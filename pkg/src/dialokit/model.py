"""Core data model: canonical values, function schemas, calls, turns, samples.

Canonical values are plain Python values (str, int, float, bool, list, dict,
None). Integers and numbers are distinct kinds; bool is checked before int
everywhere because it subclasses int.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Any, Dict, Iterable, Iterator, List, Mapping, Sequence, Tuple

from .errors import ToolkitError


class DuplicateFunction(ToolkitError):
    """Two schemas in one registry share a name."""


class DuplicateArg(ToolkitError):
    """A call repeats an argument name."""


class BadType(ToolkitError):
    """A schema declares an unknown type token."""


class ValueType(enum.Enum):
    STRING = "string"
    INTEGER = "integer"
    NUMBER = "number"
    BOOLEAN = "boolean"
    LIST = "list"
    OBJECT = "object"


# Accepted type tokens in schema records. Unknown tokens are rejected rather
# than coerced to string: a typo would otherwise silently weaken validation.
TYPE_TOKENS: Mapping[str, ValueType] = {
    "str": ValueType.STRING,
    "string": ValueType.STRING,
    "int": ValueType.INTEGER,
    "integer": ValueType.INTEGER,
    "float": ValueType.NUMBER,
    "number": ValueType.NUMBER,
    "bool": ValueType.BOOLEAN,
    "boolean": ValueType.BOOLEAN,
    "list": ValueType.LIST,
    "dict": ValueType.OBJECT,
    "object": ValueType.OBJECT,
}

# Short tokens used when serializing schemas back out.
TYPE_TOKEN_OUT: Mapping[ValueType, str] = {
    ValueType.STRING: "str",
    ValueType.INTEGER: "int",
    ValueType.NUMBER: "float",
    ValueType.BOOLEAN: "bool",
    ValueType.LIST: "list",
    ValueType.OBJECT: "dict",
}


class _Absent:
    """Singleton marker distinguishing 'no default' from an explicit null."""

    _instance = None

    def __new__(cls) -> "_Absent":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "ABSENT"


ABSENT = _Absent()


def canon_kind(value: Any) -> str:
    """Kind tag of a canonical value: string/integer/number/boolean/list/object/null."""
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "boolean"
    if isinstance(value, int):
        return "integer"
    if isinstance(value, float):
        return "number"
    if isinstance(value, str):
        return "string"
    if isinstance(value, list):
        return "list"
    if isinstance(value, dict):
        return "object"
    raise TypeError(f"not a canonical value: {type(value).__name__}")


def is_canon_value(value: Any) -> bool:
    try:
        kind = canon_kind(value)
    except TypeError:
        return False
    if kind == "list":
        return all(is_canon_value(v) for v in value)
    if kind == "object":
        return all(isinstance(k, str) and is_canon_value(v) for k, v in value.items())
    return True


def conforms(value: Any, expected: ValueType) -> bool:
    """True when a value satisfies a declared type.

    An integer is accepted where a number is declared (no fractional
    information is lost); a float is not accepted where an integer is
    declared. Booleans satisfy only the boolean type.
    """
    if isinstance(value, bool):
        return expected is ValueType.BOOLEAN
    if expected is ValueType.STRING:
        return isinstance(value, str)
    if expected is ValueType.INTEGER:
        return isinstance(value, int)
    if expected is ValueType.NUMBER:
        return isinstance(value, (int, float))
    if expected is ValueType.BOOLEAN:
        return False
    if expected is ValueType.LIST:
        return isinstance(value, list)
    if expected is ValueType.OBJECT:
        return isinstance(value, dict)
    raise TypeError(f"unknown value type {expected!r}")


@dataclass(frozen=True)
class ParamSpec:
    """One declared parameter of a function schema."""

    name: str
    description: str
    value_type: ValueType
    required: bool
    default: Any = ABSENT

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("parameter name must be nonempty")
        if self.required and self.default is not ABSENT:
            raise ValueError(f"required parameter {self.name!r} cannot carry a default")

    @property
    def has_default(self) -> bool:
        return self.default is not ABSENT


@dataclass(frozen=True)
class FunctionSchema:
    name: str
    description: str
    params: Tuple[ParamSpec, ...] = ()

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("function name must be nonempty")
        seen = set()
        for p in self.params:
            if p.name in seen:
                raise DuplicateArg(f"schema {self.name!r} repeats parameter {p.name!r}")
            seen.add(p.name)

    def param(self, name: str) -> ParamSpec | None:
        for p in self.params:
            if p.name == name:
                return p
        return None

    @property
    def required_params(self) -> Tuple[ParamSpec, ...]:
        return tuple(p for p in self.params if p.required)


@dataclass(frozen=True)
class FunctionRegistry:
    """Immutable name -> schema lookup. Lookups on unknown names fail closed."""

    schemas: Tuple[FunctionSchema, ...] = ()
    name: str = ""

    def __post_init__(self) -> None:
        seen = set()
        for s in self.schemas:
            if s.name in seen:
                raise DuplicateFunction(f"duplicate function {s.name!r}")
            seen.add(s.name)
        object.__setattr__(self, "_by_name", {s.name: s for s in self.schemas})

    def get(self, name: str) -> FunctionSchema | None:
        return self._by_name.get(name)  # type: ignore[attr-defined]

    def __contains__(self, name: str) -> bool:
        return name in self._by_name  # type: ignore[attr-defined]

    def __len__(self) -> int:
        return len(self.schemas)

    def __iter__(self) -> Iterator[FunctionSchema]:
        return iter(self.schemas)

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(s.name for s in self.schemas)


def _normalize_args(args: Any) -> Tuple[Tuple[str, Any], ...]:
    if isinstance(args, Mapping):
        pairs = tuple(args.items())
    else:
        pairs = tuple((k, v) for k, v in args)
    seen = set()
    for name, _ in pairs:
        if not isinstance(name, str):
            raise TypeError("argument names must be strings")
        if name in seen:
            raise DuplicateArg(f"argument {name!r} given more than once")
        seen.add(name)
    return pairs


@dataclass(frozen=True)
class ApiCall:
    """A function call: name plus ordered named arguments (names unique)."""

    name: str
    args: Tuple[Tuple[str, Any], ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "args", _normalize_args(self.args))

    @property
    def args_dict(self) -> Dict[str, Any]:
        return dict(self.args)

    def arg(self, name: str, default: Any = None) -> Any:
        for k, v in self.args:
            if k == name:
                return v
        return default


class DialogueState:
    """Set of (domain, slot, value) triples; one value per (domain, slot)."""

    __slots__ = ("_values",)

    def __init__(self, triples: Iterable[Tuple[str, str, str]] = ()) -> None:
        values: Dict[Tuple[str, str], str] = {}
        for domain, slot, value in triples:
            key = (domain, slot)
            if key in values and values[key] != value:
                raise ValueError(f"conflicting values for {domain}.{slot}")
            values[key] = value
        self._values = values

    def triples(self) -> frozenset:
        return frozenset((d, s, v) for (d, s), v in self._values.items())

    def with_triple(self, domain: str, slot: str, value: str) -> "DialogueState":
        return DialogueState(list(self.triples()) + [(domain, slot, value)])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DialogueState):
            return NotImplemented
        return self._values == other._values

    def __hash__(self) -> int:
        return hash(self.triples())

    def __len__(self) -> int:
        return len(self._values)

    def __repr__(self) -> str:
        inner = ", ".join(f"{d}.{s}={v!r}" for (d, s), v in sorted(self._values.items()))
        return f"DialogueState({inner})"


@dataclass(frozen=True)
class ReactTurn:
    """One dialogue turn.

    API path: action plus both thoughts and an observation are all present.
    Direct path: no action, no observation, no second thought; a single
    optional thought may precede the system response.
    """

    user: str
    thought1: str | None = None
    action: ApiCall | None = None
    observation: Any = None
    thought2: str | None = None
    system: str = ""

    def __post_init__(self) -> None:
        if self.action is not None:
            if self.thought1 is None or self.thought2 is None or self.observation is None:
                raise ValueError(
                    "API turn requires thought1, observation, and thought2"
                )
        else:
            if self.observation is not None or self.thought2 is not None:
                raise ValueError(
                    "turn without an action cannot carry an observation or second thought"
                )

    @property
    def has_action(self) -> bool:
        return self.action is not None


@dataclass(frozen=True)
class ReactDialogue:
    id: str
    turns: Tuple[ReactTurn, ...]
    registry_ref: str = ""

    def __post_init__(self) -> None:
        if not self.turns:
            raise ValueError("dialogue must contain at least one turn")


class DomainTag(enum.Enum):
    TOD = "TOD"
    LA = "LA"
    CRA_ACTION = "CRA_action"
    CRA_RESPONSE = "CRA_response"


@dataclass(frozen=True)
class InstructionSample:
    instruction: str
    input: str
    output: str
    domain_tag: DomainTag

    def __post_init__(self) -> None:
        if not self.output:
            raise ValueError("sample output must be nonempty")


# ---------------------------------------------------------------------------
# Registry loading / serialization
# ---------------------------------------------------------------------------

def _param_from_record(fn_name: str, pname: str, record: Mapping[str, Any]) -> ParamSpec:
    token = record.get("type")
    if not isinstance(token, str) or token not in TYPE_TOKENS:
        raise BadType(f"function {fn_name!r} parameter {pname!r} has unknown type {token!r}")
    # A parameter is required exactly when the record carries no default.
    # Defaults are stored verbatim: source corpora carry defaults whose kind
    # disagrees with the declared type, and round-tripping must preserve them.
    if "default" in record:
        return ParamSpec(
            name=pname,
            description=str(record.get("description", "")),
            value_type=TYPE_TOKENS[token],
            required=False,
            default=record["default"],
        )
    return ParamSpec(
        name=pname,
        description=str(record.get("description", "")),
        value_type=TYPE_TOKENS[token],
        required=True,
    )


def schema_from_record(record: Mapping[str, Any]) -> FunctionSchema:
    """Build one schema from a tool record ({name, description, parameters})."""
    name = record.get("name")
    if not isinstance(name, str) or not name:
        raise ValueError("tool record missing name")
    raw_params = record.get("parameters", {}) or {}
    params = tuple(
        _param_from_record(name, pname, prec) for pname, prec in raw_params.items()
    )
    return FunctionSchema(name=name, description=str(record.get("description", "")), params=params)


def load_registry(doc: Sequence[Mapping[str, Any]], name: str = "") -> FunctionRegistry:
    """Load a registry from a list of tool records.

    Errors: DuplicateFunction on repeated names, BadType on unknown type
    tokens. Parameter order is preserved from the source document.
    """
    schemas = tuple(schema_from_record(rec) for rec in doc)
    return FunctionRegistry(schemas=schemas, name=name)


def schema_to_record(schema: FunctionSchema) -> Dict[str, Any]:
    params: Dict[str, Any] = {}
    for p in schema.params:
        rec: Dict[str, Any] = {
            "description": p.description,
            "type": TYPE_TOKEN_OUT[p.value_type],
        }
        if p.has_default:
            rec["default"] = p.default
        params[p.name] = rec
    return {"name": schema.name, "description": schema.description, "parameters": params}


def schemas_to_doc(schemas: Iterable[FunctionSchema]) -> List[Dict[str, Any]]:
    return [schema_to_record(s) for s in schemas]


_COMPACT_LINE_SPLIT = ("(", ")")


def load_compact_registry(text: str, name: str = "") -> FunctionRegistry:
    """Load a registry from compact signature lines.

    Accepted line shapes: ``FindBus(from_location, to_location)`` with an
    optional ``12.`` numbering prefix. These signatures carry no types or
    defaults, so every parameter is ingested as an optional string: the
    corpora that use this shape explicitly allow calls to skip arguments,
    and treating them as required would flag every such call.
    """
    schemas: List[FunctionSchema] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        # strip "12." style numbering
        head = line.split(".", 1)
        if len(head) == 2 and head[0].strip().isdigit():
            line = head[1].strip()
        if "(" not in line or not line.endswith(")"):
            raise ValueError(f"not a compact signature: {raw!r}")
        fn_name, _, rest = line.partition("(")
        fn_name = fn_name.strip()
        inner = rest[:-1].strip()
        params: List[ParamSpec] = []
        if inner:
            for pname in inner.split(","):
                pname = pname.strip()
                if not pname:
                    raise ValueError(f"empty parameter name in {raw!r}")
                params.append(
                    ParamSpec(pname, "", ValueType.STRING, required=False)
                )
        schemas.append(FunctionSchema(name=fn_name, description="", params=tuple(params)))
    return FunctionRegistry(schemas=tuple(schemas), name=name)


def compact_signature(schema: FunctionSchema) -> str:
    return f"{schema.name}({', '.join(p.name for p in schema.params)})"


# ---------------------------------------------------------------------------
# Schema validation
# ---------------------------------------------------------------------------

class ViolationKind(enum.Enum):
    UNKNOWN_FUNCTION = "UnknownFunction"
    UNKNOWN_ARGUMENT = "UnknownArgument"
    WRONG_TYPE = "WrongType"
    MISSING_REQUIRED = "MissingRequired"


@dataclass(frozen=True)
class SchemaViolation:
    kind: ViolationKind
    function: str
    argument: str | None = None
    message: str = ""


def validate_call_against_schema(
    call: ApiCall, registry: FunctionRegistry
) -> List[SchemaViolation]:
    """Check one call against the registry; empty list means conformant.

    Violations are reported in a deterministic order: unknown arguments and
    type mismatches in call order, then missing required parameters in schema
    order. An unknown function short-circuits (its arguments cannot be
    judged without a schema).
    """
    schema = registry.get(call.name)
    if schema is None:
        return [
            SchemaViolation(
                ViolationKind.UNKNOWN_FUNCTION,
                call.name,
                message=f"function {call.name!r} is not defined",
            )
        ]
    violations: List[SchemaViolation] = []
    for arg_name, value in call.args:
        param = schema.param(arg_name)
        if param is None:
            violations.append(
                SchemaViolation(
                    ViolationKind.UNKNOWN_ARGUMENT,
                    call.name,
                    arg_name,
                    f"{call.name!r} has no parameter {arg_name!r}",
                )
            )
            continue
        if not conforms(value, param.value_type):
            violations.append(
                SchemaViolation(
                    ViolationKind.WRONG_TYPE,
                    call.name,
                    arg_name,
                    f"{arg_name!r} expects {param.value_type.value}, got {canon_kind(value)}",
                )
            )
    provided = {name for name, _ in call.args}
    for param in schema.params:
        if param.required and param.name not in provided:
            violations.append(
                SchemaViolation(
                    ViolationKind.MISSING_REQUIRED,
                    call.name,
                    param.name,
                    f"required parameter {param.name!r} missing",
                )
            )
    return violations
