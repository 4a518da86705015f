"""Corpus record transformers: state-tracking samples, masked call samples.

Each transformer maps one source record to instruction samples with a fixed
domain tag. Name masking rewrites every function and parameter name in a
sample's tool list to fresh random identifiers so a model cannot lean on
memorized names; descriptions are left byte-identical.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Dict, List, Mapping, Sequence, Tuple

from .calls import render_toolcall_json
from .errors import ToolkitError
from .model import (
    ApiCall,
    DialogueState,
    DomainTag,
    FunctionSchema,
    InstructionSample,
    ParamSpec,
    ReactDialogue,
    schema_from_record,
    schemas_to_doc,
)
from .prompts import DST_INSTRUCTION, FC_FORMAT_INSTRUCTION, FC_TASK_INSTRUCTION
from .react import dialogue_from_doc, render_history, wrap_history
from .rng import Xoshiro256StarStar


class BadDomain(ToolkitError):
    """A state-tracking record names a domain outside the known set."""


class InconsistentGold(ToolkitError):
    """A gold call references a function absent from the sample's tool list."""


SNIPS_DOMAINS: Tuple[str, ...] = (
    "GetWeather",
    "AddToPlaylist",
    "SearchScreeningEvent",
    "BookRestaurant",
    "SearchCreativeWork",
    "RateBook",
    "PlayMusic",
)


@dataclass(frozen=True)
class SnipsRecord:
    """One single-turn utterance with its gold domain and slot values."""

    utterance: str
    domain: str
    slots: Tuple[Tuple[str, str], ...] = ()


def snips_record_from_doc(doc: Mapping[str, Any]) -> SnipsRecord:
    slots = doc.get("slots", [])
    if isinstance(slots, Mapping):
        pairs = tuple((str(k), str(v)) for k, v in slots.items())
    else:
        pairs = tuple((str(k), str(v)) for k, v in slots)
    return SnipsRecord(utterance=doc["utterance"], domain=doc["domain"], slots=pairs)


def snips_to_dst(
    record: SnipsRecord, instruction: str = DST_INSTRUCTION
) -> InstructionSample:
    """Render one record as a state-tracking sample.

    Output is ``System: `` plus the gold state as a JSON object whose slots
    keep the source record's order. Unknown domains raise BadDomain.
    """
    if record.domain not in SNIPS_DOMAINS:
        raise BadDomain(f"unknown domain {record.domain!r}")
    payload = {"domain": record.domain, "slot_values": {k: v for k, v in record.slots}}
    return InstructionSample(
        instruction=instruction,
        input="User: " + record.utterance,
        output="System: " + json.dumps(payload, ensure_ascii=False),
        domain_tag=DomainTag.TOD,
    )


def parse_dst_output(text: str) -> DialogueState:
    """Parse a state-tracking output line back into a DialogueState."""
    body = text.strip()
    if body.startswith("System:"):
        body = body[len("System:"):].strip()
    doc = json.loads(body)
    domain = doc["domain"]
    triples = []
    for slot, value in doc.get("slot_values", {}).items():
        triples.append((domain, slot, value if isinstance(value, str) else json.dumps(value)))
    return DialogueState(triples)


# ---------------------------------------------------------------------------
# Name masking
# ---------------------------------------------------------------------------

_MASK_ALPHABET = (
    "ABCDEFGHIJKLMNOPQRSTUVWXYZ" "abcdefghijklmnopqrstuvwxyz" "0123456789"
)


@dataclass(frozen=True)
class MaskMap:
    """Bijective rename maps: functions, and parameters per function (keyed
    by the original function name)."""

    functions: Mapping[str, str]
    params: Mapping[str, Mapping[str, str]]

    def __post_init__(self) -> None:
        if len(set(self.functions.values())) != len(self.functions):
            raise ValueError("function renames must be injective")
        for fn, renames in self.params.items():
            if len(set(renames.values())) != len(renames):
                raise ValueError(f"parameter renames for {fn!r} must be injective")

    def inverted(self) -> "MaskMap":
        return MaskMap(
            functions={v: k for k, v in self.functions.items()},
            params={
                self.functions.get(fn, fn): {v: k for k, v in renames.items()}
                for fn, renames in self.params.items()
            },
        )

    def apply_to_schema(self, schema: FunctionSchema) -> FunctionSchema:
        renames = self.params.get(schema.name, {})
        params = tuple(
            ParamSpec(
                name=renames.get(p.name, p.name),
                description=p.description,
                value_type=p.value_type,
                required=p.required,
                default=p.default,
            )
            for p in schema.params
        )
        return FunctionSchema(
            name=self.functions.get(schema.name, schema.name),
            description=schema.description,
            params=params,
        )

    def apply_to_schemas(self, schemas: Sequence[FunctionSchema]) -> List[FunctionSchema]:
        return [self.apply_to_schema(s) for s in schemas]

    def apply_to_call(self, call: ApiCall) -> ApiCall:
        renames = self.params.get(call.name, {})
        return ApiCall(
            self.functions.get(call.name, call.name),
            tuple((renames.get(k, k), v) for k, v in call.args),
        )


def _fresh_identifier(rng: Xoshiro256StarStar, taken: set) -> str:
    # Mixed-case alphanumeric, length 8-12, with an occasional interior
    # '.' or '_' to mirror the shapes real tool names take.
    while True:
        length = 8 + rng.next_below(5)
        chars = [_MASK_ALPHABET[rng.next_below(len(_MASK_ALPHABET))] for _ in range(length)]
        if length >= 10 and rng.next_below(4) == 0:
            pos = 1 + rng.next_below(length - 2)
            chars[pos] = "." if rng.next_below(2) == 0 else "_"
        name = "".join(chars)
        if name not in taken:
            taken.add(name)
            return name


def mask_names(
    schemas: Sequence[FunctionSchema], seed: int
) -> Tuple[List[FunctionSchema], MaskMap]:
    """Rename every function and parameter to a fresh random identifier.

    Deterministic for a given (schemas, seed); new names collide neither
    with each other nor with any original name, so the map stays bijective
    and invertible. Descriptions, types, defaults, and ordering are
    untouched.
    """
    rng = Xoshiro256StarStar(seed)
    taken: set = set()
    for schema in schemas:
        taken.add(schema.name)
        for p in schema.params:
            taken.add(p.name)
    fn_renames: Dict[str, str] = {}
    param_renames: Dict[str, Dict[str, str]] = {}
    for schema in schemas:
        fn_renames[schema.name] = _fresh_identifier(rng, taken)
        param_renames[schema.name] = {
            p.name: _fresh_identifier(rng, taken) for p in schema.params
        }
    mask = MaskMap(functions=fn_renames, params=param_renames)
    return mask.apply_to_schemas(schemas), mask


# ---------------------------------------------------------------------------
# Function-calling samples
# ---------------------------------------------------------------------------

def build_fc_sample(
    query: str,
    tools: Sequence[FunctionSchema],
    gold_calls: Sequence[ApiCall],
    mask: MaskMap | None = None,
    history: ReactDialogue | None = None,
    task_instruction: str = FC_TASK_INSTRUCTION,
    format_instruction: str = FC_FORMAT_INSTRUCTION,
) -> InstructionSample:
    """Build one function-calling sample.

    When a mask is given, both the tool list and the gold calls are relabeled
    through it. Gold calls must reference listed tools (after masking);
    anything else raises InconsistentGold. An empty gold list renders as the
    abstain output ``[]``.
    """
    tool_list = list(tools)
    calls = list(gold_calls)
    if mask is not None:
        tool_list = mask.apply_to_schemas(tool_list)
        calls = [mask.apply_to_call(c) for c in calls]
    names = {s.name for s in tool_list}
    for call in calls:
        if call.name not in names:
            raise InconsistentGold(f"gold call {call.name!r} not among sample tools")
    tools_json = json.dumps(schemas_to_doc(tool_list), ensure_ascii=False)
    blocks = [
        task_instruction,
        f"[BEGIN OF AVAILABLE TOOLS]\n{tools_json}\n[END OF AVAILABLE TOOLS]",
        format_instruction,
    ]
    if history is not None:
        content = render_history(history, len(history.turns))
        if content:
            blocks.append(wrap_history(content))
    return InstructionSample(
        instruction="\n\n".join(blocks),
        input=f"[BEGIN OF QUERY]\n{query}\n[END OF QUERY]",
        output=render_toolcall_json(calls),
        domain_tag=DomainTag.LA,
    )


@dataclass(frozen=True)
class FcRecord:
    """One function-calling source record."""

    id: str
    query: str
    tools: Tuple[FunctionSchema, ...]
    calls: Tuple[ApiCall, ...]
    history: ReactDialogue | None = None


def fc_record_from_doc(doc: Mapping[str, Any]) -> FcRecord:
    tools = tuple(schema_from_record(rec) for rec in doc.get("tools", []))
    calls = tuple(
        ApiCall(c["name"], tuple(c.get("arguments", {}).items()))
        for c in doc.get("calls", [])
    )
    history = None
    if doc.get("history"):
        history = dialogue_from_doc(doc["history"])
    return FcRecord(
        id=str(doc.get("id", "")),
        query=doc["query"],
        tools=tools,
        calls=calls,
        history=history,
    )
