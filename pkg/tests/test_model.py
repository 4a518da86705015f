import json

import pytest

from dialokit.model import (
    ABSENT,
    ApiCall,
    BadType,
    DialogueState,
    DomainTag,
    DuplicateArg,
    DuplicateFunction,
    FunctionRegistry,
    FunctionSchema,
    InstructionSample,
    ParamSpec,
    ReactDialogue,
    ReactTurn,
    ValueType,
    ViolationKind,
    canon_kind,
    compact_signature,
    conforms,
    is_canon_value,
    load_compact_registry,
    load_registry,
    schema_from_record,
    schema_to_record,
    schemas_to_doc,
    validate_call_against_schema,
)


# ---------------------------------------------------------------------------
# value kinds and conformance
# ---------------------------------------------------------------------------

def test_canon_kind_basics():
    assert canon_kind("x") == "string"
    assert canon_kind(3) == "integer"
    assert canon_kind(3.5) == "number"
    assert canon_kind(True) == "boolean"
    assert canon_kind(None) == "null"
    assert canon_kind([1]) == "list"
    assert canon_kind({"a": 1}) == "object"


def test_bool_is_not_integer():
    # bool subclasses int in Python; the model must separate them
    assert canon_kind(True) == "boolean"
    assert conforms(True, ValueType.BOOLEAN)
    assert not conforms(True, ValueType.INTEGER)
    assert not conforms(True, ValueType.NUMBER)
    assert not conforms(1, ValueType.BOOLEAN)


def test_integer_conforms_to_number_not_reverse():
    assert conforms(2, ValueType.NUMBER)
    assert not conforms(2.5, ValueType.INTEGER)
    assert conforms(2.5, ValueType.NUMBER)


def test_is_canon_value_rejects_foreign_types():
    assert is_canon_value({"a": [1, "x", None, True, 2.5]})
    assert not is_canon_value(object())
    assert not is_canon_value({1: "non-string key"})
    assert not is_canon_value((1, 2))


# ---------------------------------------------------------------------------
# ParamSpec / FunctionSchema / FunctionRegistry
# ---------------------------------------------------------------------------

def test_param_required_excludes_default():
    with pytest.raises(ValueError):
        ParamSpec("p", "", ValueType.STRING, required=True, default="x")


def test_param_has_default_distinguishes_none():
    explicit_null = ParamSpec("p", "", ValueType.STRING, required=False, default=None)
    no_default = ParamSpec("q", "", ValueType.STRING, required=False)
    assert explicit_null.has_default
    assert not no_default.has_default
    assert no_default.default is ABSENT


def test_schema_rejects_duplicate_params():
    params = (
        ParamSpec("a", "", ValueType.STRING, required=True),
        ParamSpec("a", "", ValueType.STRING, required=True),
    )
    with pytest.raises(DuplicateArg):
        FunctionSchema("f", "", params)


def test_registry_lookup_and_duplicates():
    schema = FunctionSchema("f", "", (ParamSpec("a", "", ValueType.STRING, True),))
    registry = FunctionRegistry((schema,))
    assert "f" in registry
    assert registry.get("f") is schema
    assert registry.get("g") is None
    assert len(registry) == 1
    with pytest.raises(DuplicateFunction):
        FunctionRegistry((schema, schema))


def test_schema_record_round_trip_verbatim_defaults(fixtures_dir):
    # source corpora carry defaults whose kind contradicts the declared type;
    # they must survive untouched
    record = {
        "name": "f",
        "description": "d",
        "parameters": {
            "lat": {"description": "x", "type": "int", "default": "35.779"},
            "city": {"description": "y", "type": "str"},
        },
    }
    schema = schema_from_record(record)
    assert schema.param("lat").default == "35.779"
    assert schema.param("lat").value_type == ValueType.INTEGER
    assert schema.param("city").required
    assert not schema.param("lat").required
    assert schema_to_record(schema) == record


def test_hammer_tools_doc_byte_round_trip(golden_text):
    line = golden_text("hammer_tools.json")
    registry = load_registry(json.loads(line))
    assert json.dumps(schemas_to_doc(list(registry)), ensure_ascii=False) == line
    assert registry.names == (
        "LxOm64zLyg", "WoDdNSe7e7K5", "CBrCNmwOERb", "1YTQVXkwLY",
    )


def test_unknown_type_token_rejected():
    record = {"name": "f", "description": "", "parameters": {
        "a": {"description": "", "type": "tuple"}}}
    with pytest.raises(BadType):
        schema_from_record(record)


def test_compact_registry_all_optional_strings():
    registry = load_compact_registry(
        "1. FindBus(from_location, to_location, leaving_date)\n"
        "2. GetWeather(city)\n"
    )
    assert registry.names == ("FindBus", "GetWeather")
    schema = registry.get("FindBus")
    assert [p.name for p in schema.params] == [
        "from_location", "to_location", "leaving_date",
    ]
    assert all(p.value_type == ValueType.STRING for p in schema.params)
    assert all(not p.required for p in schema.params)


def test_compact_signature_round_trip():
    registry = load_compact_registry("1. GetRide(destination, number_of_riders)\n")
    assert compact_signature(registry.get("GetRide")) == (
        "GetRide(destination, number_of_riders)"
    )


# ---------------------------------------------------------------------------
# ApiCall
# ---------------------------------------------------------------------------

def test_api_call_duplicate_arg_rejected():
    with pytest.raises(DuplicateArg):
        ApiCall("f", [("a", 1), ("a", 2)])


def test_api_call_accepts_mapping_and_pairs():
    from_mapping = ApiCall("f", {"a": 1, "b": "x"})
    from_pairs = ApiCall("f", [("a", 1), ("b", "x")])
    assert from_mapping == from_pairs
    assert from_mapping.args_dict == {"a": 1, "b": "x"}
    assert from_mapping.arg("a") == 1
    assert from_mapping.arg("missing") is None


# ---------------------------------------------------------------------------
# DialogueState
# ---------------------------------------------------------------------------

def test_state_equality_is_set_based():
    a = DialogueState()
    a = a.with_triple("d", "s1", "v1").with_triple("d", "s2", "v2")
    b = DialogueState()
    b = b.with_triple("d", "s2", "v2").with_triple("d", "s1", "v1")
    assert a == b
    assert hash(a) == hash(b)
    assert len(a) == 2
    assert a.triples() == frozenset({("d", "s1", "v1"), ("d", "s2", "v2")})


def test_state_conflicting_value_raises():
    state = DialogueState().with_triple("d", "s", "v")
    with pytest.raises(ValueError):
        state.with_triple("d", "s", "other")
    # re-asserting the same value is fine
    assert state.with_triple("d", "s", "v") == state


# ---------------------------------------------------------------------------
# ReactTurn / ReactDialogue invariants
# ---------------------------------------------------------------------------

def test_turn_api_fields_travel_together():
    call = ApiCall("F", [("a", 1)])
    with pytest.raises(ValueError):
        ReactTurn("u", "t1", call, None, "t2", "s")  # missing observation
    with pytest.raises(ValueError):
        ReactTurn("u", None, call, {"ok": 1}, "t2", "s")  # missing thought1
    with pytest.raises(ValueError):
        ReactTurn("u", "t", None, {"ok": 1}, None, "s")  # observation, no action
    ReactTurn("u", "t1", call, {"ok": 1}, "t2", "s")
    ReactTurn("u", "t", None, None, None, "s")
    ReactTurn("u", None, None, None, None, "s")


def test_dialogue_requires_turns():
    with pytest.raises(ValueError):
        ReactDialogue("d", ())


def test_instruction_sample_output_nonempty():
    with pytest.raises(ValueError):
        InstructionSample("i", "in", "", DomainTag.TOD)


def test_domain_tag_wire_values():
    assert DomainTag.CRA_ACTION.value == "CRA_action"
    assert DomainTag.CRA_RESPONSE.value == "CRA_response"
    assert DomainTag.TOD.value == "TOD"
    assert DomainTag.LA.value == "LA"


# ---------------------------------------------------------------------------
# validate_call_against_schema
# ---------------------------------------------------------------------------

@pytest.fixture()
def findbus_registry():
    return FunctionRegistry((
        FunctionSchema("FindBus", "", (
            ParamSpec("from_location", "", ValueType.STRING, True),
            ParamSpec("to_location", "", ValueType.STRING, True),
            ParamSpec("leaving_date", "", ValueType.STRING, True),
        )),
    ))


def test_missing_required_enumerated_in_schema_order(findbus_registry):
    call = ApiCall("FindBus", [("from_location", "A")])
    violations = validate_call_against_schema(call, findbus_registry)
    assert [(v.kind, v.argument) for v in violations] == [
        (ViolationKind.MISSING_REQUIRED, "to_location"),
        (ViolationKind.MISSING_REQUIRED, "leaving_date"),
    ]


def test_unknown_function_short_circuits(findbus_registry):
    call = ApiCall("FindTrain", [("from_location", "A")])
    violations = validate_call_against_schema(call, findbus_registry)
    assert len(violations) == 1
    assert violations[0].kind == ViolationKind.UNKNOWN_FUNCTION
    assert violations[0].function == "FindTrain"


def test_unknown_argument_and_wrong_type(findbus_registry):
    call = ApiCall("FindBus", [
        ("from_location", "A"),
        ("to_location", 5),
        ("seat", "window"),
        ("leaving_date", "monday"),
    ])
    violations = validate_call_against_schema(call, findbus_registry)
    kinds = [(v.kind, v.argument) for v in violations]
    assert (ViolationKind.WRONG_TYPE, "to_location") in kinds
    assert (ViolationKind.UNKNOWN_ARGUMENT, "seat") in kinds
    assert len(violations) == 2


def test_conforming_call_is_clean(findbus_registry):
    call = ApiCall("FindBus", [
        ("from_location", "A"),
        ("to_location", "B"),
        ("leaving_date", "2024-03-01"),
    ])
    assert validate_call_against_schema(call, findbus_registry) == []
