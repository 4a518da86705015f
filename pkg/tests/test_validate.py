import pytest

from dialokit.model import ReactDialogue, ReactTurn, ApiCall, load_compact_registry
from dialokit.prompts import GENERATION_EXAMPLE
from dialokit.react import parse_trace
from dialokit.validate import (
    THOUGHT_TOKEN_FLOOR,
    ErrorDimension,
    HumanScore,
    InvalidScore,
    NotEnough,
    UnknownId,
    ValidationFlag,
    ValidationReport,
    check_corpus,
    check_dialogue,
    error_rate_report,
    sample_for_review,
)


GOOD_THOUGHT = "The user wants jazz events, I should call the search API now."
AFTER_THOUGHT = "The search returned one event, I should report it back."


def _turn(user="Find music events in New York.",
          thought1=GOOD_THOUGHT,
          action=ApiCall("FindEvents", [("category", "Music"),
                                        ("city_of_event", "New York")]),
          observation="ok",
          thought2=AFTER_THOUGHT,
          system="I found the Jazz Festival."):
    if action is None:
        return ReactTurn(user=user, thought1=thought1, action=None,
                         observation=None, thought2=None, system=system)
    return ReactTurn(user=user, thought1=thought1, action=action,
                     observation=observation, thought2=thought2, system=system)


def _dialogue(*turns, id="d-1"):
    return ReactDialogue(id=id, turns=tuple(turns), registry_ref="r")


def test_clean_dialogue_scores_one(registry):
    report = check_dialogue(_dialogue(_turn()), registry)
    assert report.flags == ()
    assert report.auto_score == 1


def test_generation_example_is_clean_under_matching_registry():
    registry = load_compact_registry(
        "1. AddToPlaylist(playlist_name, artists, songs)", name="playlist"
    )
    dialogue = parse_trace(GENERATION_EXAMPLE, registry, "example")
    report = check_dialogue(dialogue, registry)
    assert report.flags == ()


def test_undefined_function_flags(registry):
    report = check_dialogue(
        _dialogue(_turn(action=ApiCall("NoSuchApi", []))), registry
    )
    assert report.auto_score == 0
    assert report.dimensions() == {ErrorDimension.UNDEFINED_FUNCTION_CALL}
    assert report.flags[0].turn_index == 0


def test_unknown_argument_is_undefined_dimension(registry):
    action = ApiCall("FindEvents", [("category", "Music"),
                                    ("city", "New York")])
    report = check_dialogue(
        _dialogue(_turn(user="Find music events in New York.", action=action)),
        registry,
    )
    assert ErrorDimension.UNDEFINED_FUNCTION_CALL in report.dimensions()


def test_wrong_type_flags(registry):
    action = ApiCall("BuyEventTickets",
                     [("event_name", "Jazz Festival"),
                      ("number_of_seats", "two"),
                      ("date", "2023-10-07"),
                      ("city_of_event", "New York")])
    user = "Get two seats for the Jazz Festival on 2023-10-07 in New York."
    report = check_dialogue(_dialogue(_turn(user=user, action=action)), registry)
    assert report.dimensions() == {ErrorDimension.INCORRECT_ARGUMENT_TYPE}


def test_missing_required_is_type_dimension(registry):
    action = ApiCall("BuyEventTickets", [("event_name", "Jazz Festival")])
    user = "Buy Jazz Festival tickets."
    report = check_dialogue(_dialogue(_turn(user=user, action=action)), registry)
    assert ErrorDimension.INCORRECT_ARGUMENT_TYPE in report.dimensions()
    assert any("date" in f.detail for f in report.flags)


def test_hallucinated_argument_flags(registry):
    report = check_dialogue(
        _dialogue(_turn(user="Find events for me.",
                        action=ApiCall("FindEvents",
                                       [("category", "all"),
                                        ("city_of_event", "Zanzibar")]))),
        registry,
    )
    assert report.dimensions() == {ErrorDimension.ARGUMENT_HALLUCINATION}
    assert "Zanzibar" in report.flags[0].detail


def test_grounding_accepts_schema_default(registry):
    # FindEvents.category defaults to 'all'; using it unprompted is fine
    report = check_dialogue(
        _dialogue(_turn(user="What is happening in New York?",
                        action=ApiCall("FindEvents",
                                       [("category", "all"),
                                        ("city_of_event", "New York")]))),
        registry,
    )
    assert report.flags == ()


def test_grounding_accepts_case_folded_substring(registry):
    report = check_dialogue(
        _dialogue(_turn(user="any music events in NEW YORK?",
                        action=ApiCall("FindEvents",
                                       [("category", "Music"),
                                        ("city_of_event", "new york")]))),
        registry,
    )
    assert report.flags == ()


def test_grounding_accepts_scattered_tokens(registry):
    # "Don" and "Sherri" both appear, though separated by "and"
    registry2 = load_compact_registry(
        "1. AddToPlaylist(playlist_name, artists, songs)", name="p"
    )
    turn = _turn(user="Add Don and Sherri to my playlist.",
                 action=ApiCall("AddToPlaylist", [("artists", "Don Sherri")]))
    assert check_dialogue(_dialogue(turn), registry2).flags == ()


def test_grounding_sees_prior_turns_and_observations(registry):
    first = _turn(
        user="Find music events in New York.",
        action=ApiCall("FindEvents", [("category", "Music"),
                                      ("city_of_event", "New York")]),
        observation={"event_name": "Jazz Festival", "date": "2023-10-07"},
        system="The Jazz Festival is on October 7.",
    )
    second = _turn(
        user="Great, buy 2 tickets please.",
        thought1="The user confirmed, I should book the Jazz Festival tickets.",
        action=ApiCall("BuyEventTickets",
                       [("event_name", "Jazz Festival"),
                        ("number_of_seats", 2),
                        ("date", "2023-10-07"),
                        ("city_of_event", "New York")]),
        thought2="Tickets are booked, I can confirm to the user now.",
        system="Done, 2 tickets booked.",
    )
    assert check_dialogue(_dialogue(first, second), registry).flags == ()


def test_thoughts_are_not_grounding_evidence(registry):
    # the invented city appears only inside the model's own reasoning
    turn = _turn(
        user="Find music events for me.",
        thought1="The user must mean Zanzibar, I should search events there.",
        action=ApiCall("FindEvents", [("category", "Music"),
                                      ("city_of_event", "Zanzibar")]),
    )
    report = check_dialogue(_dialogue(turn), registry)
    assert ErrorDimension.ARGUMENT_HALLUCINATION in report.dimensions()


def test_numeric_and_boolean_arguments_exempt_from_grounding(registry):
    turn = _turn(
        user="Buy tickets for the Jazz Festival on 2023-10-07 in New York.",
        action=ApiCall("BuyEventTickets",
                       [("event_name", "Jazz Festival"),
                        ("number_of_seats", 4),
                        ("date", "2023-10-07"),
                        ("city_of_event", "New York")]),
    )
    assert check_dialogue(_dialogue(turn), registry).flags == ()


def test_short_first_thought_flags(registry):
    report = check_dialogue(_dialogue(_turn(thought1="ok sure")), registry)
    assert ErrorDimension.LOW_QUALITY_REASONING in report.dimensions()
    floor_thought = " ".join(["word"] * THOUGHT_TOKEN_FLOOR)
    report2 = check_dialogue(_dialogue(_turn(thought1=floor_thought)), registry)
    assert ErrorDimension.LOW_QUALITY_REASONING not in report2.dimensions()


def test_missing_second_thought_flags(registry):
    report = check_dialogue(_dialogue(_turn(thought2="  ")), registry)
    assert ErrorDimension.LOW_QUALITY_REASONING in report.dimensions()
    assert any("second thought" in f.detail for f in report.flags)


def test_no_api_negation_with_action_flags(registry):
    turn = _turn(
        thought1="I don't need an API call for that, I want to respond to the user.",
    )
    report = check_dialogue(_dialogue(turn), registry)
    assert any("no call is needed" in f.detail for f in report.flags)
    # the same wording on a direct turn is what it should look like
    direct = _turn(
        thought1="I don't need an API call for that, I want to respond to the user.",
        action=None,
    )
    assert check_dialogue(_dialogue(direct), registry).flags == ()


def test_consecutive_identical_actions_flag_and_reset(registry):
    call = ApiCall("FindEvents", [("category", "Music"),
                                  ("city_of_event", "New York")])
    api = _turn(user="Find music events in New York.", action=call)
    direct = _turn(user="Tell me something nice.",
                   thought1="No lookup is required, a direct reply works.",
                   action=None)
    repeated = check_dialogue(_dialogue(api, api), registry)
    assert any("repeats the previous" in f.detail for f in repeated.flags)
    assert repeated.flags[-1].turn_index == 1
    # an intervening direct turn resets the comparison
    spaced = check_dialogue(_dialogue(api, direct, api), registry)
    assert not any("repeats the previous" in f.detail for f in spaced.flags)
    # a different call does not flag
    other = _turn(user="Find music events in Chicago.",
                  action=ApiCall("FindEvents", [("category", "Music"),
                                                ("city_of_event", "Chicago")]))
    varied = check_dialogue(_dialogue(api, other), registry)
    assert not any("repeats the previous" in f.detail for f in varied.flags)


def test_one_flag_per_problem_accumulates(registry):
    bad = _turn(
        user="Hi.",
        thought1="ok",
        action=ApiCall("NoSuchApi", [("made_up", "Zanzibar")]),
        thought2="",
    )
    report = check_dialogue(_dialogue(bad), registry)
    assert report.auto_score == 0
    dims = report.dimensions()
    assert ErrorDimension.UNDEFINED_FUNCTION_CALL in dims
    assert ErrorDimension.LOW_QUALITY_REASONING in dims


def test_check_corpus_order(registry):
    clean = _dialogue(_turn(), id="a")
    dirty = _dialogue(_turn(action=ApiCall("NoSuchApi", [])), id="b")
    reports = check_corpus([clean, dirty], registry)
    assert [r.dialogue_id for r in reports] == ["a", "b"]
    assert [r.auto_score for r in reports] == [1, 0]


# ---------------------------------------------------------------------------
# review sampling
# ---------------------------------------------------------------------------

def _dialogues(n):
    return [_dialogue(_turn(), id=f"d-{i:03d}") for i in range(n)]


def test_sample_deterministic_and_unordered():
    population = _dialogues(20)
    first = sample_for_review(population, 5, seed=42)
    second = sample_for_review(list(reversed(population)), 5, seed=42)
    assert first == second
    assert len(set(first)) == 5
    assert set(first) <= {d.id for d in population}
    assert sample_for_review(population, 5, seed=43) != first


def test_sample_size_bounds():
    population = _dialogues(3)
    assert sorted(sample_for_review(population, 3, seed=1)) == ["d-000", "d-001", "d-002"]
    assert sample_for_review(population, 0, seed=1) == []
    with pytest.raises(NotEnough):
        sample_for_review(population, 4, seed=1)
    with pytest.raises(ValueError):
        sample_for_review(population, -1, seed=1)


# ---------------------------------------------------------------------------
# human scores and aggregation
# ---------------------------------------------------------------------------

def test_zero_score_requires_feedback():
    HumanScore("d-1", 1, "alice")
    HumanScore("d-1", 0, "alice", feedback="call is wrong")
    with pytest.raises(InvalidScore):
        HumanScore("d-1", 0, "alice")
    with pytest.raises(InvalidScore):
        HumanScore("d-1", 0, "alice", feedback="   ")
    with pytest.raises(InvalidScore):
        HumanScore("d-1", 2, "alice")


def test_error_rate_report_rates_and_counts():
    auto = [
        ValidationReport("a"),
        ValidationReport("b", (
            ValidationFlag(ErrorDimension.UNDEFINED_FUNCTION_CALL, 0, "x"),
            ValidationFlag(ErrorDimension.UNDEFINED_FUNCTION_CALL, 1, "y"),
            ValidationFlag(ErrorDimension.LOW_QUALITY_REASONING, 1, "z"),
        )),
        ValidationReport("c", (
            ValidationFlag(ErrorDimension.ARGUMENT_HALLUCINATION, 0, "w"),
        )),
        ValidationReport("d"),
    ]
    human = [
        HumanScore("a", 1, "alice"),
        HumanScore("b", 0, "alice", feedback="bad call"),
        HumanScore("c", 0, "bob", feedback="made-up city"),
        HumanScore("d", 1, "bob"),
    ]
    summary = error_rate_report(auto, human)
    assert summary.auto_reports == 4
    assert summary.human_scored == 4
    assert summary.auto_error_rate == pytest.approx(0.5)
    assert summary.human_error_rate == pytest.approx(0.5)
    # dialogues per dimension, not flags: b counts once for undefined calls
    assert summary.dimension_counts == {
        "UndefinedFunctionCall": 1,
        "IncorrectArgumentType": 0,
        "ArgumentHallucination": 1,
        "LowQualityReasoning": 1,
    }
    assert summary.feedback == ("bad call", "made-up city")


def test_error_rate_report_empty_sides():
    summary = error_rate_report([], [])
    assert summary.auto_error_rate == 0.0
    assert summary.human_error_rate == 0.0
    assert set(summary.dimension_counts) == {d.value for d in ErrorDimension}


def test_error_rate_report_rejects_unknown_id():
    auto = [ValidationReport("a")]
    with pytest.raises(UnknownId):
        error_rate_report(auto, [HumanScore("zz", 1, "alice")])


def test_fixture_corpus_reports(pipeline_run, registry, fixtures_dir):
    import json
    from pathlib import Path

    docs = [
        json.loads(line)
        for line in (Path(pipeline_run.output_dir) / "validation_reports.jsonl")
        .read_text()
        .splitlines()
    ]
    by_id = {d["dialogue_id"]: d for d in docs}
    assert by_id["sgd-dev-0001"]["auto_score"] == 1
    assert by_id["sgd-dev-0002"]["auto_score"] == 0
    dims = {f["dimension"] for f in by_id["sgd-dev-0002"]["flags"]}
    assert "UndefinedFunctionCall" in dims
    assert "IncorrectArgumentType" in dims
