from itertools import product

import pytest
from pydantic import ValidationError

from src.exceptions import PseudoCodeError, ReasoningError
from src.models import Branch, ConditionTrace, TaskKind
from src.services.reasoning_builder import construct_reasoning, parse_pseudocode, roman_to_int


def _all_traces(max_length: int):
    for length in range(1, max_length + 1):
        yield from product((True, False), repeat=length)


def _walk(then_else: list[tuple[Branch, Branch]], outcomes: tuple[bool, ...]):
    """Reference walk: (verdict, steps used) or None when the trace runs out."""
    for used, (held, (then_verdict, else_verdict)) in enumerate(zip(outcomes, then_else), start=1):
        branch = then_verdict if held else else_verdict
        if branch is not Branch.NEXT:
            return branch, used
    return None


@pytest.mark.parametrize("numeral, value", [("I", 1), ("IV", 4), ("IX", 9), ("XIV", 14), ("XL", 40)])
def test_roman_to_int(numeral, value):
    assert roman_to_int(numeral) == value


def test_parses_schema_matching_rules(sm_pseudocode):
    statements = sm_pseudocode.statements

    assert [s.index_roman for s in statements] == ["I", "II", "III", "IV"]
    assert statements[0].is_preamble
    assert [(s.then_verdict, s.else_verdict) for s in sm_pseudocode.conditionals] == [
        (Branch.NO, Branch.NEXT),
        (Branch.NO, Branch.NEXT),
        (Branch.NO, Branch.YES),
    ]
    assert statements[1].condition == "the columns of the two schemas can not be the same type of data in the database"


def test_parses_entity_matching_rules(em_pseudocode):
    conditionals = em_pseudocode.conditionals

    assert [(s.then_verdict, s.else_verdict) for s in conditionals] == [
        (Branch.YES, Branch.NEXT),
        (Branch.YES, Branch.NEXT),
        (Branch.YES, Branch.NO),
    ]
    assert conditionals[-1].condition == "Entity A and Entity B refer to the same real-world concept"


@pytest.mark.parametrize("fixture", ["sm_pseudocode", "em_pseudocode"])
def test_every_trace_terminates_as_hand_traced(fixture, request):
    pseudocode = request.getfixturevalue(fixture)
    branches = [(s.then_verdict, s.else_verdict) for s in pseudocode.conditionals]

    for outcomes in _all_traces(len(branches)):
        if any(outcomes[:-1]):
            with pytest.raises(ValidationError):
                ConditionTrace(outcomes=outcomes)
            continue
        trace = ConditionTrace(outcomes=outcomes)
        expected = _walk(branches, outcomes)
        if expected is None or expected[1] != len(outcomes):
            with pytest.raises(ReasoningError):
                construct_reasoning(pseudocode, trace)
            continue
        steps = construct_reasoning(pseudocode, trace)
        assert steps.final_verdict is expected[0]
        assert len(steps.steps) == len(outcomes)


def test_only_all_false_trace_says_yes_for_schema_rules(sm_pseudocode):
    valid = [(False,) * n + (True,) for n in range(3)] + [(False, False, False)]
    yes_traces = [
        outcomes
        for outcomes in valid
        if construct_reasoning(sm_pseudocode, ConditionTrace(outcomes=outcomes)).final_verdict is Branch.YES
    ]

    assert yes_traces == [(False, False, False)]


def test_all_false_trace_says_no_for_entity_rules(em_pseudocode):
    steps = construct_reasoning(em_pseudocode, ConditionTrace(outcomes=(False, False, False)))

    assert steps.final_verdict is Branch.NO


def test_step_wording(sm_pseudocode):
    steps = construct_reasoning(sm_pseudocode, ConditionTrace(outcomes=(False, True)))

    assert steps.steps == (
        "Checking rule II: the columns of the two schemas can not be the same type of data in the database "
        "\u2014 does not hold; proceeding to the next rule.",
        "Checking rule III: the tables of the two schemas are not semantically the same "
        "\u2014 holds; therefore the answer is no.",
    )
    assert steps.lines(start=1, indicator="Both are dates.")[0] == "1. Both are dates."
    assert steps.lines(start=1)[0].startswith("1. Checking rule II")


@pytest.mark.parametrize("outcomes", [(True, True, False), (True, False, False), (False, True, True)])
def test_trace_with_an_early_true_is_rejected(outcomes):
    with pytest.raises(ValidationError, match="only the last outcome may be true"):
        ConditionTrace(outcomes=outcomes)


def test_outcomes_after_the_answer_are_rejected():
    pseudocode = parse_pseudocode(
        "I: If a, check rule II, otherwise, the answer is no.\n"
        "II: If b, the answer is yes, otherwise, the answer is no."
    )

    with pytest.raises(ReasoningError, match="1 more outcomes for 'demo-7'"):
        construct_reasoning(pseudocode, ConditionTrace(outcomes=(False, False)), pair_context="demo-7")


def test_trace_longer_than_rules(sm_pseudocode):
    with pytest.raises(ReasoningError, match="4 outcomes"):
        construct_reasoning(sm_pseudocode, ConditionTrace(outcomes=(False,) * 4))


def test_empty_trace_draws_no_answer(sm_pseudocode):
    with pytest.raises(ReasoningError):
        construct_reasoning(sm_pseudocode, ConditionTrace())


@pytest.mark.parametrize(
    "text, message",
    [
        ("II: If a, the answer is no, otherwise, check rule III.", "last"),
        ("I: If a, the answer is yes, otherwise, the answer is no.\nII: If b, the answer is no, otherwise, the answer is yes.", "unreachable"),
        ("I: If a, the answer is no, otherwise, check rule III.\nII: If b, the answer is no, otherwise, the answer is yes.", "expected II"),
        ("I: If a, check rule II, otherwise, check rule II.\nII: If b, the answer is no, otherwise, the answer is yes.", "never draws"),
        ("II: If a, the answer is no, otherwise, the answer is yes.\nI: Check rules.", "does not increase"),
        ("I: Check everything.", "no conditional"),
        ("1. If a, the answer is no", "ROMAN"),
        ("I: If a then maybe.", "cannot parse"),
    ],
)
def test_malformed_pseudocode(text, message):
    with pytest.raises(PseudoCodeError, match=message):
        parse_pseudocode(text)


def test_lowercase_check_rule_target_is_accepted():
    code = parse_pseudocode(
        "I: If a, the answer is yes, otherwise check rule ii.\nII: If b, the answer is yes, otherwise the answer is no.",
        TaskKind.EM,
    )

    assert len(code.conditionals) == 2


def test_rules_render_with_and_without_u_indices(sm_pseudocode):
    assert sm_pseudocode.render_lines()[1].startswith("II: If the columns")
    assert sm_pseudocode.render_lines(u_indices=False)[1].startswith("2: If the columns")
    assert sm_pseudocode.render_lines(drop_preamble=True)[0].startswith("II: If")
