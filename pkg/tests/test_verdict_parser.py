import pytest

from src.models import LLMResponse, Outcome
from src.services.verdict_parser import parse_verdict

YES, NO, BAD = Outcome.YES, Outcome.NO, Outcome.BADLY_FORMATTED


@pytest.mark.parametrize(
    "text,expected",
    [
        ("Answer: yes", YES),
        ("answer: No.", NO),
        ("Rule IV holds.\nSo the answer is yes.", YES),
        ("yes", YES),
        ("**No**", NO),
        ("no\n\n", NO),
        ("> yes", YES),
        ("`yes`", YES),
        ("Answer:\nYES", YES),
        ("Answers: no", NO),
        ("Final answer - yes!", YES),
        ("answer yes", YES),
        ("Answer: Yes, yes.", YES),
        ("Answer: yes\n\nActually, answer: no", NO),
        ("Answer: Yes\nAnswer: No", NO),
        ("Well, no, the answer is yes", YES),
        ("Answer: no.\nno", NO),
        (
            "2. Checking rule II: Entity A is an abbreviation of Entity B or vice versa \u2014 does not hold; "
            "proceeding to the next rule.\n3. Checking rule III \u2014 holds; therefore the answer is yes.\nAnswer: yes",
            YES,
        ),
        ("Answer: yes or no", BAD),
        ("I am not sure.", BAD),
        ("", BAD),
        ("The answer is unclear.", BAD),
        ("yesterday", BAD),
        ("Answer: nope", BAD),
        ("The answer: yes. Answer: nothing more", BAD),
        ("Is it a match? No", NO),
        ("Rule II does not hold.\nSo yes, they match", YES),
        ("Both columns hold dates.\nCould be yes, could be no", BAD),
        ("We weighed yes and no.\nUnclear overall", BAD),
        ("Answer: unclear\nno", NO),
    ],
)
def test_parse_verdict(text, expected):
    assert parse_verdict(LLMResponse(text=text)).outcome is expected
