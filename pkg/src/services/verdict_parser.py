"""Parse a raw completion into yes / no / badly formatted."""

import re
from typing import Optional

from src.models import LLMResponse, Outcome, ParsedVerdict

_ANSWER_CUE = re.compile(r"\banswers?\b", re.IGNORECASE)
_VERDICT_TOKEN = re.compile(r"\b(yes|no)\b", re.IGNORECASE)


def _after_last_cue(text: str) -> Optional[str]:
    cues = list(_ANSWER_CUE.finditer(text))
    if not cues:
        return None
    return text[cues[-1].end():]


def _single_verdict(text: str) -> Optional[Outcome]:
    """The one distinct yes/no token in `text`; both tokens is ambiguous."""
    tokens = {token.lower() for token in _VERDICT_TOKEN.findall(text)}
    if len(tokens) == 1:
        return Outcome(tokens.pop())
    if len(tokens) > 1:
        return Outcome.BADLY_FORMATTED
    return None


def _verdict_on_last_line(text: str) -> Optional[Outcome]:
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines:
        return None
    last = lines[-1]
    # A cue on the last line limits the scan to what follows it
    tail = _after_last_cue(last)
    return _single_verdict(last if tail is None else tail)


def parse_verdict(response: LLMResponse) -> ParsedVerdict:
    """
    Find the final yes/no answer in a completion.

    The text after the last "answer" cue decides when it holds exactly
    one distinct yes/no token; both tokens there is ambiguous. Without a
    decisive cue the last non-blank line is scanned the same way. Anything
    else is badly formatted.
    """
    text = response.text or ""

    tail = _after_last_cue(text)
    outcome = None if tail is None else _single_verdict(tail)
    if outcome is None:
        outcome = _verdict_on_last_line(text)
    return ParsedVerdict(outcome=outcome or Outcome.BADLY_FORMATTED)
