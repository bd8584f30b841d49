"""Pseudo-code parsing and demonstration reasoning construction.

Pseudo-code files hold one statement per line, `ROMAN: text`. Lines
starting with `If` are conditional rules of the form
`If <condition>, the answer is <v>, otherwise, check rule <N>`;
any other line is a preamble.
"""

import re
from pathlib import Path
from typing import Optional

from src.exceptions import PseudoCodeError, ReasoningError
from src.models import (
    Branch,
    ConditionTrace,
    PseudoCode,
    ReasoningSteps,
    Statement,
    TaskKind,
)

_LINE = re.compile(r"^\s*([IVXLCDM]+)\s*:\s*(.+?)\s*$")
_VERDICT = r"the answer is (?:yes|no)|check rule [IVXLCDM]+"
_CONDITIONAL = re.compile(
    rf"^If\s+(?P<cond>.+?),?\s+(?P<then>{_VERDICT}),?\s+otherwise,?\s+(?P<else>{_VERDICT})\s*\.?$",
    re.IGNORECASE,
)
_ROMAN_VALUES = {"I": 1, "V": 5, "X": 10, "L": 50, "C": 100, "D": 500, "M": 1000}


def roman_to_int(numeral: str) -> int:
    total = 0
    previous = 0
    for char in reversed(numeral.upper()):
        value = _ROMAN_VALUES[char]
        if value < previous:
            total -= value
        else:
            total += value
            previous = value
    return total


def _branch(phrase: str) -> tuple[Branch, Optional[str]]:
    """Map a verdict phrase to a branch, plus the rule it points to."""
    words = phrase.split()
    if words[0].lower() == "check":
        return Branch.NEXT, words[-1].upper()
    return Branch(words[-1].lower()), None


def parse_pseudocode(text: str, task_kind: TaskKind = TaskKind.SM) -> PseudoCode:
    """
    Parse pseudo-code text into validated statements.

    Args:
        text: Multi-line pseudo-code, one `ROMAN: statement` per line
        task_kind: Task the pseudo-code guides

    Returns:
        PseudoCode with preambles flagged and conditionals split into branches

    Raises:
        PseudoCodeError: unparseable line, non-increasing indices, a
            `check rule` that skips ahead, or no terminal coverage
    """
    statements: list[Statement] = []
    targets: list[Optional[str]] = []
    last_index = 0

    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        match = _LINE.match(line)
        if not match:
            raise PseudoCodeError(f"line {lineno}: expected 'ROMAN: statement', got {line.strip()!r}")
        roman, body = match.group(1), match.group(2)

        index = roman_to_int(roman)
        if index <= last_index:
            raise PseudoCodeError(f"line {lineno}: index {roman} does not increase")
        last_index = index

        if not body.lower().startswith("if "):
            statements.append(Statement(index_roman=roman, text=body, is_preamble=True))
            targets.append(None)
            continue

        conditional = _CONDITIONAL.match(body)
        if not conditional:
            raise PseudoCodeError(f"line {lineno}: cannot parse rule {roman}: {body!r}")
        then_verdict, then_target = _branch(conditional.group("then"))
        else_verdict, else_target = _branch(conditional.group("else"))
        if then_verdict is Branch.NEXT and else_verdict is Branch.NEXT:
            raise PseudoCodeError(f"line {lineno}: rule {roman} never draws an answer")

        statements.append(
            Statement(
                index_roman=roman,
                text=body,
                condition=conditional.group("cond").strip(),
                then_verdict=then_verdict,
                else_verdict=else_verdict,
            )
        )
        targets.append(then_target or else_target)

    conditional_positions = [i for i, s in enumerate(statements) if not s.is_preamble]
    if not conditional_positions:
        raise PseudoCodeError("pseudo-code has no conditional rule")

    for order, position in enumerate(conditional_positions):
        statement = statements[position]
        is_last = order == len(conditional_positions) - 1
        if is_last:
            if not statement.is_terminal:
                raise PseudoCodeError(
                    f"rule {statement.index_roman} is last but does not cover every case"
                )
            continue
        following = statements[conditional_positions[order + 1]].index_roman
        if statement.is_terminal:
            raise PseudoCodeError(
                f"rule {statement.index_roman} always concludes, rule {following} is unreachable"
            )
        if targets[position] != following:
            raise PseudoCodeError(
                f"rule {statement.index_roman} points to rule {targets[position]}, expected {following}"
            )

    return PseudoCode(statements=tuple(statements), task_kind=task_kind)


def load_pseudocode(path: Path, task_kind: TaskKind) -> PseudoCode:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise PseudoCodeError(f"cannot read pseudo-code {path}: {e}") from e
    try:
        return parse_pseudocode(text, task_kind)
    except PseudoCodeError as e:
        raise PseudoCodeError(f"{path}: {e}") from e


def construct_reasoning(
    pseudocode: PseudoCode,
    trace: ConditionTrace,
    pair_context: Optional[str] = None,
) -> ReasoningSteps:
    """
    Walk the rules in order against an annotated trace.

    One step is emitted per evaluated rule, so the trace must end exactly
    at the first branch that draws an answer.

    Args:
        pseudocode: Parsed pseudo-code
        trace: Condition outcomes for the rules in order
        pair_context: Rendered pair text, named in error messages

    Returns:
        ReasoningSteps whose verdict is the branch reached

    Raises:
        ReasoningError: trace longer than the rules, outcomes past the
            answer, or trace ends before an answer
    """
    conditionals = pseudocode.conditionals
    if len(trace) > len(conditionals):
        raise ReasoningError(
            f"trace has {len(trace)} outcomes but the pseudo-code has {len(conditionals)} rules"
        )

    context = f" for {pair_context!r}" if pair_context else ""
    steps: list[str] = []
    for position, (statement, held) in enumerate(zip(conditionals, trace.outcomes)):
        branch = statement.then_verdict if held else statement.else_verdict
        prefix = f"Checking rule {statement.index_roman}: {statement.condition} — {'holds' if held else 'does not hold'}"

        if branch is Branch.NEXT:
            steps.append(f"{prefix}; proceeding to the next rule.")
            continue

        if position + 1 < len(trace):
            raise ReasoningError(
                f"rule {statement.index_roman} concludes {branch.value} but the trace has "
                f"{len(trace) - position - 1} more outcomes{context}"
            )
        steps.append(f"{prefix}; therefore the answer is {branch.value}.")
        return ReasoningSteps(steps=tuple(steps), final_verdict=branch)

    raise ReasoningError(f"trace of {len(trace)} outcomes ends before an answer is drawn{context}")
