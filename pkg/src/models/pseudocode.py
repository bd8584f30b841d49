"""Pseudo-code statements, condition traces and reasoning steps."""

from enum import Enum
from typing import Optional

from pydantic import BaseModel, ConfigDict, model_validator

from .pool import TaskKind


class Branch(str, Enum):
    """Outcome of one side of a conditional statement."""

    YES = "yes"
    NO = "no"
    NEXT = "next"


class Statement(BaseModel):
    """One pseudo-code line: a preamble or an `If p, q, otherwise ...` rule."""

    model_config = ConfigDict(frozen=True)

    index_roman: str
    text: str
    condition: str = ""
    then_verdict: Optional[Branch] = None
    else_verdict: Optional[Branch] = None
    is_preamble: bool = False

    @model_validator(mode="after")
    def _branches(self) -> "Statement":
        if self.is_preamble:
            if self.then_verdict is not None or self.else_verdict is not None:
                raise ValueError(f"preamble statement {self.index_roman} cannot have branches")
        elif self.then_verdict is None or self.else_verdict is None:
            raise ValueError(f"statement {self.index_roman} needs both branches")
        return self

    @property
    def is_terminal(self) -> bool:
        return (
            not self.is_preamble
            and self.then_verdict is not Branch.NEXT
            and self.else_verdict is not Branch.NEXT
        )


class PseudoCode(BaseModel):
    """Ordered statements checked sequentially until an answer is drawn."""

    model_config = ConfigDict(frozen=True)

    statements: tuple[Statement, ...]
    task_kind: TaskKind

    @property
    def conditionals(self) -> tuple[Statement, ...]:
        return tuple(s for s in self.statements if not s.is_preamble)

    def render_lines(self, u_indices: bool = True, drop_preamble: bool = False) -> list[str]:
        """Rules block lines. Without U-indices lines are numbered 1, 2, 3..."""
        statements = [s for s in self.statements if not (drop_preamble and s.is_preamble)]
        if u_indices:
            return [f"{s.index_roman}: {s.text}" for s in statements]
        return [f"{n}: {s.text}" for n, s in enumerate(statements, start=1)]


class ConditionTrace(BaseModel):
    """Annotated condition outcomes for the statements actually evaluated.

    Evaluation stops at the first condition that holds, so only the last
    outcome may be true.
    """

    model_config = ConfigDict(frozen=True)

    outcomes: tuple[bool, ...] = ()

    @model_validator(mode="after")
    def _true_only_last(self) -> "ConditionTrace":
        if any(self.outcomes[:-1]):
            raise ValueError(f"only the last outcome may be true, got {list(self.outcomes)}")
        return self

    def __len__(self) -> int:
        return len(self.outcomes)


class ReasoningSteps(BaseModel):
    """Reasoning step bodies plus the verdict they conclude.

    Bodies are stored without numbers; `lines` numbers them so a
    self-indicator can take line 1.
    """

    model_config = ConfigDict(frozen=True)

    steps: tuple[str, ...]
    final_verdict: Branch

    @model_validator(mode="after")
    def _verdict(self) -> "ReasoningSteps":
        if self.final_verdict is Branch.NEXT:
            raise ValueError("reasoning must conclude yes or no")
        return self

    def lines(self, start: int = 1, indicator: Optional[str] = None) -> list[str]:
        bodies = ([indicator] if indicator else []) + list(self.steps)
        return [f"{n}. {body}" for n, body in enumerate(bodies, start=start)]
