"""Demonstrations, self-indicators, prompt options and rendered prompts."""

import hashlib
from enum import Enum
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from .knowledge import KnowledgeItem
from .pool import CandidatePair, TaskKind
from .pseudocode import ConditionTrace, ReasoningSteps


class SummaryStrategy(str, Enum):
    """Which pairs the summarization pretask compresses."""

    NONE = "none"
    DEMO_ONLY = "demo_only"
    ALL = "all"


class PromptOptions(BaseModel):
    """Prompt-technique switches. Defaults match the full system."""

    model_config = ConfigDict(frozen=True)

    task_oriented_instruction: bool = True
    rules_terminology: bool = True
    u_indices: bool = True
    instruction_extraction: bool = True
    summary_strategy: SummaryStrategy = SummaryStrategy.DEMO_ONLY
    self_indicator: bool = True
    drop_preamble: bool = False
    baseline: bool = False


class Demonstration(BaseModel):
    """A labeled example pair with its annotated trace and reasoning."""

    model_config = ConfigDict(frozen=True)

    demo_id: str
    pair: CandidatePair
    trace: ConditionTrace
    label: bool
    reasoning: Optional[ReasoningSteps] = None
    summarized: Optional[tuple[str, str]] = None
    self_indicator: Optional[str] = None
    knowledge: tuple[KnowledgeItem, ...] = ()
    shipped_knowledge: dict[str, tuple[str, ...]] = Field(default_factory=dict, repr=False)

    @model_validator(mode="after")
    def _verdict_matches_label(self) -> "Demonstration":
        if self.reasoning is not None:
            expected = "yes" if self.label else "no"
            if self.reasoning.final_verdict.value != expected:
                raise ValueError(
                    f"demonstration {self.demo_id}: reasoning concludes "
                    f"{self.reasoning.final_verdict.value}, label is {expected}"
                )
        return self


class SelfIndicator(BaseModel):
    model_config = ConfigDict(frozen=True)

    text: str = Field(min_length=1)


class PromptBundle(BaseModel):
    """A fully rendered prompt for one pair and one knowledge source."""

    model_config = ConfigDict(frozen=True)

    template_id: TaskKind
    body: str
    k: int
    source: str
    options: PromptOptions

    @property
    def digest(self) -> str:
        return hashlib.sha256(self.body.encode("utf-8")).hexdigest()
