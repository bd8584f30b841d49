"""LLM call parameters, raw responses and parsed verdicts."""

from enum import Enum

from pydantic import BaseModel, ConfigDict, Field


class GenerationParams(BaseModel):
    """Sampling settings. Defaults favour stable outputs."""

    model_config = ConfigDict(frozen=True, protected_namespaces=())

    temperature: float = Field(default=0.0, ge=0.0)
    top_p: float = Field(default=0.1, gt=0.0, le=1.0)
    max_tokens: int = Field(default=1024, gt=0)
    model_id: str = ""


class LLMResponse(BaseModel):
    """Raw completion text from one backend call."""

    model_config = ConfigDict(frozen=True)

    text: str
    latency: float = 0.0
    backend_id: str = ""
    attempts: int = 1


class Outcome(str, Enum):
    """A single source's vote. UNDECIDED marks transport failure."""

    YES = "yes"
    NO = "no"
    BADLY_FORMATTED = "badly_formatted"
    UNDECIDED = "undecided"

    @property
    def is_ill_formed(self) -> bool:
        return self in (Outcome.BADLY_FORMATTED, Outcome.UNDECIDED)


class ParsedVerdict(BaseModel):
    model_config = ConfigDict(frozen=True)

    outcome: Outcome
