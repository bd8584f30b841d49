"""Per-pair ensemble decision records."""

from enum import Enum

from pydantic import BaseModel, ConfigDict, Field

from .llm import Outcome


class FormatClass(str, Enum):
    WELL_FORMATTED = "WellFormatted"
    ELIMINATED = "Eliminated"
    BADLY_FORMATTED = "BadlyFormatted"


class Vote(BaseModel):
    model_config = ConfigDict(frozen=True)

    source: str
    outcome: Outcome


class Decision(BaseModel):
    """IntGE output for one pair: votes, final verdict, format class."""

    model_config = ConfigDict(frozen=True)

    pair_id: str
    votes: tuple[Vote, ...]
    final: bool
    format_class: FormatClass
    prompt_digests: tuple[str, ...] = ()
    responses: tuple[str, ...] = Field(default=(), repr=False)

    def to_record(self) -> dict:
        return {
            "pair_id": self.pair_id,
            "votes": [{"source": v.source, "outcome": v.outcome.value} for v in self.votes],
            "final": "yes" if self.final else "no",
            "format_class": self.format_class.value,
            "prompt_digests": list(self.prompt_digests),
            "responses": list(self.responses),
        }

    @classmethod
    def from_record(cls, record: dict) -> "Decision":
        return cls(
            pair_id=record["pair_id"],
            votes=tuple(Vote(source=v["source"], outcome=Outcome(v["outcome"])) for v in record["votes"]),
            final=record["final"] == "yes",
            format_class=FormatClass(record["format_class"]),
            prompt_digests=tuple(record.get("prompt_digests", ())),
            responses=tuple(record.get("responses", ())),
        )
