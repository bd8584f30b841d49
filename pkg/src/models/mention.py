"""Entity-linking mentions and entity-matching pool generation settings."""

from pydantic import BaseModel, ConfigDict, Field


class Mention(BaseModel):
    """A recognized mention linked to a concept code, with its sentence."""

    model_config = ConfigDict(frozen=True)

    surface: str = Field(min_length=1)
    concept_id: str = Field(min_length=1)
    sentence: str = Field(min_length=1)


class GenConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    negative_quota: int = Field(default=100_000, ge=0)
    similarity: str = "trigram"
    seed: int = 0
    random_negatives: bool = False
