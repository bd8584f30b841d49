"""Knowledge items, the DaK index, keyword sets and knowledge-source sets."""

from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class KnowledgeSource(str, Enum):
    """Where a knowledge item came from. `Null` means no knowledge."""

    DAK = "DaK"
    EAK = "EaK"
    WIKIDATA = "Wikidata"
    WIKIPEDIA = "Wikipedia"
    NULL = "Null"

    @classmethod
    def parse(cls, name: str) -> "KnowledgeSource":
        lowered = name.strip().lower()
        for member in cls:
            if member.value.lower() == lowered:
                return member
        raise ValueError(f"unknown knowledge source: {name!r}")


class KnowledgeItem(BaseModel):
    """One natural-language knowledge sentence."""

    model_config = ConfigDict(frozen=True)

    source: KnowledgeSource
    text: str
    origin_key: str = ""

    @model_validator(mode="after")
    def _non_empty(self) -> "KnowledgeItem":
        if self.source is not KnowledgeSource.NULL and not self.text.strip():
            raise ValueError("knowledge text must be non-empty")
        return self

    def to_record(self) -> dict:
        return {"source": self.source.value, "text": self.text, "origin_key": self.origin_key}


class DakIndex(BaseModel):
    """Object name (lowercase) -> metadata segments mined from the pool."""

    model_config = ConfigDict(frozen=True)

    entries: dict[str, tuple[str, ...]] = Field(default_factory=dict)

    @field_validator("entries")
    @classmethod
    def _normalized(cls, value: dict[str, tuple[str, ...]]):
        for key in value:
            if key != key.lower():
                raise ValueError(f"DaK keys must be lowercase: {key!r}")
        return value

    def __len__(self) -> int:
        return len(self.entries)


class KeywordSet(BaseModel):
    """Raw extracted keywords and the subset surviving quality filters."""

    model_config = ConfigDict(frozen=True)

    raw: tuple[str, ...] = ()
    filtered: tuple[str, ...] = ()

    @model_validator(mode="after")
    def _subset(self) -> "KeywordSet":
        if not set(self.filtered) <= set(self.raw):
            raise ValueError("filtered keywords must come from the raw list")
        if any("," in keyword for keyword in self.raw):
            raise ValueError("keywords cannot contain commas")
        return self


class SourceSpec(BaseModel):
    """One IntGE knowledge source: a single source or a `+` composite.

    A trailing `*` turns the self-indicator off for this source.
    """

    model_config = ConfigDict(frozen=True)

    members: tuple[KnowledgeSource, ...]
    self_indicator: bool = True

    @property
    def name(self) -> str:
        return "+".join(m.value for m in self.members) + ("" if self.self_indicator else "*")

    @property
    def is_null(self) -> bool:
        return all(m is KnowledgeSource.NULL for m in self.members)

    @classmethod
    def parse(cls, expression: str) -> "SourceSpec":
        text = expression.strip()
        self_indicator = not text.endswith("*")
        members = tuple(KnowledgeSource.parse(part) for part in text.rstrip("*").split("+"))
        return cls(members=members, self_indicator=self_indicator)


class SourceSet(BaseModel):
    """The ordered knowledge sources K_1..K_N voted over by IntGE."""

    model_config = ConfigDict(frozen=True)

    sources: tuple[SourceSpec, ...]

    @model_validator(mode="after")
    def _valid(self) -> "SourceSet":
        if not self.sources:
            raise ValueError("at least one knowledge source is required")
        names = [s.name for s in self.sources]
        if len(names) != len(set(names)):
            raise ValueError(f"duplicate knowledge sources: {names}")
        return self

    @classmethod
    def parse(cls, expressions: list[str]) -> "SourceSet":
        return cls(sources=tuple(SourceSpec.parse(e) for e in expressions))

    def __len__(self) -> int:
        return len(self.sources)
