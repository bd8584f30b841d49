"""Candidate pool model: schema/entity items, pairs and dataset statistics."""

import hashlib
import json
from enum import Enum
from typing import Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class TaskKind(str, Enum):
    """Matching task: schema matching or entity matching."""

    SM = "SM"
    EM = "EM"


class ErrorTag(str, Enum):
    """Manual error annotation. Never written by the pipeline."""

    IR = "IR"
    OM = "OM"
    PM = "PM"


class SchemaItem(BaseModel):
    """A table column with its table and column descriptions."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    table_name: str = Field(alias="table", min_length=1)
    column_name: str = Field(alias="column", min_length=1)
    table_description: str = Field(default="", alias="table_desc")
    column_description: str = Field(default="", alias="column_desc")

    @property
    def kind(self) -> TaskKind:
        return TaskKind.SM

    def to_record(self) -> dict:
        return {
            "table": self.table_name,
            "column": self.column_name,
            "table_desc": self.table_description,
            "column_desc": self.column_description,
        }


class EntityItem(BaseModel):
    """A named entity with an ordered list of attributes."""

    model_config = ConfigDict(frozen=True)

    name: str = Field(min_length=1)
    attrs: tuple[tuple[str, str], ...] = ()

    @property
    def kind(self) -> TaskKind:
        return TaskKind.EM

    @field_validator("attrs", mode="before")
    @classmethod
    def _coerce_attrs(cls, value):
        # Records carry [{"k": ..., "v": ...}]; code passes tuples.
        if isinstance(value, (list, tuple)):
            return tuple(
                (entry["k"], entry["v"]) if isinstance(entry, dict) else tuple(entry)
                for entry in value
            )
        return value

    @field_validator("attrs")
    @classmethod
    def _unique_keys(cls, value: tuple[tuple[str, str], ...]):
        keys = [key for key, _ in value]
        if len(keys) != len(set(keys)):
            raise ValueError(f"duplicate attribute keys: {keys}")
        return value

    def to_record(self) -> dict:
        return {"name": self.name, "attrs": [{"k": k, "v": v} for k, v in self.attrs]}


Item = Union[SchemaItem, EntityItem]


def item_from_record(kind: TaskKind, record: dict) -> Item:
    """Build an item of the given kind from its JSON object."""
    if kind is TaskKind.SM:
        return SchemaItem.model_validate(record)
    return EntityItem.model_validate(record)


class CandidatePair(BaseModel):
    """One candidate mapping {r, r'} to classify as match / no-match."""

    model_config = ConfigDict(frozen=True)

    id: str = Field(min_length=1)
    left: Item
    right: Item
    label: Optional[bool] = None
    error_tag: Optional[ErrorTag] = None

    @model_validator(mode="after")
    def _same_kind(self) -> "CandidatePair":
        if self.left.kind is not self.right.kind:
            raise ValueError("left and right items must be the same kind")
        return self

    @property
    def kind(self) -> TaskKind:
        return self.left.kind

    def digest(self) -> str:
        """Content digest of both items; independent of id and label."""
        payload = json.dumps(
            [self.kind.value, self.left.to_record(), self.right.to_record()],
            sort_keys=True,
            ensure_ascii=False,
        )
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()

    @classmethod
    def from_record(cls, record: dict) -> "CandidatePair":
        kind = TaskKind(record["kind"])
        return cls(
            id=record["id"],
            left=item_from_record(kind, record["left"]),
            right=item_from_record(kind, record["right"]),
            label=record.get("label"),
            error_tag=record.get("error_tag"),
        )

    def to_record(self) -> dict:
        record = {
            "id": self.id,
            "kind": self.kind.value,
            "left": self.left.to_record(),
            "right": self.right.to_record(),
        }
        if self.label is not None:
            record["label"] = self.label
        if self.error_tag is not None:
            record["error_tag"] = self.error_tag.value
        return record


class MappingPool(BaseModel):
    """Pre-enumerated candidate pairs of one task kind, in file order."""

    model_config = ConfigDict(frozen=True)

    task_kind: TaskKind
    pairs: tuple[CandidatePair, ...] = ()

    @model_validator(mode="after")
    def _consistent(self) -> "MappingPool":
        seen: set[str] = set()
        for pair in self.pairs:
            if pair.kind is not self.task_kind:
                raise ValueError(f"pair {pair.id} is {pair.kind.value}, pool is {self.task_kind.value}")
            if pair.id in seen:
                raise ValueError(f"duplicate pair id: {pair.id}")
            seen.add(pair.id)
        return self

    def get(self, pair_id: str) -> Optional[CandidatePair]:
        for pair in self.pairs:
            if pair.id == pair_id:
                return pair
        return None

    def labels(self) -> dict[str, bool]:
        return {p.id: p.label for p in self.pairs if p.label is not None}


class DatasetStats(BaseModel):
    """Pool size, positives and imbalance ratio (absent without positives)."""

    model_config = ConfigDict(frozen=True)

    n_instances: int = Field(ge=0)
    n_positive: int = Field(ge=0)
    imbalance_ratio: Optional[float] = Field(default=None, ge=0)
