"""Evaluation metrics, format audits and run reports."""

from enum import Enum
from typing import Optional, Union

from pydantic import BaseModel, ConfigDict, Field

Count = Union[int, float]


class AggregationMode(str, Enum):
    BEST_F1 = "best_f1"
    MEAN = "mean"


class Metrics(BaseModel):
    """Confusion matrix and derived scores.

    Counts are integers for a single run and may be fractional after
    mean aggregation.
    """

    model_config = ConfigDict(frozen=True)

    accuracy: float = Field(ge=0.0, le=1.0)
    precision: float = Field(ge=0.0, le=1.0)
    recall: float = Field(ge=0.0, le=1.0)
    f1: float = Field(ge=0.0, le=1.0)
    tp: Count = 0
    fp: Count = 0
    tn: Count = 0
    fn: Count = 0


class FormatAudit(BaseModel):
    model_config = ConfigDict(frozen=True)

    well_formatted: int = 0
    badly_formatted: int = 0
    eliminated: int = 0


class RunReport(BaseModel):
    """Aggregated result of `runs` repeated match runs."""

    model_config = ConfigDict(frozen=True)

    metrics: Metrics
    audit: FormatAudit
    runs: tuple[Metrics, ...]
    aggregation: AggregationMode
    selected_run: Optional[int] = None

    def to_summary(self) -> dict:
        return {
            "accuracy": self.metrics.accuracy,
            "f1": self.metrics.f1,
            "precision": self.metrics.precision,
            "recall": self.metrics.recall,
            "audit": self.audit.model_dump(),
            "aggregation": self.aggregation.value,
            "selected_run": self.selected_run,
            "runs": [m.model_dump() for m in self.runs],
        }
