"""Domain models for the matching pipeline."""

from .pool import (
    TaskKind,
    ErrorTag,
    SchemaItem,
    EntityItem,
    Item,
    CandidatePair,
    MappingPool,
    DatasetStats,
    item_from_record,
)
from .pseudocode import Branch, Statement, PseudoCode, ConditionTrace, ReasoningSteps
from .knowledge import (
    KnowledgeSource,
    KnowledgeItem,
    DakIndex,
    KeywordSet,
    SourceSpec,
    SourceSet,
)
from .prompt import (
    SummaryStrategy,
    PromptOptions,
    Demonstration,
    SelfIndicator,
    PromptBundle,
)
from .llm import GenerationParams, LLMResponse, Outcome, ParsedVerdict
from .decision import FormatClass, Vote, Decision
from .metrics import AggregationMode, Metrics, FormatAudit, RunReport
from .mention import Mention, GenConfig

__all__ = [
    "TaskKind",
    "ErrorTag",
    "SchemaItem",
    "EntityItem",
    "Item",
    "CandidatePair",
    "MappingPool",
    "DatasetStats",
    "item_from_record",
    "Branch",
    "Statement",
    "PseudoCode",
    "ConditionTrace",
    "ReasoningSteps",
    "KnowledgeSource",
    "KnowledgeItem",
    "DakIndex",
    "KeywordSet",
    "SourceSpec",
    "SourceSet",
    "SummaryStrategy",
    "PromptOptions",
    "Demonstration",
    "SelfIndicator",
    "PromptBundle",
    "GenerationParams",
    "LLMResponse",
    "Outcome",
    "ParsedVerdict",
    "FormatClass",
    "Vote",
    "Decision",
    "AggregationMode",
    "Metrics",
    "FormatAudit",
    "RunReport",
    "Mention",
    "GenConfig",
]
