"""Demonstration files and per-source demonstration preparation."""

import logging
from pathlib import Path
from typing import Optional

from pydantic import ValidationError

from src.exceptions import DataError
from src.models import (
    CandidatePair,
    ConditionTrace,
    Demonstration,
    GenerationParams,
    KnowledgeItem,
    KnowledgeSource,
    PseudoCode,
    SourceSpec,
    SummaryStrategy,
)
from src.services.dataset_loader import iter_jsonl
from src.services.knowledge_retriever import KnowledgeRetriever
from src.services.llm_backends import LLMBackend
from src.services.prompt_architect import PromptArchitect
from src.services.reasoning_builder import construct_reasoning

logger = logging.getLogger(__name__)


def demonstration_from_record(record: dict, pseudocode: PseudoCode) -> Demonstration:
    """Build a demonstration and its reasoning from one JSONL record."""
    pair = CandidatePair.from_record(record["pair"])
    if pair.kind is not pseudocode.task_kind:
        raise DataError(
            f"demonstration {record['demo_id']} is {pair.kind.value}, "
            f"pseudo-code is {pseudocode.task_kind.value}"
        )
    trace = ConditionTrace(outcomes=tuple(record["trace"]))
    summaries = record.get("summaries")
    shipped = {
        KnowledgeSource.parse(name).value: tuple(texts)
        for name, texts in (record.get("knowledge") or {}).items()
    }
    return Demonstration(
        demo_id=record["demo_id"],
        pair=pair,
        trace=trace,
        label=record["label"],
        reasoning=construct_reasoning(pseudocode, trace, pair_context=record["demo_id"]),
        summarized=(summaries["left"], summaries["right"]) if summaries else None,
        self_indicator=record.get("self_indicator"),
        shipped_knowledge=shipped,
    )


def load_demonstrations(path: Path, pseudocode: PseudoCode, shots: int) -> list[Demonstration]:
    """
    Load the first `shots` demonstrations of a file, in file order.

    Raises:
        DataError: malformed record, reasoning that contradicts the label,
            or fewer demonstrations than `shots`
    """
    demos: list[Demonstration] = []
    if shots == 0:
        return demos
    for lineno, record in iter_jsonl(path):
        try:
            demos.append(demonstration_from_record(record, pseudocode))
        except DataError as e:
            raise DataError(f"{path}:{lineno}: {e}") from e
        except (KeyError, TypeError, ValueError, ValidationError) as e:
            raise DataError(f"{path}:{lineno}: malformed demonstration: {e}") from e
        if len(demos) == shots:
            break
    if len(demos) < shots:
        raise DataError(f"{path}: {shots}-shot prompting needs {shots} demonstrations, found {len(demos)}")
    return demos


async def summarize_demos(
    demos: list[Demonstration],
    architect: PromptArchitect,
    backend: Optional[LLMBackend],
    params: Optional[GenerationParams] = None,
) -> list[Demonstration]:
    """Fill in missing summaries when the summary strategy asks for them."""
    if architect.options.summary_strategy is SummaryStrategy.NONE or architect.options.baseline:
        return demos
    prepared = []
    for demo in demos:
        if demo.summarized is None and backend is not None:
            demo = await architect.summarize_demo(demo, backend, params)
        prepared.append(demo)
    return prepared


async def demos_for_source(
    demos: list[Demonstration],
    spec: SourceSpec,
    retriever: KnowledgeRetriever,
    architect: PromptArchitect,
    backend: Optional[LLMBackend] = None,
    params: Optional[GenerationParams] = None,
) -> list[Demonstration]:
    """
    Attach this source's knowledge (and self-indicator) to each demonstration.

    Shipped knowledge for a member source wins over retrieval. A missing
    self-indicator is extracted when the source uses one and a backend
    is available.
    """
    prepared = []
    for demo in demos:
        items: list[KnowledgeItem] = []
        for member in spec.members:
            if member is KnowledgeSource.NULL:
                continue
            shipped = demo.shipped_knowledge.get(member.value)
            if shipped is not None:
                items.extend(
                    KnowledgeItem(source=member, text=text, origin_key=demo.demo_id) for text in shipped
                )
            else:
                items.extend(await retriever.retrieve_member(demo.pair, member))

        update: dict = {"knowledge": tuple(items)}
        wants_indicator = spec.self_indicator and architect.options.self_indicator
        if wants_indicator and not demo.self_indicator and backend is not None:
            indicator = await architect.extract_self_indicator(demo.pair, items, backend, params)
            update["self_indicator"] = indicator.text if indicator else None
        prepared.append(demo.model_copy(update=update))
    return prepared
