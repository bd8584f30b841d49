"""Generation ensembling: one prompt per knowledge source, majority vote."""

import asyncio
import logging
from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

from src.exceptions import FATAL_BACKEND_ERRORS, BackendError, DataError
from src.models import (
    CandidatePair,
    Decision,
    Demonstration,
    FormatClass,
    GenerationParams,
    Outcome,
    ParsedVerdict,
    SourceSet,
    SourceSpec,
    SummaryStrategy,
    Vote,
)
from src.services.knowledge_retriever import KnowledgeRetriever
from src.services.llm_backends import LLMBackend, complete
from src.services.prompt_architect import PromptArchitect
from src.services.verdict_parser import parse_verdict

logger = logging.getLogger(__name__)


def vote(votes: Iterable[Union[Outcome, ParsedVerdict]]) -> tuple[bool, FormatClass]:
    """
    Majority vote with ill-formed votes counted as No.

    A strict majority of Yes wins; ties go to No. When ill-formed votes
    exist, the decision is Eliminated if it would be the same with all
    of them read as Yes, otherwise BadlyFormatted.
    """
    outcomes = [v.outcome if isinstance(v, ParsedVerdict) else v for v in votes]
    if not outcomes:
        raise DataError("cannot vote over zero sources")

    total = len(outcomes)
    yes = sum(1 for o in outcomes if o is Outcome.YES)
    ill_formed = sum(1 for o in outcomes if o.is_ill_formed)
    final = yes * 2 > total

    if not ill_formed:
        return final, FormatClass.WELL_FORMATTED
    if ((yes + ill_formed) * 2 > total) == final:
        return final, FormatClass.ELIMINATED
    return final, FormatClass.BADLY_FORMATTED


@dataclass
class PipelineContext:
    """Everything one pair classification needs besides the pair itself."""

    architect: PromptArchitect
    retriever: KnowledgeRetriever
    backend: LLMBackend
    params: GenerationParams = field(default_factory=GenerationParams)
    demos: dict[str, list[Demonstration]] = field(default_factory=dict)


@dataclass
class SourceResult:
    vote: Vote
    digest: str = ""
    response: str = ""


async def classify_with_source(
    pair: CandidatePair,
    spec: SourceSpec,
    ctx: PipelineContext,
    summarized: Optional[tuple[str, str]] = None,
) -> SourceResult:
    """Retrieve, (self-indicate), render, complete and parse for one source."""
    options = ctx.architect.options
    if not spec.self_indicator:
        options = options.model_copy(update={"self_indicator": False})

    digest = ""
    try:
        knowledge = [] if options.baseline else await ctx.retriever.retrieve(pair, spec)
        indicator_text = None
        if options.self_indicator and not options.baseline:
            indicator = await ctx.architect.extract_self_indicator(pair, knowledge, ctx.backend, ctx.params)
            indicator_text = indicator.text if indicator else None

        bundle = ctx.architect.render(
            pair,
            knowledge,
            ctx.demos.get(spec.name, []),
            source=spec.name,
            self_indicator=indicator_text,
            summarized=summarized,
            options=options,
        )
        digest = bundle.digest
        response = await complete(ctx.backend, bundle, ctx.params)
    except FATAL_BACKEND_ERRORS:
        raise
    except BackendError as e:
        logger.warning(f"Pair {pair.id} source {spec.name}: no answer, voting undecided ({e})")
        return SourceResult(vote=Vote(source=spec.name, outcome=Outcome.UNDECIDED), digest=digest)

    outcome = parse_verdict(response).outcome
    return SourceResult(vote=Vote(source=spec.name, outcome=outcome), digest=digest, response=response.text)


async def intge_classify(pair: CandidatePair, source_set: SourceSet, ctx: PipelineContext) -> Decision:
    """
    Classify one pair with one prompt per knowledge source.

    Args:
        pair: Target pair
        source_set: Ordered knowledge sources
        ctx: Shared pipeline context

    Returns:
        Decision with votes in source order
    """
    options = ctx.architect.options
    summarized = None
    if options.summary_strategy is SummaryStrategy.ALL and not options.baseline:
        summarized = await ctx.architect.summarize_pair(pair, ctx.backend, ctx.params)

    results = await asyncio.gather(
        *(classify_with_source(pair, spec, ctx, summarized) for spec in source_set.sources)
    )
    final, format_class = vote(result.vote.outcome for result in results)
    return Decision(
        pair_id=pair.id,
        votes=tuple(result.vote for result in results),
        final=final,
        format_class=format_class,
        prompt_digests=tuple(result.digest for result in results),
        responses=tuple(result.response for result in results),
    )
