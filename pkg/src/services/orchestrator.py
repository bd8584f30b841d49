"""Orchestrator - Ties the matching pipeline together.

Coordinates the flow:
1. Dataset loader (pool, pseudo-code, demonstrations)
2. Knowledge retriever (DaK index, KB clients, cache)
3. Ensemble (one prompt per knowledge source, majority vote)
4. Evaluator + Delivery (run logs, report)
"""

import asyncio
import logging
from typing import Optional

from src.config import RunConfig
from src.exceptions import DataError, RetriesExhaustedError
from src.models import (
    CandidatePair,
    Decision,
    DakIndex,
    KnowledgeSource,
    MappingPool,
    Outcome,
    PromptBundle,
    RunReport,
    SourceSpec,
    TaskKind,
)
from src.services.clients import KnowledgeClients
from src.services.dak_builder import build_dak_index
from src.services.dataset_loader import load_pool
from src.services.delivery import DeliveryService
from src.services.demonstrations import demos_for_source, load_demonstrations, summarize_demos
from src.services.ensemble import PipelineContext, intge_classify
from src.services.evaluator import build_report
from src.services.keyword_extractor import load_blacklist
from src.services.knowledge_cache import KnowledgeCache
from src.services.knowledge_retriever import KnowledgeRetriever
from src.services.llm_backends import LLMBackend, create_backend
from src.services.prompt_architect import PromptArchitect
from src.services.reasoning_builder import load_pseudocode

logger = logging.getLogger(__name__)

_KB_SOURCES = (KnowledgeSource.EAK, KnowledgeSource.WIKIDATA, KnowledgeSource.WIKIPEDIA)

# Shown in place of the target self-indicator when rendering offline
SELF_INDICATOR_PLACEHOLDER = "{Self-indicator}"


class Orchestrator:
    """
    Orchestrates match runs, knowledge builds and prompt dumps for one config.

    Backends and KB clients are created from the config unless injected.
    """

    def __init__(
        self,
        config: RunConfig,
        backend: Optional[LLMBackend] = None,
        clients: Optional[KnowledgeClients] = None,
    ):
        self.config = config
        self.backend = backend
        self.clients = clients
        self.delivery = DeliveryService(config.output_dir)
        self.pool: Optional[MappingPool] = None
        self.retriever: Optional[KnowledgeRetriever] = None
        self.context: Optional[PipelineContext] = None
        self._owns_backend = backend is None
        self._owns_clients = clients is None

    def _dak_index(self, members: set[KnowledgeSource]) -> Optional[DakIndex]:
        if KnowledgeSource.DAK not in members or self.config.task_kind is not TaskKind.SM:
            return None
        return build_dak_index(self.pool)

    async def prepare(self, offline: bool = False, sources: Optional[list[SourceSpec]] = None) -> None:
        """
        Load inputs and build the shared pipeline context.

        Args:
            offline: Never create a backend or KB clients; knowledge comes
                from the cache and the DaK index only
            sources: Sources whose knowledge is needed (defaults to the run's)
        """
        config = self.config
        self.pool = load_pool(config.dataset, config.task_kind)
        pseudocode = load_pseudocode(config.pseudocode, config.task_kind)
        demos = []
        if config.shots and config.demonstrations is not None:
            demos = load_demonstrations(config.demonstrations, pseudocode, config.shots)
        logger.info(f"Loaded {len(self.pool.pairs)} pairs, {len(demos)} demonstrations")

        specs = sources if sources is not None else list(config.source_set.sources)
        members = {member for spec in specs for member in spec.members}
        if not offline:
            if self.backend is None:
                self.backend = create_backend(config.backend, config.trace)
            if self.clients is None and members & set(_KB_SOURCES):
                self.clients = KnowledgeClients.create(config.knowledge, trace=config.trace)

        self.retriever = KnowledgeRetriever(
            cache=KnowledgeCache(config.cache_dir),
            backend=None if offline else self.backend,
            clients=None if offline else self.clients,
            dak_index=self._dak_index(members),
            config=config.knowledge,
            params=config.generation,
            blacklist=load_blacklist(config.knowledge.blacklist),
            seed=config.seed,
            cached_only=offline,
        )

        architect = PromptArchitect(pseudocode, config.options, config.shots)
        backend = None if offline else self.backend
        demos = await summarize_demos(demos, architect, backend, config.generation)
        per_source = {}
        for spec in specs:
            if config.options.baseline:
                per_source[spec.name] = demos
            else:
                per_source[spec.name] = await demos_for_source(
                    demos, spec, self.retriever, architect, backend, config.generation
                )

        self.context = PipelineContext(
            architect=architect,
            retriever=self.retriever,
            backend=self.backend,
            params=config.generation,
            demos=per_source,
        )

    async def classify_pool(self, pairs: Optional[list[CandidatePair]] = None) -> list[Decision]:
        """Classify pairs with at most `workers` in flight; ordered by pair id."""
        pairs = list(self.pool.pairs) if pairs is None else pairs
        semaphore = asyncio.Semaphore(self.config.workers)
        source_set = self.config.source_set

        async def classify(pair: CandidatePair) -> Decision:
            async with semaphore:
                return await intge_classify(pair, source_set, self.context)

        total = len(pairs)
        step = max(1, total // 10)
        tasks = [asyncio.create_task(classify(pair)) for pair in pairs]
        decisions: list[Decision] = []
        try:
            for completed, task in enumerate(asyncio.as_completed(tasks), start=1):
                decisions.append(await task)
                if completed % step == 0 or completed == total:
                    self.delivery.send_progress_update(completed, total)
        except BaseException:
            for task in tasks:
                task.cancel()
            await asyncio.gather(*tasks, return_exceptions=True)
            raise
        return sorted(decisions, key=lambda d: d.pair_id)

    async def run(self) -> Optional[RunReport]:
        """
        Run the full match pipeline `runs` times and write the artifacts.

        Returns:
            RunReport, or None when the pool is unlabeled (run logs only)

        Raises:
            RetriesExhaustedError: every vote of a run was undecided
        """
        await self.prepare()
        config = self.config
        all_runs: list[list[Decision]] = []
        for run_index in range(config.runs):
            logger.info(f"Run {run_index + 1}/{config.runs}: {len(self.pool.pairs)} pairs")
            decisions = await self.classify_pool()
            votes = [v for d in decisions for v in d.votes]
            if votes and all(v.outcome is Outcome.UNDECIDED for v in votes):
                raise RetriesExhaustedError(f"run {run_index + 1}: no backend call succeeded, no report written")
            all_runs.append(decisions)

        logger.info(f"Knowledge: {dict(self.retriever.counts)}, cache {self.retriever.cache.stats()}")
        for run_index, decisions in enumerate(all_runs):
            self.delivery.write_run_log(run_index, decisions)

        labels = self.pool.labels()
        if len(labels) < len(self.pool.pairs):
            logger.warning("Pool has unlabeled pairs, skipping the report")
            return None
        report = build_report(all_runs, labels, config.aggregation)
        self.delivery.write_report(report)
        return report

    async def build_knowledge(self, spec: SourceSpec) -> dict:
        """Populate the cache for every pool pair; returns hit/built/empty counts."""
        await self.prepare(sources=[spec])
        # Demonstration lookups during prepare are not pool pairs
        self.retriever.counts.clear()
        semaphore = asyncio.Semaphore(self.config.workers)

        async def build(pair: CandidatePair) -> None:
            async with semaphore:
                await self.retriever.retrieve(pair, spec)

        await asyncio.gather(*(build(pair) for pair in self.pool.pairs))
        return dict(self.retriever.counts)

    async def render_pair(self, pair_id: str) -> list[PromptBundle]:
        """Match prompts for one pair, one per source, without any backend call."""
        await self.prepare(offline=True)
        pair = self.pool.get(pair_id)
        if pair is None:
            raise DataError(f"unknown pair id: {pair_id}")

        ctx = self.context
        options = self.config.options
        bundles = []
        for spec in self.config.source_set.sources:
            source_options = options if spec.self_indicator else options.model_copy(update={"self_indicator": False})
            knowledge = [] if options.baseline else await ctx.retriever.retrieve(pair, spec)
            bundles.append(
                ctx.architect.render(
                    pair,
                    knowledge,
                    ctx.demos.get(spec.name, []),
                    source=spec.name,
                    self_indicator=SELF_INDICATOR_PLACEHOLDER,
                    options=source_options,
                )
            )
        return bundles

    async def aclose(self) -> None:
        """Close the backend and KB clients this orchestrator created."""
        if self._owns_backend and self.backend is not None:
            await self.backend.aclose()
        if self._owns_clients and self.clients is not None:
            await self.clients.aclose()
