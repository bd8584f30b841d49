"""Cache-first knowledge retrieval for one pair and one knowledge source."""

import asyncio
import hashlib
import json
import logging
from collections import Counter
from typing import Iterable, Optional

from src.config import KnowledgeConfig
from src.exceptions import ConfigError
from src.models import (
    CandidatePair,
    DakIndex,
    GenerationParams,
    KeywordSet,
    KnowledgeItem,
    KnowledgeSource,
    SourceSpec,
    TaskKind,
)
from src.services.clients import KnowledgeClients
from src.services.dak_builder import dak_lookup
from src.services.eak_builder import eak_build
from src.services.encyclopedia import fetch_wikidata_facts, fetch_wikipedia_extracts
from src.services.keyword_extractor import build_keyword_set
from src.services.knowledge_cache import KnowledgeCache
from src.services.llm_backends import LLMBackend

logger = logging.getLogger(__name__)


class KnowledgeRetriever:
    """
    Retrieves knowledge lists per (pair, source).

    Composite sources concatenate their members in declared order; each
    member is cached on its own. Concurrent requests for the same entry
    build it once.
    """

    def __init__(
        self,
        cache: KnowledgeCache,
        backend: Optional[LLMBackend] = None,
        clients: Optional[KnowledgeClients] = None,
        dak_index: Optional[DakIndex] = None,
        config: Optional[KnowledgeConfig] = None,
        params: Optional[GenerationParams] = None,
        blacklist: Iterable[str] = (),
        seed: int = 0,
        cached_only: bool = False,
    ):
        self.cache = cache
        self.backend = backend
        self.clients = clients
        self.dak_index = dak_index
        self.config = config or KnowledgeConfig()
        self.params = params or GenerationParams()
        self.blacklist = frozenset(blacklist)
        self.seed = seed
        # Offline mode: only the cache and the DaK index are consulted
        self.cached_only = cached_only
        self.counts: Counter = Counter()
        self._locks: dict[tuple[str, str], asyncio.Lock] = {}
        self._dak_fingerprint = ""
        if dak_index is not None:
            payload = json.dumps(dak_index.entries, sort_keys=True, ensure_ascii=False)
            self._dak_fingerprint = hashlib.sha256(payload.encode("utf-8")).hexdigest()

    def _lock_for(self, key: tuple[str, str]) -> asyncio.Lock:
        return self._locks.setdefault(key, asyncio.Lock())

    def _digest(self, pair: CandidatePair, source: KnowledgeSource) -> str:
        if source is KnowledgeSource.DAK:
            # DaK entries depend on the whole pool, not just the pair.
            return hashlib.sha256(f"{self._dak_fingerprint}:{pair.digest()}".encode("utf-8")).hexdigest()
        return pair.digest()

    async def retrieve(self, pair: CandidatePair, spec: SourceSpec) -> list[KnowledgeItem]:
        """
        Knowledge for a pair from one (possibly composite) source.

        Args:
            pair: Target or demonstration pair
            spec: Source specification, e.g. Wikipedia+EaK

        Returns:
            Concatenated member lists; empty for the Null source
        """
        items: list[KnowledgeItem] = []
        for member in spec.members:
            items.extend(await self.retrieve_member(pair, member))
        return items

    async def retrieve_member(self, pair: CandidatePair, source: KnowledgeSource) -> list[KnowledgeItem]:
        if source is KnowledgeSource.NULL:
            return []

        digest = self._digest(pair, source)
        cached = self.cache.get_items(source.value, digest)
        if cached is not None:
            self.counts["hit"] += 1
            return cached
        if self.cached_only and source is not KnowledgeSource.DAK:
            self.counts["uncached"] += 1
            logger.info(f"No cached {source.value} knowledge for {pair.id}")
            return []

        async with self._lock_for((source.value, digest)):
            cached = self.cache.get_items(source.value, digest)
            if cached is not None:
                self.counts["hit"] += 1
                return cached
            items = await self._build(pair, source)
            await self.cache.put_items(source.value, digest, items)

        self.counts["built" if items else "empty"] += 1
        logger.debug(f"{source.value} knowledge for {pair.id}: {len(items)} items")
        return items

    async def keywords_for(self, pair: CandidatePair) -> KeywordSet:
        digest = pair.digest()
        async with self._lock_for((KnowledgeSource.NULL.value, digest)):
            keywords = self.cache.get_keywords(digest)
            if keywords is None:
                if self.backend is None:
                    raise ConfigError("keyword extraction needs an LLM backend")
                keywords = await build_keyword_set(pair, self.backend, self.blacklist, self.params)
                await self.cache.put_keywords(digest, keywords)
        return keywords

    def _require_clients(self, source: KnowledgeSource) -> KnowledgeClients:
        if self.clients is None:
            raise ConfigError(f"{source.value} knowledge needs knowledge-base clients")
        return self.clients

    async def _build(self, pair: CandidatePair, source: KnowledgeSource) -> list[KnowledgeItem]:
        if source is KnowledgeSource.DAK:
            if pair.kind is not TaskKind.SM:
                logger.debug(f"DaK does not apply to {pair.kind.value} pair {pair.id}")
                return []
            if self.dak_index is None:
                raise ConfigError("DaK knowledge needs an index built from the pool")
            return dak_lookup(self.dak_index, pair)

        clients = self._require_clients(source)
        keywords = (await self.keywords_for(pair)).filtered
        if not keywords:
            return []

        if source is KnowledgeSource.EAK:
            return await eak_build(
                list(keywords),
                clients.terminology,
                max_children=self.config.eak_max_children,
                seed=self.seed,
                top_k=self.config.eak_top_k,
            )
        if source is KnowledgeSource.WIKIDATA:
            return await fetch_wikidata_facts(list(keywords), clients.wikidata, self.config.facts_limit)
        return await fetch_wikipedia_extracts(
            list(keywords),
            clients.wikidata,
            clients.wikipedia,
            self.backend,
            self.params,
            self.config.extract_word_limit,
        )
