"""Persistent knowledge cache: one JSONL file per namespace.

Item lines look like `{"digest": ..., "items": [{"source", "text", "origin_key"}]}`;
the `keywords` namespace stores `{"digest", "raw", "filtered"}`. Later
lines win; unreadable lines are skipped, so the entry is rebuilt.
"""

import asyncio
import json
import logging
from pathlib import Path
from typing import Optional

from pydantic import ValidationError

from src.models import KeywordSet, KnowledgeItem

logger = logging.getLogger(__name__)

KEYWORDS_NAMESPACE = "keywords"


class KnowledgeCache:
    """Knowledge lists and keyword sets keyed by (namespace, pair digest)."""

    def __init__(self, root: Path):
        self.root = Path(root)
        self._entries: dict[str, dict[str, dict]] = {}
        self._lock = asyncio.Lock()
        self.hits = 0
        self.misses = 0

    def path_for(self, namespace: str) -> Path:
        return self.root / f"{namespace}.jsonl"

    def _load(self, namespace: str) -> dict[str, dict]:
        if namespace in self._entries:
            return self._entries[namespace]

        entries: dict[str, dict] = {}
        path = self.path_for(namespace)
        if path.exists():
            corrupt = 0
            with path.open(encoding="utf-8") as handle:
                for line in handle:
                    if not line.strip():
                        continue
                    try:
                        record = json.loads(line)
                        entries[record["digest"]] = record
                    except (ValueError, KeyError, TypeError):
                        corrupt += 1
            if corrupt:
                logger.warning(f"Skipped {corrupt} corrupt lines in {path}")
        self._entries[namespace] = entries
        return entries

    async def _append(self, namespace: str, record: dict) -> None:
        async with self._lock:
            self._load(namespace)[record["digest"]] = record
            self.root.mkdir(parents=True, exist_ok=True)
            with self.path_for(namespace).open("a", encoding="utf-8") as handle:
                handle.write(json.dumps(record, ensure_ascii=False) + "\n")

    def get_items(self, namespace: str, digest: str) -> Optional[list[KnowledgeItem]]:
        record = self._load(namespace).get(digest)
        if record is None:
            self.misses += 1
            return None
        try:
            items = [KnowledgeItem.model_validate(raw) for raw in record["items"]]
        except (ValidationError, KeyError, TypeError) as e:
            logger.warning(f"Rebuilding corrupt cache entry {namespace}/{digest[:12]}: {e}")
            self.misses += 1
            return None
        self.hits += 1
        return items

    async def put_items(self, namespace: str, digest: str, items: list[KnowledgeItem]) -> None:
        await self._append(namespace, {"digest": digest, "items": [item.to_record() for item in items]})

    def get_keywords(self, digest: str) -> Optional[KeywordSet]:
        record = self._load(KEYWORDS_NAMESPACE).get(digest)
        if record is None:
            return None
        try:
            return KeywordSet(raw=tuple(record["raw"]), filtered=tuple(record["filtered"]))
        except (ValidationError, KeyError, TypeError):
            return None

    async def put_keywords(self, digest: str, keywords: KeywordSet) -> None:
        await self._append(
            KEYWORDS_NAMESPACE,
            {"digest": digest, "raw": list(keywords.raw), "filtered": list(keywords.filtered)},
        )

    def stats(self) -> dict:
        return {"hits": self.hits, "misses": self.misses}
