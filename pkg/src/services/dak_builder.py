"""Dataset-as-knowledge: mine object metadata from the candidate pool itself.

An object is the table token of a rendered schema name. Its metadata is
every table-description segment, from some other pair, that mentions
the object as a whole word.
"""

import logging
import re
from collections import defaultdict
from functools import lru_cache

from src.exceptions import DataError
from src.models import (
    CandidatePair,
    DakIndex,
    KnowledgeItem,
    KnowledgeSource,
    MappingPool,
    TaskKind,
)
from src.services.dataset_loader import render_item

logger = logging.getLogger(__name__)


@lru_cache(maxsize=4096)
def word_pattern(word: str) -> re.Pattern:
    """Case-insensitive whole-word matcher for a word or phrase."""
    return re.compile(rf"(?<!\w){re.escape(word)}(?!\w)", re.IGNORECASE)


def object_names(pair: CandidatePair) -> list[str]:
    """Table tokens (text before the first dash) of both rendered names."""
    names = []
    for item in (pair.left, pair.right):
        token = render_item(item)[0].partition("-")[0].strip()
        if token and token not in names:
            names.append(token)
    return names


def table_segments(pair: CandidatePair) -> list[str]:
    """Table-description segments (text before the first semicolon)."""
    segments = []
    for item in (pair.left, pair.right):
        segment = render_item(item)[1].partition(";")[0].strip()
        if segment and segment not in segments:
            segments.append(segment)
    return segments


def build_dak_index(pool: MappingPool) -> DakIndex:
    """
    Build the object -> metadata index for a schema-matching pool.

    An object named by pair i collects a segment when that segment
    belongs to a pair j with j != i. Objects and segments are
    deduplicated before matching, so each distinct (object, segment)
    is tested once.

    Args:
        pool: Schema-matching pool

    Returns:
        DakIndex with lowercase keys and sorted, deduplicated metadata
    """
    if pool.task_kind is not TaskKind.SM:
        raise DataError("DaK needs a schema-matching pool")

    object_pairs: dict[str, set[int]] = defaultdict(set)
    segment_pairs: dict[str, set[int]] = defaultdict(set)
    for position, pair in enumerate(pool.pairs):
        for name in object_names(pair):
            object_pairs[name].add(position)
        for segment in table_segments(pair):
            segment_pairs[segment].add(position)

    entries: dict[str, set[str]] = defaultdict(set)
    for name, owners in object_pairs.items():
        pattern = word_pattern(name)
        for segment, holders in segment_pairs.items():
            # Only one pair carries both: no i != j combination exists.
            if len(owners) == 1 and owners == holders:
                continue
            if pattern.search(segment):
                entries[name.lower()].add(segment)

    index = DakIndex(entries={key: tuple(sorted(values)) for key, values in sorted(entries.items())})
    logger.info(f"DaK index: {len(index)} objects from {len(pool.pairs)} pairs")
    return index


def dak_lookup(index: DakIndex, pair: CandidatePair) -> list[KnowledgeItem]:
    """Knowledge items for every index key found in either rendered name, in key order."""
    if pair.kind is not TaskKind.SM:
        raise DataError(f"DaK lookup needs a schema pair, got {pair.kind.value} pair {pair.id}")

    names = [render_item(pair.left)[0], render_item(pair.right)[0]]
    items = []
    for key in sorted(index.entries):
        pattern = word_pattern(key)
        if any(pattern.search(name) for name in names):
            metadata = "; ".join(index.entries[key])
            items.append(KnowledgeItem(source=KnowledgeSource.DAK, text=f"{key}: {metadata}", origin_key=key))
    return items
