"""Build entity-matching pools from concept-linked mentions.

Positives are the least similar surface pair within each concept, so
they are hard to match on spelling alone. Negatives are the most similar
surface pairs across concepts.
"""

import hashlib
import heapq
import logging
import random
from itertools import combinations
from pathlib import Path
from typing import Callable, Iterator, NamedTuple

from pydantic import ValidationError
from rapidfuzz import fuzz

from src.exceptions import ConfigError, DataError
from src.models import CandidatePair, EntityItem, GenConfig, MappingPool, Mention, TaskKind
from src.services.dataset_loader import iter_jsonl

logger = logging.getLogger(__name__)


def _trigrams(text: str) -> set[str]:
    padded = f"##{text}##"
    return {padded[i : i + 3] for i in range(len(padded) - 2)}


def trigram_similarity(a: str, b: str) -> float:
    """Jaccard overlap of padded character trigrams of lowercased strings."""
    a, b = a.lower(), b.lower()
    if a == b:
        return 1.0
    left, right = _trigrams(a), _trigrams(b)
    common = len(left & right)
    union = len(left | right)
    if common == union:
        # Different strings can share every trigram ("aaaa" / "aaaaa").
        return common / (union + 1)
    return common / union


def levenshtein_similarity(a: str, b: str) -> float:
    """Normalized indel similarity of lowercased strings."""
    return fuzz.ratio(a.lower(), b.lower()) / 100.0


SIMILARITIES: dict[str, Callable[[str, str], float]] = {
    "trigram": trigram_similarity,
    "levenshtein": levenshtein_similarity,
}


def similarity(a: str, b: str, metric: str = "trigram") -> float:
    try:
        return SIMILARITIES[metric](a, b)
    except KeyError as e:
        raise ConfigError(f"unknown similarity '{metric}', expected one of {sorted(SIMILARITIES)}") from e


class _Candidate(NamedTuple):
    similarity: float
    tiebreak: str
    left_concept: str
    left_surface: str
    right_concept: str
    right_surface: str


def load_mentions(path: Path) -> list[Mention]:
    mentions = []
    for lineno, record in iter_jsonl(path):
        try:
            mentions.append(Mention.model_validate(record))
        except ValidationError as e:
            first = e.errors()[0]
            field = ".".join(str(part) for part in first["loc"]) or "record"
            raise DataError(f"{path}:{lineno}: field '{field}': {first['msg']}") from e
    if not mentions:
        raise DataError(f"{path}: no mentions")
    return mentions


def representatives(mentions: list[Mention]) -> dict[str, dict[str, str]]:
    """concept -> surface -> context sentence (the smallest one, for determinism)."""
    grouped: dict[str, dict[str, str]] = {}
    for mention in mentions:
        surfaces = grouped.setdefault(mention.concept_id, {})
        current = surfaces.get(mention.surface)
        if current is None or mention.sentence < current:
            surfaces[mention.surface] = mention.sentence
    return grouped


def _entity(surface: str, sentence: str) -> EntityItem:
    return EntityItem(name=surface, attrs=(("context", sentence),))


def _inter_concept(
    grouped: dict[str, dict[str, str]],
    score: Callable[[str, str], float],
    seed: int,
) -> Iterator[_Candidate]:
    concepts = sorted(grouped)
    for left_concept, right_concept in combinations(concepts, 2):
        for left_surface in sorted(grouped[left_concept]):
            for right_surface in sorted(grouped[right_concept]):
                key = f"{seed}|{left_concept}|{left_surface}|{right_concept}|{right_surface}"
                yield _Candidate(
                    similarity=score(left_surface, right_surface),
                    tiebreak=hashlib.sha256(key.encode("utf-8")).hexdigest(),
                    left_concept=left_concept,
                    left_surface=left_surface,
                    right_concept=right_concept,
                    right_surface=right_surface,
                )


def _reservoir(candidates: Iterator[_Candidate], quota: int, seed: int) -> list[_Candidate]:
    rng = random.Random(seed)
    sample: list[_Candidate] = []
    for seen, candidate in enumerate(candidates):
        if len(sample) < quota:
            sample.append(candidate)
            continue
        slot = rng.randint(0, seen)
        if slot < quota:
            sample[slot] = candidate
    return sample


def build_pool(mentions: list[Mention], cfg: GenConfig) -> MappingPool:
    """
    Build a labeled entity-matching pool.

    Args:
        mentions: Mentions with concept ids and context sentences
        cfg: Negative quota, similarity metric, seed, sampling mode

    Returns:
        Pool of positives (one per concept with two or more surfaces)
        followed by up to `negative_quota` negatives
    """
    if len(mentions) < 2:
        raise DataError("need at least two mentions to build a pool")
    score = SIMILARITIES.get(cfg.similarity)
    if score is None:
        raise ConfigError(f"unknown similarity '{cfg.similarity}', expected one of {sorted(SIMILARITIES)}")

    grouped = representatives(mentions)
    pairs: list[CandidatePair] = []

    for concept in sorted(grouped):
        surfaces = sorted(grouped[concept])
        if len(surfaces) < 2:
            logger.debug(f"Concept {concept} has a single surface, no positive")
            continue
        _, left, right = min((score(a, b), a, b) for a, b in combinations(surfaces, 2))
        pairs.append(
            CandidatePair(
                id=f"pos-{len(pairs):06d}",
                left=_entity(left, grouped[concept][left]),
                right=_entity(right, grouped[concept][right]),
                label=True,
            )
        )
    positives = len(pairs)

    candidates = _inter_concept(grouped, score, cfg.seed)
    if cfg.negative_quota == 0:
        selected: list[_Candidate] = []
    elif cfg.random_negatives:
        selected = _reservoir(candidates, cfg.negative_quota, cfg.seed)
    else:
        selected = heapq.nlargest(cfg.negative_quota, candidates, key=lambda c: (c.similarity, c.tiebreak))

    for number, candidate in enumerate(selected):
        pairs.append(
            CandidatePair(
                id=f"neg-{number:06d}",
                left=_entity(candidate.left_surface, grouped[candidate.left_concept][candidate.left_surface]),
                right=_entity(candidate.right_surface, grouped[candidate.right_concept][candidate.right_surface]),
                label=False,
            )
        )

    logger.info(f"Built pool: {positives} positives, {len(pairs) - positives} negatives")
    return MappingPool(task_kind=TaskKind.EM, pairs=tuple(pairs))
