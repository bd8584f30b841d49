"""Examples-as-knowledge: explain a keyword through its concept's children."""

import logging
import random

from src.exceptions import KnowledgeClientError
from src.models import KnowledgeItem, KnowledgeSource
from src.services.clients import TerminologyClient

logger = logging.getLogger(__name__)


async def eak_build(
    keywords: list[str],
    kb: TerminologyClient,
    max_children: int = 3,
    seed: int = 0,
    top_k: int = 1,
) -> list[KnowledgeItem]:
    """
    Phrase parent/child concept relations as example sentences.

    Args:
        keywords: Filtered keywords of one pair
        kb: Terminology client
        max_children: Children sampled per concept
        seed: Sampling seed; combined with keyword and concept id
        top_k: Concepts kept per keyword search

    Returns:
        One "One of {parent} is {child}" item per sampled child
    """
    items: list[KnowledgeItem] = []
    for keyword in keywords:
        try:
            concepts = await kb.search(keyword, limit=top_k)
        except KnowledgeClientError as e:
            logger.warning(f"EaK search failed for '{keyword}', skipping: {e}")
            continue
        if not concepts:
            logger.debug(f"EaK: no concept for '{keyword}'")
            continue

        for concept in concepts[:top_k]:
            try:
                children = await kb.children(concept.concept_id)
            except KnowledgeClientError as e:
                logger.warning(f"EaK children lookup failed for {concept.concept_id}, skipping: {e}")
                continue

            rng = random.Random(f"{seed}:{keyword}:{concept.concept_id}")
            sampled = rng.sample(children, min(max_children, len(children)))
            for child in sampled:
                items.append(
                    KnowledgeItem(
                        source=KnowledgeSource.EAK,
                        text=f"One of {concept.term} is {child.term}",
                        origin_key=keyword,
                    )
                )
    return items
