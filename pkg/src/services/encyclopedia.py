"""Encyclopedia knowledge: Wikidata facts and Wikipedia extracts per keyword."""

import logging
from typing import Optional

from src.exceptions import FATAL_BACKEND_ERRORS, BackendError, KnowledgeClientError
from src.models import GenerationParams, KnowledgeItem, KnowledgeSource
from src.services.clients import WikidataClient, WikipediaClient
from src.services.llm_backends import LLMBackend
from src.services.templates import load_template

logger = logging.getLogger(__name__)


def truncate_words(text: str, limit: int) -> str:
    return " ".join(text.split()[:limit])


async def summarize_extract(
    text: str,
    backend: Optional[LLMBackend],
    params: Optional[GenerationParams] = None,
    word_limit: int = 1000,
) -> str:
    """
    Shorten an extract to at most `word_limit` words.

    Short extracts pass through whitespace-collapsed. Longer ones are
    summarized by the backend; if that fails, or the summary is empty
    or still too long, the extract is truncated instead.
    """
    collapsed = " ".join(text.split())
    if len(collapsed.split()) <= word_limit:
        return collapsed
    if backend is None:
        return truncate_words(collapsed, word_limit)

    prompt = load_template("summarize_text").render(word_limit=str(word_limit), content=collapsed)
    try:
        response = await backend.generate(prompt, params or GenerationParams(), tag="summarize")
    except FATAL_BACKEND_ERRORS:
        raise
    except BackendError as e:
        logger.warning(f"Extract summarization failed, truncating to {word_limit} words: {e}")
        return truncate_words(collapsed, word_limit)

    summary = " ".join(response.text.split())
    if not summary or len(summary.split()) > word_limit:
        logger.warning(f"Summary unusable ({len(summary.split())} words), truncating extract")
        return truncate_words(collapsed, word_limit)
    return summary


async def fetch_wikidata_facts(
    keywords: list[str],
    wikidata: WikidataClient,
    facts_limit: int = 10,
) -> list[KnowledgeItem]:
    """One item per fact: "{entity label}: {property label} {value label}"."""
    items: list[KnowledgeItem] = []
    for keyword in keywords:
        try:
            entity = await wikidata.search_entity(keyword)
            if entity is None:
                logger.debug(f"Wikidata: no entity for '{keyword}'")
                continue
            facts = await wikidata.facts(entity.qid, limit=facts_limit)
        except KnowledgeClientError as e:
            logger.warning(f"Wikidata lookup failed for '{keyword}', skipping: {e}")
            continue
        for prop, value in facts:
            items.append(
                KnowledgeItem(
                    source=KnowledgeSource.WIKIDATA,
                    text=f"{entity.label}: {prop} {value}",
                    origin_key=keyword,
                )
            )
    return items


async def fetch_wikipedia_extracts(
    keywords: list[str],
    wikidata: WikidataClient,
    wikipedia: WikipediaClient,
    backend: Optional[LLMBackend] = None,
    params: Optional[GenerationParams] = None,
    word_limit: int = 1000,
) -> list[KnowledgeItem]:
    """One item per keyword whose entity has a non-empty English page extract."""
    items: list[KnowledgeItem] = []
    for keyword in keywords:
        try:
            entity = await wikidata.search_entity(keyword)
            if entity is None:
                logger.debug(f"Wikipedia: no entity for '{keyword}'")
                continue
            title = await wikidata.sitelink_title(entity.qid) or entity.label
            extract = await wikipedia.extract(title)
        except KnowledgeClientError as e:
            logger.warning(f"Wikipedia lookup failed for '{keyword}', skipping: {e}")
            continue
        if not extract.strip():
            continue
        text = await summarize_extract(extract, backend, params, word_limit)
        items.append(KnowledgeItem(source=KnowledgeSource.WIKIPEDIA, text=text, origin_key=keyword))
    return items


async def encyclopedia_fetch(
    keywords: list[str],
    wikidata: WikidataClient,
    wikipedia: WikipediaClient,
    backend: Optional[LLMBackend] = None,
    params: Optional[GenerationParams] = None,
    *,
    facts: bool = True,
    extracts: bool = True,
    facts_limit: int = 10,
    word_limit: int = 1000,
) -> list[KnowledgeItem]:
    """Facts then extracts for the given keywords."""
    items: list[KnowledgeItem] = []
    if facts:
        items.extend(await fetch_wikidata_facts(keywords, wikidata, facts_limit))
    if extracts:
        items.extend(
            await fetch_wikipedia_extracts(keywords, wikidata, wikipedia, backend, params, word_limit)
        )
    return items
