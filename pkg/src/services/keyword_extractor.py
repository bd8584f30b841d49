"""Keyword extraction and quality filtering for external knowledge lookups."""

import logging
import re
from pathlib import Path
from typing import Iterable, Optional

from src.exceptions import ConfigError
from src.models import CandidatePair, GenerationParams, KeywordSet, Outcome, TaskKind
from src.services.dataset_loader import render_item
from src.services.llm_backends import LLMBackend
from src.services.templates import load_template
from src.services.verdict_parser import parse_verdict

logger = logging.getLogger(__name__)

_ANSWER_PREFIX = re.compile(r"^.*\banswer\s*:", re.IGNORECASE | re.DOTALL)
_EDGE_NOISE = " \t\"'`*.;:"


def normalize_keyword(keyword: str) -> str:
    """Lowercase, trim and collapse internal whitespace."""
    return " ".join(keyword.strip(_EDGE_NOISE).lower().split())


def split_keywords(text: str) -> list[str]:
    """Comma-separated response -> normalized, deduplicated keywords in order."""
    body = _ANSWER_PREFIX.sub("", text or "")
    keywords: list[str] = []
    for part in body.replace("\n", ",").split(","):
        keyword = normalize_keyword(part)
        if keyword and keyword not in keywords:
            keywords.append(keyword)
    return keywords


def load_blacklist(path: Optional[Path]) -> frozenset[str]:
    """One entry per line; blank lines and `#` comments ignored."""
    if path is None:
        return frozenset()
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as e:
        raise ConfigError(f"knowledge.blacklist: cannot read {path}: {e}") from e
    return frozenset(
        normalize_keyword(line) for line in lines if line.strip() and not line.lstrip().startswith("#")
    )


async def extract_keywords(
    pair: CandidatePair,
    backend: LLMBackend,
    params: Optional[GenerationParams] = None,
) -> list[str]:
    """
    Ask the backend for domain keywords of both items of a pair.

    One call per item; results are merged in left-then-right order.
    """
    params = params or GenerationParams()
    template = load_template("keywords_sm" if pair.kind is TaskKind.SM else "keywords_em")

    keywords: list[str] = []
    for item in (pair.left, pair.right):
        name, description = render_item(item)
        response = await backend.generate(
            template.render(name=name, description=description), params, tag="keywords"
        )
        for keyword in split_keywords(response.text):
            if keyword not in keywords:
                keywords.append(keyword)
    return keywords


async def filter_keywords(
    raw: list[str],
    backend: LLMBackend,
    blacklist: Iterable[str] = (),
    task_kind: TaskKind = TaskKind.SM,
    params: Optional[GenerationParams] = None,
) -> list[str]:
    """
    Keep keywords that need domain knowledge, then drop blacklisted ones.

    Schema matching sends the whole list in one call and keeps what the
    backend returns. Entity matching asks yes/no per keyword; an
    unparseable answer rejects the keyword.
    """
    if not raw:
        return []
    params = params or GenerationParams()

    if task_kind is TaskKind.SM:
        prompt = load_template("keyword_filter").render(keywords=", ".join(raw))
        response = await backend.generate(prompt, params, tag="keyword_filter")
        returned = set(split_keywords(response.text))
        kept = [keyword for keyword in raw if keyword in returned]
    else:
        template = load_template("keyword_check")
        kept = []
        for keyword in raw:
            response = await backend.generate(template.render(keyword=keyword), params, tag="keyword_filter")
            if parse_verdict(response).outcome is Outcome.YES:
                kept.append(keyword)

    blocked = {normalize_keyword(entry) for entry in blacklist}
    filtered = [keyword for keyword in kept if keyword not in blocked]
    logger.debug(f"Keywords {raw} -> {filtered}")
    return filtered


async def build_keyword_set(
    pair: CandidatePair,
    backend: LLMBackend,
    blacklist: Iterable[str] = (),
    params: Optional[GenerationParams] = None,
) -> KeywordSet:
    raw = await extract_keywords(pair, backend, params)
    filtered = await filter_keywords(raw, backend, blacklist, pair.kind, params)
    return KeywordSet(raw=tuple(raw), filtered=tuple(filtered))
