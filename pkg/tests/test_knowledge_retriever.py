import asyncio

import pytest

from src.exceptions import ConfigError
from src.models import KeywordSet, KnowledgeItem, KnowledgeSource, SourceSpec
from src.services.dak_builder import build_dak_index
from src.services.knowledge_cache import KnowledgeCache
from src.services.knowledge_retriever import KnowledgeRetriever
from tests.helpers import entity, pair

KEYWORD_RULES = [
    {"tag": "keywords", "regex": "Your turn:\nEntity: MI\n", "response": "MI"},
    {"tag": "keywords", "regex": "Your turn:\nEntity: myocardial infarction\n", "response": "myocardial infarction"},
    {"tag": "keyword_filter", "regex": "Your turn:\nmi\n", "response": "no"},
    {"tag": "keyword_filter", "response": "yes"},
]


@pytest.fixture
def mi_pair():
    return pair("e1", entity("MI", context="history of MI"), entity("myocardial infarction"))


async def test_dak_is_built_then_cached(tmp_path, provider_pool, provider_pair):
    index = build_dak_index(provider_pool)
    retriever = KnowledgeRetriever(KnowledgeCache(tmp_path), dak_index=index)

    first = await retriever.retrieve(provider_pair, SourceSpec.parse("DaK"))
    second = await retriever.retrieve(provider_pair, SourceSpec.parse("DaK"))

    assert first == second
    assert [item.origin_key for item in first] == ["provider"]
    assert retriever.counts == {"built": 1, "hit": 1}
    assert (tmp_path / "DaK.jsonl").exists()


async def test_dak_cache_entry_depends_on_the_index(tmp_path, provider_pool, provider_pair):
    cache = KnowledgeCache(tmp_path)
    await KnowledgeRetriever(cache, dak_index=build_dak_index(provider_pool)).retrieve(
        provider_pair, SourceSpec.parse("DaK")
    )

    other_index = build_dak_index(provider_pool.model_copy(update={"pairs": provider_pool.pairs[:1]}))
    retriever = KnowledgeRetriever(KnowledgeCache(tmp_path), dak_index=other_index)
    await retriever.retrieve(provider_pair, SourceSpec.parse("DaK"))

    assert "hit" not in retriever.counts


async def test_null_source_is_empty(tmp_path, provider_pair):
    retriever = KnowledgeRetriever(KnowledgeCache(tmp_path))

    assert await retriever.retrieve(provider_pair, SourceSpec.parse("Null")) == []
    assert not retriever.counts


async def test_dak_does_not_apply_to_entities(tmp_path, mi_pair):
    retriever = KnowledgeRetriever(KnowledgeCache(tmp_path))

    assert await retriever.retrieve(mi_pair, SourceSpec.parse("DaK")) == []


async def test_dak_needs_an_index(tmp_path, provider_pair):
    with pytest.raises(ConfigError):
        await KnowledgeRetriever(KnowledgeCache(tmp_path)).retrieve(provider_pair, SourceSpec.parse("DaK"))


async def test_external_sources_need_clients(tmp_path, mi_pair, make_mock):
    retriever = KnowledgeRetriever(KnowledgeCache(tmp_path), backend=make_mock(KEYWORD_RULES))

    with pytest.raises(ConfigError, match="clients"):
        await retriever.retrieve(mi_pair, SourceSpec.parse("EaK"))


async def test_eak_replay_is_idempotent(tmp_path, mi_pair, make_mock, kb_clients, fake_kb):
    backend = make_mock(KEYWORD_RULES)
    first = KnowledgeRetriever(KnowledgeCache(tmp_path), backend=backend, clients=kb_clients, seed=3)
    items = await first.retrieve(mi_pair, SourceSpec.parse("EaK"))
    requests = len(fake_kb.requests)
    backend_calls = len(backend.calls)

    again = KnowledgeRetriever(KnowledgeCache(tmp_path), backend=backend, clients=kb_clients, seed=3)
    replayed = await again.retrieve(mi_pair, SourceSpec.parse("EaK"))

    assert len(items) == 3
    assert all(item.text.startswith("One of myocardial infarction is") for item in items)
    assert replayed == items
    assert len(fake_kb.requests) == requests
    assert len(backend.calls) == backend_calls
    assert again.counts == {"hit": 1}


async def test_keywords_are_cached_once_per_pair(tmp_path, mi_pair, make_mock, kb_clients):
    backend = make_mock(KEYWORD_RULES)
    retriever = KnowledgeRetriever(KnowledgeCache(tmp_path), backend=backend, clients=kb_clients)

    await retriever.retrieve(mi_pair, SourceSpec.parse("Wikipedia+EaK"))

    assert backend.calls_tagged("keywords") == 2
    assert backend.calls_tagged("keyword_filter") == 2
    assert retriever.cache.get_keywords(mi_pair.digest()) == KeywordSet(
        raw=("mi", "myocardial infarction"), filtered=("myocardial infarction",)
    )


async def test_concurrent_requests_build_once(tmp_path, mi_pair, make_mock, kb_clients):
    backend = make_mock(KEYWORD_RULES)
    retriever = KnowledgeRetriever(KnowledgeCache(tmp_path), backend=backend, clients=kb_clients)

    results = await asyncio.gather(*(retriever.retrieve(mi_pair, SourceSpec.parse("EaK")) for _ in range(5)))

    assert all(result == results[0] for result in results)
    assert retriever.counts["built"] == 1
    assert retriever.counts["hit"] == 4
    assert backend.calls_tagged("keywords") == 2


async def test_composite_concatenates_in_declared_order(tmp_path, mi_pair):
    cache = KnowledgeCache(tmp_path)
    await cache.put_items("Wikidata", mi_pair.digest(), [KnowledgeItem(source=KnowledgeSource.WIKIDATA, text="w")])
    await cache.put_items("EaK", mi_pair.digest(), [KnowledgeItem(source=KnowledgeSource.EAK, text="e")])
    retriever = KnowledgeRetriever(cache)

    items = await retriever.retrieve(mi_pair, SourceSpec.parse("EaK+Wikidata"))

    assert [item.text for item in items] == ["e", "w"]


async def test_offline_mode_reads_cache_only(tmp_path, mi_pair):
    retriever = KnowledgeRetriever(KnowledgeCache(tmp_path), cached_only=True)

    assert await retriever.retrieve(mi_pair, SourceSpec.parse("Wikipedia")) == []
    assert retriever.counts == {"uncached": 1}


async def test_corrupt_cache_lines_are_rebuilt(tmp_path, provider_pool, provider_pair):
    index = build_dak_index(provider_pool)
    await KnowledgeRetriever(KnowledgeCache(tmp_path), dak_index=index).retrieve(
        provider_pair, SourceSpec.parse("DaK")
    )
    path = tmp_path / "DaK.jsonl"
    digest_line = path.read_text(encoding="utf-8").splitlines()[0]
    path.write_text("not json\n" + digest_line.replace('"items": [', '"items": [{"bad": 1}, '), encoding="utf-8")

    retriever = KnowledgeRetriever(KnowledgeCache(tmp_path), dak_index=index)
    items = await retriever.retrieve(provider_pair, SourceSpec.parse("DaK"))

    assert [item.origin_key for item in items] == ["provider"]
    assert retriever.counts == {"built": 1}
