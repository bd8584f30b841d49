import random
import re

import pytest

from src.exceptions import DataError
from src.models import KnowledgeSource
from src.services.dak_builder import build_dak_index, dak_lookup
from src.services.dataset_loader import render_item
from tests.helpers import entity, pair, pool, schema

WORDS = ["provider", "person", "visit", "care", "site", "note", "drug", "cost"]


def _oracle(candidate_pool):
    """Literal double loop: objects of pair i against table segments of pair j != i."""
    entries = {}
    pairs = candidate_pool.pairs
    for i, left in enumerate(pairs):
        for item_i in (left.left, left.right):
            name = render_item(item_i)[0].partition("-")[0].strip()
            for j, right in enumerate(pairs):
                if i == j:
                    continue
                for item_j in (right.left, right.right):
                    segment = render_item(item_j)[1].partition(";")[0].strip()
                    if not segment:
                        continue
                    if re.search(rf"(?<!\w){re.escape(name)}(?!\w)", segment, re.IGNORECASE):
                        entries.setdefault(name.lower(), set()).add(segment)
    return {key: tuple(sorted(values)) for key, values in entries.items()}


def _random_pool(rng: random.Random):
    def random_schema():
        table = rng.choice(WORDS)
        description = " ".join(rng.choice(WORDS + ["the", "table", "of"]) for _ in range(rng.randint(0, 4)))
        return schema(table, rng.choice(["id", "name", "date"]), description, "column")

    size = rng.randint(1, 10)
    return pool(*(pair(f"p{n}", random_schema(), random_schema()) for n in range(size)))


def test_provider_entry(provider_pool, provider_pair):
    index = build_dak_index(provider_pool)

    assert index.entries["provider"] == ("provider table contains clinicians that provide patient care",)
    items = dak_lookup(index, provider_pair)
    assert [item.text for item in items] == ["provider: provider table contains clinicians that provide patient care"]
    assert items[0].source is KnowledgeSource.DAK
    assert items[0].origin_key == "provider"


def test_matches_whole_words_only(provider_pool):
    # "provider" must not match inside "providers"
    index = build_dak_index(provider_pool)

    assert index.entries["providers"] == ("uniquely identified healthcare providers",)
    assert "practitioner" not in index.entries


@pytest.mark.parametrize("seed", range(50))
def test_equals_double_loop_oracle(seed):
    candidate_pool = _random_pool(random.Random(seed))

    assert build_dak_index(candidate_pool).entries == _oracle(candidate_pool)


def test_single_pair_pool_has_no_entries():
    lone = pool(pair("p", schema("provider", "npi", "provider table"), schema("provider", "id", "provider table")))

    assert len(build_dak_index(lone)) == 0


def test_object_named_in_two_pairs_matches_either_segment():
    first = pair("a", schema("note", "text", "note records"), schema("drug", "dose", ""))
    second = pair("b", schema("note", "date", "clinical note store"), schema("cost", "amount", ""))

    entries = build_dak_index(pool(first, second)).entries

    assert entries["note"] == ("clinical note store", "note records")


def test_lookup_without_matches_is_empty(provider_pool):
    stranger = pair("x", schema("drug", "dose"), schema("cost", "amount"))

    assert dak_lookup(build_dak_index(provider_pool), stranger) == []


def test_entity_pool_is_rejected():
    with pytest.raises(DataError):
        build_dak_index(pool(pair("e", entity("MI"), entity("myocardial infarction"))))
