"""Shared fixtures: pseudo-code, toy pools, scripted backends."""

from pathlib import Path

import httpx
import pytest
import yaml

from src.models import TaskKind
from src.services.clients import (
    HttpClient,
    KnowledgeClients,
    TerminologyClient,
    WikidataClient,
    WikipediaClient,
)
from src.services.llm_backends import MockBackend
from src.services.reasoning_builder import load_pseudocode
from tests.helpers import LONG_EXTRACT, pair, pool, schema, toy_mock_rules, toy_schema_records, write_jsonl

REPO_ROOT = Path(__file__).resolve().parent.parent
CONFIG_DIR = REPO_ROOT / "config"
FIXTURES = Path(__file__).resolve().parent / "fixtures"


@pytest.fixture
def sm_pseudocode():
    return load_pseudocode(CONFIG_DIR / "pseudocode" / "sm.txt", TaskKind.SM)


@pytest.fixture
def em_pseudocode():
    return load_pseudocode(CONFIG_DIR / "pseudocode" / "em.txt", TaskKind.EM)


@pytest.fixture
def provider_pair():
    return pair(
        "p1",
        schema("provider", "npi", "uniquely identified healthcare providers", "national provider identifier"),
        schema("practitioner", "npi_code", "registered practitioners", "npi number"),
        label=False,
    )


@pytest.fixture
def provider_pool(provider_pair):
    """Two pairs whose table descriptions mention each other's objects."""
    other = pair(
        "p2",
        schema(
            "providers",
            "speciality",
            "provider table contains clinicians that provide patient care",
            "speciality of the clinician",
        ),
        schema("caregiver", "specialty", "caregiver records", "specialty"),
        label=True,
    )
    return pool(provider_pair, other)


@pytest.fixture
def make_mock():
    """Build a MockBackend from a list of rule dicts."""

    def _make(rules: list[dict]) -> MockBackend:
        return MockBackend.from_rules(rules)

    return _make



KB_TERMS = {
    "npi": {"conceptId": "335621000000101", "pt": {"term": "National Provider Identifier"}},
    "myocardial infarction": {"conceptId": "22298006", "pt": {"term": "Myocardial infarction"}},
}
KB_CHILDREN = {
    "22298006": [
        {"conceptId": "57054005", "pt": {"term": "Acute myocardial infarction"}},
        {"conceptId": "1755008", "pt": {"term": "Old myocardial infarction"}},
        {"conceptId": "233843008", "pt": {"term": "Silent myocardial infarction"}},
        {"conceptId": "129574000", "pt": {"term": "Postoperative myocardial infarction"}},
    ],
    "335621000000101": [],
}
WIKIDATA_ENTITIES = {
    "deoxynivalenol": ("Q418186", "deoxynivalenol"),
    "long topic": ("Q999", "long topic"),
}
WIKIDATA_FACTS = {
    "Q418186": [("instance of", "type of chemical entity"), ("subclass of", "trichothecene")],
}
SITELINKS = {"Q418186": "Vomitoxin", "Q999": "Long topic"}
EXTRACTS = {
    "Vomitoxin": "Vomitoxin, also known as\n deoxynivalenol, is a mycotoxin.",
    "Long topic": LONG_EXTRACT,
}


class FakeKnowledgeBase:
    """httpx handler serving Snowstorm, Wikidata and Wikipedia lookalike responses."""

    def __init__(self):
        self.requests: list[httpx.Request] = []

    def __call__(self, request: httpx.Request) -> httpx.Response:
        self.requests.append(request)
        params = request.url.params
        path = request.url.path

        if path.endswith("/descriptions"):
            concept = KB_TERMS.get(params["term"])
            return httpx.Response(200, json={"items": [{"concept": concept}] if concept else []})
        if path.endswith("/children"):
            concept_id = path.split("/")[-2]
            if concept_id not in KB_CHILDREN:
                return httpx.Response(404)
            return httpx.Response(200, json=KB_CHILDREN[concept_id])
        if request.url.host == "query.wikidata.org":
            qid = params["query"].split("wd:")[1].split()[0]
            bindings = [
                {"propLabel": {"value": prop}, "valueLabel": {"value": value}}
                for prop, value in WIKIDATA_FACTS.get(qid, [])
            ]
            return httpx.Response(200, json={"results": {"bindings": bindings}})
        if params.get("action") == "wbsearchentities":
            found = WIKIDATA_ENTITIES.get(params["search"])
            results = [{"id": found[0], "label": found[1]}] if found else []
            return httpx.Response(200, json={"search": results})
        if params.get("action") == "wbgetentities":
            qid = params["ids"]
            title = SITELINKS.get(qid)
            sitelinks = {"enwiki": {"title": title}} if title else {}
            return httpx.Response(200, json={"entities": {qid: {"sitelinks": sitelinks}}})
        if params.get("action") == "query":
            title = params["titles"]
            if title in EXTRACTS:
                page = {"pageid": 1, "title": title, "extract": EXTRACTS[title]}
            else:
                page = {"title": title, "missing": ""}
            return httpx.Response(200, json={"query": {"pages": {"1": page}}})
        return httpx.Response(404)


@pytest.fixture
def fake_kb():
    return FakeKnowledgeBase()


@pytest.fixture
async def kb_clients(fake_kb):
    http = HttpClient(transport=httpx.MockTransport(fake_kb), retry_delay=0, min_interval=0)
    clients = KnowledgeClients(
        http=http,
        terminology=TerminologyClient(http),
        wikidata=WikidataClient(http),
        wikipedia=WikipediaClient(http),
    )
    yield clients
    await clients.aclose()


@pytest.fixture
def toy_run(tmp_path):
    """Write a 20-pair schema pool, a mock script and a run config; returns a config writer."""
    pool_path = write_jsonl(tmp_path / "pool.jsonl", toy_schema_records())
    script = tmp_path / "mock.yaml"
    script.write_text(yaml.safe_dump({"rules": toy_mock_rules()}), encoding="utf-8")

    def _write(name: str = "run", dataset: Path = pool_path, **overrides) -> Path:
        config = {
            "dataset": str(dataset),
            "task_kind": "SM",
            "pseudocode": str(CONFIG_DIR / "pseudocode" / "sm.txt"),
            "demonstrations": str(CONFIG_DIR / "demos" / "synthea.jsonl"),
            "shots": 4,
            "sources": ["DaK", "Null", "DaK*"],
            "backend": {"kind": "mock", "mock_script": str(script)},
            "cache_dir": str(tmp_path / name / "cache"),
            "output_dir": str(tmp_path / name / "out"),
            "runs": 2,
            "workers": 4,
        }
        config.update(overrides)
        path = tmp_path / f"{name}.yaml"
        path.write_text(yaml.safe_dump(config), encoding="utf-8")
        return path

    return _write
