"""Wikidata entity search, SPARQL facts and Wikipedia sitelinks."""

from dataclasses import dataclass
from typing import Optional

from src.config import settings
from src.services.clients.http import HttpClient

FACTS_QUERY = """
SELECT ?propLabel ?valueLabel WHERE {{
  wd:{qid} ?claim ?value .
  ?prop wikibase:directClaim ?claim .
  SERVICE wikibase:label {{ bd:serviceParam wikibase:language "en". }}
}}
ORDER BY ?propLabel ?valueLabel
LIMIT {limit}
"""


@dataclass(frozen=True)
class WikidataEntity:
    qid: str
    label: str


class WikidataClient:
    """Wikidata action API plus the SPARQL query service."""

    def __init__(
        self,
        http: HttpClient,
        api_url: Optional[str] = None,
        sparql_url: Optional[str] = None,
        language: str = "en",
    ):
        self.http = http
        self.api_url = api_url or settings.wikidata_api_url
        self.sparql_url = sparql_url or settings.wikidata_sparql_url
        self.language = language

    async def search_entity(self, term: str) -> Optional[WikidataEntity]:
        """Top-1 entity for a search term."""
        body = await self.http.get_json(
            self.api_url,
            params={
                "action": "wbsearchentities",
                "search": term,
                "language": self.language,
                "limit": "1",
                "format": "json",
            },
        )
        results = (body or {}).get("search") or []
        if not results:
            return None
        top = results[0]
        return WikidataEntity(qid=top["id"], label=top.get("label") or term)

    async def facts(self, qid: str, limit: int = 10) -> list[tuple[str, str]]:
        """(property label, value label) pairs for an entity."""
        if limit <= 0:
            return []
        body = await self.http.get_json(
            self.sparql_url,
            params={"query": FACTS_QUERY.format(qid=qid, limit=limit), "format": "json"},
            headers={"Accept": "application/sparql-results+json"},
        )
        facts = []
        for binding in (body or {}).get("results", {}).get("bindings", []):
            prop = binding.get("propLabel", {}).get("value")
            value = binding.get("valueLabel", {}).get("value")
            if prop and value:
                facts.append((prop, value))
        return facts[:limit]

    async def sitelink_title(self, qid: str, site: str = "enwiki") -> Optional[str]:
        body = await self.http.get_json(
            self.api_url,
            params={
                "action": "wbgetentities",
                "ids": qid,
                "props": "sitelinks",
                "sitefilter": site,
                "format": "json",
            },
        )
        entity = (body or {}).get("entities", {}).get(qid) or {}
        return (entity.get("sitelinks") or {}).get(site, {}).get("title")
