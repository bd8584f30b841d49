"""SNOMED CT terminology browser client (Snowstorm REST API)."""

from dataclasses import dataclass
from typing import Optional

from src.config import settings
from src.services.clients.http import HttpClient


@dataclass(frozen=True)
class Concept:
    """A terminology concept with its lowercased preferred term."""

    concept_id: str
    term: str


def _concept(raw: dict) -> Optional[Concept]:
    concept_id = raw.get("conceptId") or raw.get("id")
    term = (raw.get("pt") or {}).get("term") or (raw.get("fsn") or {}).get("term")
    if not concept_id or not term:
        return None
    return Concept(concept_id=str(concept_id), term=" ".join(term.lower().split()))


class TerminologyClient:
    """Concept search and inferred children from a Snowstorm browser endpoint."""

    def __init__(
        self,
        http: HttpClient,
        base_url: Optional[str] = None,
        branch: Optional[str] = None,
    ):
        self.http = http
        self.base_url = (base_url or settings.snowstorm_url).rstrip("/")
        self.branch = branch or settings.snowstorm_branch

    async def search(self, term: str, limit: int = 1) -> list[Concept]:
        """Active concepts whose descriptions match `term`, best first."""
        body = await self.http.get_json(
            f"{self.base_url}/browser/{self.branch}/descriptions",
            params={"term": term, "active": "true", "conceptActive": "true", "limit": str(limit)},
        )
        concepts: list[Concept] = []
        for entry in (body or {}).get("items", []):
            concept = _concept(entry.get("concept") or {})
            if concept and concept not in concepts:
                concepts.append(concept)
            if len(concepts) >= limit:
                break
        return concepts

    async def children(self, concept_id: str) -> list[Concept]:
        body = await self.http.get_json(
            f"{self.base_url}/browser/{self.branch}/concepts/{concept_id}/children",
            params={"form": "inferred"},
        )
        children = [_concept(entry) for entry in (body or [])]
        return sorted((c for c in children if c), key=lambda c: c.concept_id)
