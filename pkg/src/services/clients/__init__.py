"""Knowledge-base clients sharing one paced HTTP session."""

from dataclasses import dataclass
from typing import Optional

import httpx

from src.config import KnowledgeConfig
from src.services.clients.http import HttpClient, RecordingTransport, ReplayTransport
from src.services.clients.snowstorm import Concept, TerminologyClient
from src.services.clients.wikidata import WikidataClient, WikidataEntity
from src.services.clients.wikipedia import WikipediaClient


@dataclass
class KnowledgeClients:
    http: HttpClient
    terminology: TerminologyClient
    wikidata: WikidataClient
    wikipedia: WikipediaClient

    @classmethod
    def create(
        cls,
        config: Optional[KnowledgeConfig] = None,
        transport: Optional[httpx.AsyncBaseTransport] = None,
        trace: bool = False,
    ) -> "KnowledgeClients":
        """Clients for a run; replay or recording fixtures come from the config."""
        config = config or KnowledgeConfig()
        if transport is None and config.replay_from is not None:
            transport = ReplayTransport.from_file(config.replay_from)
        elif transport is None and config.record_to is not None:
            transport = RecordingTransport(config.record_to)

        http = HttpClient(transport=transport, trace=trace)
        return cls(
            http=http,
            terminology=TerminologyClient(http),
            wikidata=WikidataClient(http),
            wikipedia=WikipediaClient(http),
        )

    async def aclose(self) -> None:
        await self.http.aclose()


__all__ = [
    "Concept",
    "HttpClient",
    "KnowledgeClients",
    "RecordingTransport",
    "ReplayTransport",
    "TerminologyClient",
    "WikidataClient",
    "WikidataEntity",
    "WikipediaClient",
]
