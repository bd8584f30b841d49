"""Plain-text page extracts from the Wikipedia action API."""

from typing import Optional

from src.config import settings
from src.services.clients.http import HttpClient


class WikipediaClient:
    def __init__(self, http: HttpClient, api_url: Optional[str] = None):
        self.http = http
        self.api_url = api_url or settings.wikipedia_api_url

    async def extract(self, title: str) -> str:
        """Plain-text extract of a page, or "" when the page is missing."""
        body = await self.http.get_json(
            self.api_url,
            params={
                "action": "query",
                "prop": "extracts",
                "explaintext": "1",
                "redirects": "1",
                "titles": title,
                "format": "json",
            },
        )
        pages = (body or {}).get("query", {}).get("pages", {})
        for page in pages.values():
            if "missing" not in page:
                return page.get("extract") or ""
        return ""
