"""Shared async HTTP plumbing for knowledge-base clients.

`HttpClient` adds bounded retries with growing delay and a per-host
minimum interval on top of httpx. `ReplayTransport` and
`RecordingTransport` serve and capture traffic as JSON fixtures so
knowledge builders can run offline.
"""

import asyncio
import json
import logging
import time
from pathlib import Path
from typing import Any, Optional
from urllib.parse import urlencode

import httpx

from src.config import settings
from src.exceptions import KnowledgeClientError

logger = logging.getLogger(__name__)

_TRANSIENT_STATUSES = {429, 500, 502, 503, 504}


def fixture_key(request: httpx.Request) -> str:
    """Stable key for a request: method, URL without query, sorted params."""
    params = sorted(request.url.params.multi_items())
    base = str(request.url.copy_with(query=None))
    return f"{request.method} {base}?{urlencode(params)}"


class ReplayTransport(httpx.AsyncBaseTransport):
    """Serve recorded responses. Unrecorded requests get a 404."""

    def __init__(self, fixtures: dict[str, dict]):
        self.fixtures = fixtures
        self.calls = 0

    @classmethod
    def from_file(cls, path: Path) -> "ReplayTransport":
        try:
            return cls(json.loads(Path(path).read_text(encoding="utf-8")))
        except (OSError, ValueError) as e:
            raise KnowledgeClientError(f"cannot load replay fixtures {path}: {e}") from e

    async def handle_async_request(self, request: httpx.Request) -> httpx.Response:
        self.calls += 1
        key = fixture_key(request)
        entry = self.fixtures.get(key)
        if entry is None:
            logger.warning(f"No recorded response for {key}")
            return httpx.Response(404, json={"error": "not recorded"}, request=request)
        return httpx.Response(entry.get("status", 200), json=entry.get("body"), request=request)


class RecordingTransport(httpx.AsyncBaseTransport):
    """Forward requests to a real transport and keep every JSON response."""

    def __init__(self, path: Path, inner: Optional[httpx.AsyncBaseTransport] = None):
        self.path = Path(path)
        self.inner = inner or httpx.AsyncHTTPTransport()
        self.records: dict[str, dict] = {}
        if self.path.exists():
            self.records = json.loads(self.path.read_text(encoding="utf-8"))

    async def handle_async_request(self, request: httpx.Request) -> httpx.Response:
        response = await self.inner.handle_async_request(request)
        await response.aread()
        try:
            body = json.loads(response.content)
        except ValueError:
            body = response.content.decode("utf-8", errors="replace")
        self.records[fixture_key(request)] = {"status": response.status_code, "body": body}
        return response

    def save(self) -> None:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self.path.write_text(
            json.dumps(self.records, indent=2, sort_keys=True, ensure_ascii=False),
            encoding="utf-8",
        )
        logger.info(f"Recorded {len(self.records)} responses to {self.path}")

    async def aclose(self) -> None:
        self.save()
        await self.inner.aclose()


class HttpClient:
    """
    JSON-over-HTTP client with retries and per-host pacing.

    Features:
    - Exponential backoff on transport errors, 429 and 5xx
    - Minimum interval between requests to the same host
    - 404 treated as "no result"
    - Optional request/response tracing
    """

    def __init__(
        self,
        transport: Optional[httpx.AsyncBaseTransport] = None,
        max_retries: Optional[int] = None,
        retry_delay: Optional[float] = None,
        min_interval: Optional[float] = None,
        timeout: Optional[float] = None,
        trace: bool = False,
    ):
        self.max_retries = settings.max_retries if max_retries is None else max_retries
        # 0 turns retrying off; the first attempt always happens
        self.max_attempts = max(1, self.max_retries)
        self.retry_delay = settings.retry_delay if retry_delay is None else retry_delay
        self.min_interval = settings.min_request_interval if min_interval is None else min_interval
        self.trace = trace
        self.request_count = 0
        self._client = httpx.AsyncClient(
            transport=transport,
            timeout=timeout or settings.http_timeout,
            headers={"User-Agent": settings.user_agent},
        )
        self._host_locks: dict[str, asyncio.Lock] = {}
        self._last_request: dict[str, float] = {}

    async def _pace(self, host: str) -> None:
        lock = self._host_locks.setdefault(host, asyncio.Lock())
        async with lock:
            wait = self._last_request.get(host, 0) + self.min_interval - time.monotonic()
            if wait > 0:
                await asyncio.sleep(wait)
            self._last_request[host] = time.monotonic()

    async def get_json(
        self,
        url: str,
        params: Optional[dict] = None,
        headers: Optional[dict] = None,
    ) -> Optional[Any]:
        """
        GET a JSON document.

        Returns:
            Decoded body, or None on 404

        Raises:
            KnowledgeClientError: non-retryable status, bad JSON, or retries exhausted
        """
        host = httpx.URL(url).host
        last_error = None

        for attempt in range(1, self.max_attempts + 1):
            await self._pace(host)
            self.request_count += 1
            try:
                response = await self._client.get(url, params=params, headers=headers)
            except httpx.TransportError as e:
                last_error = f"{type(e).__name__}: {e}"
            else:
                if self.trace:
                    logger.debug(f"GET {response.request.url} -> {response.status_code} {response.text[:500]}")
                if response.status_code == 404:
                    return None
                if response.status_code in _TRANSIENT_STATUSES:
                    last_error = f"status {response.status_code}"
                elif response.status_code >= 400:
                    raise KnowledgeClientError(f"GET {url} failed with status {response.status_code}")
                else:
                    try:
                        return response.json()
                    except ValueError as e:
                        raise KnowledgeClientError(f"GET {url} returned invalid JSON: {e}") from e

            if attempt < self.max_attempts:
                delay = self.retry_delay * (2 ** (attempt - 1))
                logger.debug(f"Retrying GET {url} in {delay:.1f}s after {last_error}")
                await asyncio.sleep(delay)

        raise KnowledgeClientError(f"GET {url} failed after {self.max_attempts} attempts: {last_error}")

    async def aclose(self) -> None:
        await self._client.aclose()
