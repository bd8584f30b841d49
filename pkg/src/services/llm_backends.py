"""LLM backends.

All pipeline calls (keyword extraction, filtering, summarization,
self-indicators and the match prompts) go through `LLMBackend.generate`.
HTTP backends pool API keys through the load balancer and retry
transient failures with exponential backoff; the mock backend answers
from a versioned YAML script.
"""

import asyncio
import hashlib
import logging
import re
import time
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import anthropic
import httpx
import yaml
from google import genai
from google.genai import errors as genai_errors
from google.genai import types

from src.config import BackendConfig, get_llm_api_keys, settings
from src.exceptions import (
    BackendAuthError,
    BackendError,
    BackendTimeoutError,
    ConfigError,
    MockScriptError,
    RetriesExhaustedError,
)
from src.models import GenerationParams, LLMResponse, PromptBundle
from src.services.load_balancer import LoadBalancer, Release

logger = logging.getLogger(__name__)


class TransientBackendError(BackendError):
    """A retryable failure: rate limit, server error or dropped connection."""

    def __init__(self, message: str, rate_limited: bool = False):
        super().__init__(message)
        self.rate_limited = rate_limited


def prompt_digest(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()


def classify_status(status: int, message: str) -> BackendError:
    """Map an HTTP status to the error the retry loop acts on."""
    if status in (401, 403):
        return BackendAuthError(f"credentials rejected ({status}): {message}")
    if status == 429:
        return TransientBackendError(f"rate limited: {message}", rate_limited=True)
    if status == 408:
        return BackendTimeoutError(f"request timed out: {message}")
    if status >= 500:
        return TransientBackendError(f"server error {status}: {message}")
    return BackendError(f"request rejected ({status}): {message}")


class LLMBackend(ABC):
    """A text-in, text-out completion backend."""

    backend_id: str = "backend"

    @abstractmethod
    async def generate(
        self,
        prompt: str,
        params: GenerationParams,
        *,
        tag: Optional[str] = None,
    ) -> LLMResponse:
        """
        Complete one prompt.

        Args:
            prompt: Full prompt text
            params: Sampling settings
            tag: Call purpose (`keywords`, `keyword_filter`, `summarize`,
                `self_indicator`, `match`); used by scripted backends

        Returns:
            LLMResponse with the raw completion text
        """

    async def aclose(self) -> None:
        """Release network resources."""


@dataclass
class MockRule:
    """One script rule. Every condition the rule sets must hold."""

    response: str
    digest: Optional[str] = None
    pattern: Optional[re.Pattern] = None
    tag: Optional[str] = None
    expand: bool = False

    def match(self, prompt: str, digest: str, tag: Optional[str]) -> Optional[str]:
        if self.digest is not None and not digest.startswith(self.digest):
            return None
        if self.tag is not None and self.tag != tag:
            return None
        if self.pattern is None:
            return self.response
        found = self.pattern.search(prompt)
        if not found:
            return None
        return found.expand(self.response) if self.expand else self.response


@dataclass
class MockBackend(LLMBackend):
    """
    Scripted backend for offline runs and tests.

    Rules are checked in order and the first match wins. A prompt no
    rule matches raises MockScriptError.
    """

    rules: list[MockRule]
    backend_id: str = "mock"
    calls: list[tuple[Optional[str], str]] = field(default_factory=list)

    @classmethod
    def from_rules(cls, raw_rules: list[dict], backend_id: str = "mock") -> "MockBackend":
        rules = []
        for position, raw in enumerate(raw_rules, start=1):
            if not isinstance(raw, dict) or "response" not in raw:
                raise MockScriptError(f"mock rule {position}: needs a 'response'")
            if not any(key in raw for key in ("digest", "regex", "tag")):
                raise MockScriptError(f"mock rule {position}: needs 'digest', 'regex' or 'tag'")
            try:
                pattern = re.compile(raw["regex"], re.DOTALL) if "regex" in raw else None
            except re.error as e:
                raise MockScriptError(f"mock rule {position}: bad regex: {e}") from e
            rules.append(
                MockRule(
                    response=str(raw["response"]),
                    digest=raw.get("digest"),
                    pattern=pattern,
                    tag=raw.get("tag"),
                    expand=bool(raw.get("expand", False)),
                )
            )
        return cls(rules=rules, backend_id=backend_id)

    @classmethod
    def from_script(cls, path: Path) -> "MockBackend":
        path = Path(path)
        try:
            script = yaml.safe_load(path.read_text(encoding="utf-8"))
        except (OSError, yaml.YAMLError) as e:
            raise MockScriptError(f"cannot load mock script {path}: {e}") from e
        raw_rules = script.get("rules") if isinstance(script, dict) else script
        if not isinstance(raw_rules, list):
            raise MockScriptError(f"{path}: expected a list of rules")
        return cls.from_rules(raw_rules, backend_id=f"mock:{path.name}")

    def calls_tagged(self, tag: str) -> int:
        return sum(1 for call_tag, _ in self.calls if call_tag == tag)

    async def generate(
        self,
        prompt: str,
        params: GenerationParams,
        *,
        tag: Optional[str] = None,
    ) -> LLMResponse:
        digest = prompt_digest(prompt)
        self.calls.append((tag, digest))
        for rule in self.rules:
            text = rule.match(prompt, digest, tag)
            if text is not None:
                return LLMResponse(text=text, latency=0.0, backend_id=self.backend_id)
        raise MockScriptError(f"no mock rule matches prompt {digest[:12]} (tag={tag})")


class RetryingBackend(LLMBackend):
    """Key-pooled backend with bounded retries and growing delay."""

    def __init__(
        self,
        api_keys: list[str],
        model: str,
        load_balancer: Optional[LoadBalancer] = None,
        max_retries: Optional[int] = None,
        retry_delay: Optional[float] = None,
        timeout: Optional[float] = None,
    ):
        if not api_keys:
            raise ConfigError(f"{self.backend_id} backend needs at least one API key")
        self.model = model
        self.load_balancer = load_balancer or LoadBalancer(api_keys)
        self.max_retries = settings.max_retries if max_retries is None else max_retries
        # 0 turns retrying off; the first attempt always happens
        self.max_attempts = max(1, self.max_retries)
        self.retry_delay = settings.retry_delay if retry_delay is None else retry_delay
        self.timeout = timeout or settings.http_timeout

    @abstractmethod
    async def _call(self, prompt: str, params: GenerationParams, api_key: str) -> str:
        """Issue one request; raise a BackendError subclass on failure."""

    async def generate(
        self,
        prompt: str,
        params: GenerationParams,
        *,
        tag: Optional[str] = None,
    ) -> LLMResponse:
        start_time = time.time()
        last_error = None
        timeouts = 0

        for attempt in range(1, self.max_attempts + 1):
            slot = await self.load_balancer.acquire(timeout=60)

            if slot is None:
                last_error = "No available API keys"
            else:
                try:
                    text = await asyncio.wait_for(
                        self._call(prompt, params, slot.api_key),
                        timeout=self.timeout,
                    )
                except BackendAuthError:
                    await self.load_balancer.release(slot, Release.FAILED)
                    raise
                except (asyncio.TimeoutError, BackendTimeoutError) as e:
                    await self.load_balancer.release(slot, Release.FAILED)
                    timeouts += 1
                    last_error = f"timeout: {e}" if str(e) else "timeout"
                except TransientBackendError as e:
                    await self.load_balancer.release(
                        slot, Release.RATE_LIMITED if e.rate_limited else Release.FAILED
                    )
                    last_error = str(e)
                except BackendError:
                    await self.load_balancer.release(slot, Release.FAILED)
                    raise
                else:
                    await self.load_balancer.release(slot)
                    if attempt > 1:
                        logger.info(f"{self.backend_id} call ({tag}) succeeded after {attempt} attempts")
                    return LLMResponse(
                        text=text,
                        latency=time.time() - start_time,
                        backend_id=self.backend_id,
                        attempts=attempt,
                    )

            logger.warning(f"{self.backend_id} attempt {attempt}/{self.max_attempts} failed ({tag}): {last_error}")
            if attempt < self.max_attempts:
                await asyncio.sleep(self.retry_delay * (2 ** (attempt - 1)))

        if timeouts == self.max_attempts:
            raise BackendTimeoutError(f"{self.backend_id}: all {timeouts} attempts timed out")
        raise RetriesExhaustedError(
            f"{self.backend_id}: gave up after {self.max_attempts} attempts: {last_error}",
            attempts=self.max_attempts,
        )

    def _model_for(self, params: GenerationParams) -> str:
        return params.model_id or self.model


class AnthropicBackend(RetryingBackend):
    """Anthropic Messages API."""

    backend_id = "anthropic"

    def __init__(self, api_keys: list[str], model: Optional[str] = None, **kwargs):
        super().__init__(api_keys, model or settings.claude_model, **kwargs)
        self._clients: dict[str, anthropic.AsyncAnthropic] = {}

    def _client(self, api_key: str) -> anthropic.AsyncAnthropic:
        if api_key not in self._clients:
            self._clients[api_key] = anthropic.AsyncAnthropic(api_key=api_key, max_retries=0)
        return self._clients[api_key]

    async def _call(self, prompt: str, params: GenerationParams, api_key: str) -> str:
        try:
            response = await self._client(api_key).messages.create(
                model=self._model_for(params),
                max_tokens=params.max_tokens,
                temperature=params.temperature,
                top_p=params.top_p,
                messages=[{"role": "user", "content": prompt}],
            )
        except (anthropic.AuthenticationError, anthropic.PermissionDeniedError) as e:
            raise BackendAuthError(f"anthropic credentials rejected: {e}") from e
        except anthropic.RateLimitError as e:
            raise TransientBackendError(f"anthropic rate limited: {e}", rate_limited=True) from e
        except anthropic.APITimeoutError as e:
            raise BackendTimeoutError(f"anthropic request timed out: {e}") from e
        except anthropic.APIConnectionError as e:
            raise TransientBackendError(f"anthropic connection failed: {e}") from e
        except anthropic.APIStatusError as e:
            raise classify_status(e.status_code, str(e)) from e

        return "".join(block.text for block in response.content if block.type == "text")

    async def aclose(self) -> None:
        for client in self._clients.values():
            await client.close()


class GeminiBackend(RetryingBackend):
    """Google Gemini through the google-genai SDK."""

    backend_id = "gemini"

    def __init__(self, api_keys: list[str], model: Optional[str] = None, **kwargs):
        super().__init__(api_keys, model or settings.gemini_model, **kwargs)

    async def _call(self, prompt: str, params: GenerationParams, api_key: str) -> str:
        client = genai.Client(api_key=api_key)
        config = types.GenerateContentConfig(
            temperature=params.temperature,
            top_p=params.top_p,
            max_output_tokens=params.max_tokens,
        )
        try:
            response = await client.aio.models.generate_content(
                model=self._model_for(params),
                contents=prompt,
                config=config,
            )
        except genai_errors.APIError as e:
            raise classify_status(e.code or 0, str(e)) from e
        except httpx.TimeoutException as e:
            raise BackendTimeoutError(f"gemini request timed out: {e}") from e
        except httpx.TransportError as e:
            raise TransientBackendError(f"gemini connection failed: {e}") from e

        return response.text or ""


def redact_headers(headers: httpx.Headers) -> dict[str, str]:
    """Header dict safe for logs."""
    hidden = {"authorization", "x-api-key", "api-key"}
    return {k: ("***" if k.lower() in hidden else v) for k, v in headers.items()}


class ChatCompletionBackend(RetryingBackend):
    """Generic HTTP chat-completion endpoint (`POST {base_url}/chat/completions`)."""

    backend_id = "chat"

    def __init__(
        self,
        api_keys: list[str],
        base_url: str,
        model: Optional[str] = None,
        transport: Optional[httpx.AsyncBaseTransport] = None,
        trace: bool = False,
        **kwargs,
    ):
        super().__init__(api_keys, model or settings.chat_model, **kwargs)
        self.base_url = base_url.rstrip("/")
        self.trace = trace
        self._client = httpx.AsyncClient(
            timeout=self.timeout,
            transport=transport,
            headers={"User-Agent": settings.user_agent},
        )

    async def _call(self, prompt: str, params: GenerationParams, api_key: str) -> str:
        body = {
            "model": self._model_for(params),
            "messages": [{"role": "user", "content": prompt}],
            "temperature": params.temperature,
            "top_p": params.top_p,
            "max_tokens": params.max_tokens,
        }
        request = self._client.build_request(
            "POST",
            f"{self.base_url}/chat/completions",
            json=body,
            headers={"Authorization": f"Bearer {api_key}"},
        )
        if self.trace:
            logger.debug(f"POST {request.url} headers={redact_headers(request.headers)} body={body}")

        try:
            response = await self._client.send(request)
        except httpx.TimeoutException as e:
            raise BackendTimeoutError(f"chat request timed out: {e}") from e
        except httpx.TransportError as e:
            raise TransientBackendError(f"chat connection failed: {e}") from e

        if self.trace:
            logger.debug(f"{response.status_code} {request.url} body={response.text[:2000]}")
        if response.status_code >= 400:
            raise classify_status(response.status_code, response.text[:200])

        try:
            return response.json()["choices"][0]["message"]["content"] or ""
        except (ValueError, KeyError, IndexError, TypeError) as e:
            raise TransientBackendError(f"malformed chat response: {e}") from e

    async def aclose(self) -> None:
        await self._client.aclose()


def create_backend(config: BackendConfig, trace: bool = False) -> LLMBackend:
    """Build the backend a run config names. Keys come from the environment."""
    if config.kind == "mock":
        if config.mock_script is None:
            raise ConfigError("backend.mock_script: required when backend.kind is 'mock'")
        return MockBackend.from_script(config.mock_script)

    if config.kind == "gemini":
        if not settings.google_api_key:
            raise ConfigError("KCMF_GOOGLE_API_KEY is not set")
        return GeminiBackend([settings.google_api_key], model=config.model)

    api_keys = get_llm_api_keys()
    if not api_keys:
        raise ConfigError("KCMF_LLM_API_KEY is not set (or pass --mock <script>)")
    if config.kind == "chat":
        base_url = config.base_url or settings.llm_base_url
        if not base_url:
            raise ConfigError("backend.base_url (or KCMF_LLM_BASE_URL) is required for the chat backend")
        return ChatCompletionBackend(api_keys, base_url, model=config.model, trace=trace)
    return AnthropicBackend(api_keys, model=config.model)


async def complete(
    backend: LLMBackend,
    prompt: PromptBundle,
    params: GenerationParams,
) -> LLMResponse:
    """Send a rendered match prompt to the backend."""
    logger.debug(f"match prompt {prompt.digest[:12]} source={prompt.source} k={prompt.k}")
    return await backend.generate(prompt.body, params, tag="match")
