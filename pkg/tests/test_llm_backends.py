import httpx
import pytest

from src.config import BackendConfig, settings
from src.exceptions import (
    BackendAuthError,
    BackendError,
    ConfigError,
    MockScriptError,
    RetriesExhaustedError,
)
from src.models import GenerationParams
from src.services.llm_backends import (
    ChatCompletionBackend,
    MockBackend,
    classify_status,
    create_backend,
    prompt_digest,
    redact_headers,
)
from src.services.load_balancer import LoadBalancer
from tests.conftest import CONFIG_DIR

PARAMS = GenerationParams()


def chat_backend(handler, keys=("key-1",), max_retries=3) -> ChatCompletionBackend:
    return ChatCompletionBackend(
        list(keys),
        "https://llm.example.org/v1/",
        model="test-model",
        transport=httpx.MockTransport(handler),
        load_balancer=LoadBalancer(list(keys), rate_limit_cooldown=0),
        max_retries=max_retries,
        retry_delay=0,
    )


def completion(text: str) -> httpx.Response:
    return httpx.Response(200, json={"choices": [{"message": {"content": text}}]})


class Scripted:
    """Replays a list of responses and records requests."""

    def __init__(self, *responses: httpx.Response):
        self.responses = list(responses)
        self.requests: list[httpx.Request] = []

    def __call__(self, request: httpx.Request) -> httpx.Response:
        self.requests.append(request)
        return self.responses.pop(0)


async def test_chat_backend_posts_the_prompt():
    handler = Scripted(completion("Answer: yes"))
    backend = chat_backend(handler)

    response = await backend.generate("Are they matched?", GenerationParams(temperature=0.0), tag="match")
    await backend.aclose()

    assert response.text == "Answer: yes"
    assert response.attempts == 1
    request = handler.requests[0]
    assert str(request.url) == "https://llm.example.org/v1/chat/completions"
    assert request.headers["Authorization"] == "Bearer key-1"
    body = httpx.Response(200, content=request.content).json()
    assert body["model"] == "test-model"
    assert body["messages"] == [{"role": "user", "content": "Are they matched?"}]
    assert body["temperature"] == 0.0


async def test_rate_limits_are_retried():
    handler = Scripted(httpx.Response(429, text="slow down"), httpx.Response(503), completion("no"))
    backend = chat_backend(handler)

    response = await backend.generate("p", PARAMS)

    assert response.text == "no"
    assert response.attempts == 3
    assert backend.load_balancer.slots[0].failures == 2


async def test_malformed_completions_are_retried():
    handler = Scripted(httpx.Response(200, json={"choices": []}), completion("yes"))

    response = await chat_backend(handler).generate("p", PARAMS)

    assert response.attempts == 2


async def test_retries_are_bounded():
    handler = Scripted(*(httpx.Response(500) for _ in range(3)))

    with pytest.raises(RetriesExhaustedError) as raised:
        await chat_backend(handler).generate("p", PARAMS)

    assert raised.value.attempts == 3
    assert len(handler.requests) == 3


async def test_zero_retries_makes_a_single_attempt():
    handler = Scripted(httpx.Response(503), completion("yes"))

    with pytest.raises(RetriesExhaustedError) as raised:
        await chat_backend(handler, max_retries=0).generate("p", PARAMS)

    assert raised.value.attempts == 1
    assert len(handler.requests) == 1


@pytest.mark.parametrize("status,error", [(401, BackendAuthError), (403, BackendAuthError), (400, BackendError)])
async def test_client_errors_are_not_retried(status, error):
    handler = Scripted(httpx.Response(status, text="nope"))

    with pytest.raises(error):
        await chat_backend(handler).generate("p", PARAMS)

    assert len(handler.requests) == 1


async def test_failed_keys_are_avoided():
    handler = Scripted(httpx.Response(429), completion("yes"))
    backend = chat_backend(handler, keys=("key-1", "key-2"))

    await backend.generate("p", PARAMS)

    used = [request.headers["Authorization"] for request in handler.requests]
    assert used == ["Bearer key-1", "Bearer key-2"]


def test_classify_status():
    assert isinstance(classify_status(401, ""), BackendAuthError)
    assert classify_status(429, "").rate_limited
    assert not classify_status(502, "").rate_limited
    assert type(classify_status(404, "")) is BackendError


def test_redact_headers():
    headers = httpx.Headers({"Authorization": "Bearer secret", "Accept": "json"})

    assert redact_headers(headers) == {"authorization": "***", "accept": "json"}


async def test_mock_rules_match_in_order():
    backend = MockBackend.from_rules(
        [
            {"tag": "match", "regex": r"Entity A: (\w+)", "response": r"Answer: \1", "expand": True},
            {"digest": prompt_digest("exact prompt")[:12], "response": "by digest"},
            {"tag": "match", "response": "fallback"},
        ]
    )

    assert (await backend.generate("Entity A: yes", PARAMS, tag="match")).text == "Answer: yes"
    assert (await backend.generate("exact prompt", PARAMS, tag="keywords")).text == "by digest"
    assert (await backend.generate("other", PARAMS, tag="match")).text == "fallback"
    assert backend.calls_tagged("match") == 2

    with pytest.raises(MockScriptError, match="no mock rule"):
        await backend.generate("other", PARAMS, tag="summarize")


@pytest.mark.parametrize(
    "rules",
    [
        [{"tag": "match"}],
        [{"response": "yes"}],
        [{"regex": "(", "response": "yes"}],
        ["yes"],
    ],
)
def test_invalid_mock_rules(rules):
    with pytest.raises(MockScriptError):
        MockBackend.from_rules(rules)


def test_mock_script_files(tmp_path):
    backend = MockBackend.from_script(CONFIG_DIR / "mock" / "synthea.yaml")
    assert backend.rules
    assert backend.backend_id == "mock:synthea.yaml"

    with pytest.raises(MockScriptError):
        MockBackend.from_script(tmp_path / "missing.yaml")

    not_a_list = tmp_path / "bad.yaml"
    not_a_list.write_text("rules: 3\n")
    with pytest.raises(MockScriptError, match="list of rules"):
        MockBackend.from_script(not_a_list)


@pytest.fixture
def no_keys(monkeypatch):
    for name in ("llm_api_key", "llm_api_key_2", "llm_api_key_3", "llm_base_url", "google_api_key"):
        monkeypatch.setattr(settings, name, None)


def test_create_backend_requires_credentials(no_keys):
    with pytest.raises(ConfigError, match="KCMF_LLM_API_KEY"):
        create_backend(BackendConfig(kind="anthropic"))
    with pytest.raises(ConfigError, match="KCMF_GOOGLE_API_KEY"):
        create_backend(BackendConfig(kind="gemini"))
    with pytest.raises(ConfigError, match="mock_script"):
        create_backend(BackendConfig(kind="mock"))


async def test_create_chat_backend(no_keys, monkeypatch):
    monkeypatch.setattr(settings, "llm_api_key", "k1")
    with pytest.raises(ConfigError, match="base_url"):
        create_backend(BackendConfig(kind="chat"))

    backend = create_backend(BackendConfig(kind="chat", base_url="https://llm.example.org/v1", model="m"))

    assert isinstance(backend, ChatCompletionBackend)
    assert backend.model == "m"
    await backend.aclose()


def test_create_mock_backend():
    backend = create_backend(BackendConfig(kind="mock", mock_script=CONFIG_DIR / "mock" / "synthea.yaml"))

    assert isinstance(backend, MockBackend)
