"""Configuration for the matching pipeline.

`Settings` holds secrets and endpoints from the environment (or `.env`).
`RunConfig` is the declarative YAML run file checked into the repo.
"""

from pathlib import Path
from typing import Literal, Optional

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from src.exceptions import ConfigError
from src.models import (
    AggregationMode,
    GenerationParams,
    PromptOptions,
    SourceSet,
    TaskKind,
)


class Settings(BaseSettings):
    """Application settings loaded from environment variables."""

    model_config = SettingsConfigDict(
        env_prefix="KCMF_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    # LLM - multiple keys are pooled by the load balancer
    llm_api_key: Optional[str] = None
    llm_api_key_2: Optional[str] = None
    llm_api_key_3: Optional[str] = None
    llm_base_url: Optional[str] = None
    google_api_key: Optional[str] = None

    # Default models
    claude_model: str = "claude-sonnet-4-20250514"
    gemini_model: str = "gemini-2.0-flash"
    chat_model: str = "gpt-3.5-turbo-1106"

    # Knowledge bases
    snowstorm_url: str = "https://browser.ihtsdotools.org/snowstorm/snomed-ct"
    snowstorm_branch: str = "MAIN"
    wikidata_api_url: str = "https://www.wikidata.org/w/api.php"
    wikidata_sparql_url: str = "https://query.wikidata.org/sparql"
    wikipedia_api_url: str = "https://en.wikipedia.org/w/api.php"
    user_agent: str = "kcmf-matcher/1.0 (data integration research)"

    # HTTP behaviour
    http_timeout: float = 30.0
    max_retries: int = 3
    retry_delay: float = 2.0
    min_request_interval: float = 0.1
    max_concurrent_per_key: int = 5
    rate_limit_cooldown: float = 45.0


settings = Settings()


def get_llm_api_keys() -> list[str]:
    """Get all configured LLM API keys."""
    keys = []
    for key in (settings.llm_api_key, settings.llm_api_key_2, settings.llm_api_key_3):
        if key:
            keys.append(key)
    return keys


class BackendConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["anthropic", "gemini", "chat", "mock"] = "anthropic"
    model: Optional[str] = None
    base_url: Optional[str] = None
    mock_script: Optional[Path] = None


class KnowledgeConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    blacklist: Optional[Path] = None
    eak_max_children: int = Field(default=3, ge=0)
    eak_top_k: int = Field(default=1, ge=1)
    extract_word_limit: int = Field(default=1000, gt=0)
    facts_limit: int = Field(default=10, ge=0)
    replay_from: Optional[Path] = None
    record_to: Optional[Path] = None


class RunConfig(BaseModel):
    """One reproducible run: data, pseudo-code, sources, prompt and backend."""

    model_config = ConfigDict(frozen=True)

    dataset: Path
    task_kind: TaskKind
    pseudocode: Path
    demonstrations: Optional[Path] = None
    sources: list[str] = Field(default_factory=lambda: ["Wikidata+DaK", "Wikipedia+EaK", "EaK"])
    shots: Optional[int] = Field(default=None, ge=0)
    template: Optional[TaskKind] = None
    generation: GenerationParams = Field(default_factory=GenerationParams)
    options: PromptOptions = Field(default_factory=PromptOptions)
    backend: BackendConfig = Field(default_factory=BackendConfig)
    knowledge: KnowledgeConfig = Field(default_factory=KnowledgeConfig)
    cache_dir: Path = Path(".kcmf_cache")
    output_dir: Path = Path("runs")
    seed: int = 0
    runs: int = Field(default=1, ge=1)
    aggregation: AggregationMode = AggregationMode.BEST_F1
    workers: int = Field(default=4, ge=1)
    trace: bool = False

    @model_validator(mode="before")
    @classmethod
    def _task_defaults(cls, data):
        # 4-shot for schema matching, 2-shot for entity matching
        if isinstance(data, dict) and data.get("task_kind") is not None:
            kind = TaskKind(data["task_kind"])
            data = dict(data)
            if data.get("shots") is None:
                data["shots"] = 4 if kind is TaskKind.SM else 2
            if data.get("template") is None:
                data["template"] = kind.value
        return data

    @model_validator(mode="after")
    def _sources_and_demos(self) -> "RunConfig":
        SourceSet.parse(self.sources)
        if self.shots and self.demonstrations is None:
            raise ValueError(f"{self.shots}-shot prompting needs a demonstrations file")
        return self

    @property
    def source_set(self) -> SourceSet:
        return SourceSet.parse(self.sources)

    def check_files(self) -> None:
        """Raise ConfigError for referenced files that do not exist."""
        required = {"dataset": self.dataset, "pseudocode": self.pseudocode}
        if self.demonstrations is not None:
            required["demonstrations"] = self.demonstrations
        if self.knowledge.blacklist is not None:
            required["knowledge.blacklist"] = self.knowledge.blacklist
        if self.knowledge.replay_from is not None:
            required["knowledge.replay_from"] = self.knowledge.replay_from
        if self.backend.kind == "mock":
            if self.backend.mock_script is None:
                raise ConfigError("backend.mock_script: required when backend.kind is 'mock'")
            required["backend.mock_script"] = self.backend.mock_script
        for field, path in required.items():
            if not Path(path).exists():
                raise ConfigError(f"{field}: file not found: {path}")


_PATH_FIELDS = ("dataset", "pseudocode", "demonstrations", "cache_dir", "output_dir")


def _resolve_paths(raw: dict, base: Path) -> dict:
    """Make relative paths in a raw config relative to the config file."""

    def resolve(value):
        if value is None:
            return None
        path = Path(value)
        return str(path if path.is_absolute() else base / path)

    for field in _PATH_FIELDS:
        if field in raw:
            raw[field] = resolve(raw[field])
    for section, fields in (
        ("backend", ("mock_script",)),
        ("knowledge", ("blacklist", "replay_from", "record_to")),
    ):
        if isinstance(raw.get(section), dict):
            for field in fields:
                if field in raw[section]:
                    raw[section][field] = resolve(raw[section][field])
    return raw


def load_run_config(path: Path, **overrides) -> RunConfig:
    """Load a YAML run file, apply flag overrides, validate referenced files.

    Overrides use dotted keys for nested fields (e.g. `backend.mock_script`);
    `None` values are ignored.
    """
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
    except FileNotFoundError as e:
        raise ConfigError(f"config file not found: {path}") from e
    except yaml.YAMLError as e:
        raise ConfigError(f"{path}: invalid YAML: {e}") from e
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a mapping")

    raw = _resolve_paths(raw, path.parent)
    for key, value in overrides.items():
        if value is None:
            continue
        target = raw
        *parents, leaf = key.split(".")
        for parent in parents:
            target = target.setdefault(parent, {})
        target[leaf] = str(value) if isinstance(value, Path) else value

    try:
        config = RunConfig.model_validate(raw)
    except ValidationError as e:
        first = e.errors()[0]
        field = ".".join(str(part) for part in first["loc"]) or "config"
        raise ConfigError(f"{path}: {field}: {first['msg']}") from e
    config.check_files()
    return config
