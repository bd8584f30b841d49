"""Services layer for the matching pipeline."""

from .load_balancer import LoadBalancer
from .llm_backends import LLMBackend, MockBackend, create_backend
from .knowledge_cache import KnowledgeCache
from .knowledge_retriever import KnowledgeRetriever
from .prompt_architect import PromptArchitect, render_prompt
from .ensemble import PipelineContext, intge_classify, vote
from .delivery import DeliveryService
from .orchestrator import Orchestrator

__all__ = [
    "LoadBalancer",
    "LLMBackend",
    "MockBackend",
    "create_backend",
    "KnowledgeCache",
    "KnowledgeRetriever",
    "PromptArchitect",
    "render_prompt",
    "PipelineContext",
    "intge_classify",
    "vote",
    "DeliveryService",
    "Orchestrator",
]
