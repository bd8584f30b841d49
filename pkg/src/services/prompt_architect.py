"""Prompt Architect - serializes pairs, knowledge and pseudo-code into prompts.

Builds the k-shot match prompt (question, rules, demonstrations, target)
and the pretask prompts for self-indicators and demonstration summaries.
Index conventions: rules use Roman numerals, knowledge items lowercase
letters, reasoning steps numbers. With U-indices off everything is numbered.
"""

import logging
from typing import Optional

from src.exceptions import FATAL_BACKEND_ERRORS, BackendError, DataError
from src.models import (
    CandidatePair,
    Demonstration,
    GenerationParams,
    KnowledgeItem,
    PromptBundle,
    PromptOptions,
    PseudoCode,
    SelfIndicator,
    SummaryStrategy,
    TaskKind,
)
from src.services.dataset_loader import render_item
from src.services.llm_backends import LLMBackend
from src.services.templates import load_template

logger = logging.getLogger(__name__)

_QUESTION_TAIL = {
    TaskKind.SM: (
        " The task should be solved by completing the reasoning steps and concluding a final "
        "answer ONLY yes or no. Do not stop until you draw a final answer. Schema name is the "
        "table and column names of the schema separated by a dash."
    ),
    TaskKind.EM: " You must think step by step, and finally draw an answer only yes or no.",
}

_QUESTION_LEAD = {
    (TaskKind.SM, True): "Can records in schema B be transformed and stored in schema A?",
    (TaskKind.SM, False): "Are schema A and B matched?",
    (TaskKind.EM, True): "Do entity A and entity B refer to the same real-world concept?",
    (TaskKind.EM, False): "Are entity A and B matched?",
}

_BASELINE_QUESTION = {
    TaskKind.SM: "Are schema A and B the same? ONLY yes or no.",
    TaskKind.EM: "Question: Do entity A and entity B refer to the same real-world concept? Only yes or no.",
}


def letter_index(position: int) -> str:
    """0 -> a, 25 -> z, 26 -> aa, ..."""
    label = ""
    position += 1
    while position:
        position, remainder = divmod(position - 1, 26)
        label = chr(ord("a") + remainder) + label
    return label


def pair_lines(pair: CandidatePair, summarized: Optional[tuple[str, str]] = None) -> list[str]:
    """Rendered pair; summaries replace the descriptions when given."""
    noun = "schema" if pair.kind is TaskKind.SM else "entity"
    detail = "Description of" if pair.kind is TaskKind.SM else "Attributes of"
    lines = []
    for side, item in (("A", pair.left), ("B", pair.right)):
        name, description = render_item(item)
        lines.append(f"{noun.capitalize()} {side}: {name}")
        if summarized is not None:
            summary = summarized[0] if side == "A" else summarized[1]
            lines.append(f"Summary of {noun} {side}: {summary}".rstrip())
        else:
            lines.append(f"{detail} {noun} {side}: {description}".rstrip())
    return lines


def knowledge_lines(items: list[KnowledgeItem], u_indices: bool = True) -> list[str]:
    """Knowledge block; empty when there is nothing to show."""
    if not items:
        return []
    lines = ["Knowledge for the task:"]
    for position, item in enumerate(items):
        label = letter_index(position) if u_indices else str(position + 1)
        lines.append(f"{label}. {item.text}")
    return lines


def question_text(task_kind: TaskKind, options: PromptOptions) -> str:
    if options.baseline:
        return _BASELINE_QUESTION[task_kind]
    return _QUESTION_LEAD[(task_kind, options.task_oriented_instruction)] + _QUESTION_TAIL[task_kind]


class PromptArchitect:
    """Renders match prompts and pretask prompts for one task configuration."""

    def __init__(self, pseudocode: PseudoCode, options: PromptOptions, shots: int):
        self.pseudocode = pseudocode
        self.options = options
        self.shots = shots
        self.task_kind = pseudocode.task_kind

    def _head_blocks(self, options: PromptOptions) -> list[str]:
        if options.baseline:
            return [question_text(self.task_kind, options)]
        question = load_template("question").render(question=question_text(self.task_kind, options))
        rules = load_template("rules").render(
            rules_heading="Rules for the task" if options.rules_terminology else "Knowledge for the task",
            rules=self.pseudocode.render_lines(options.u_indices, options.drop_preamble),
        )
        return [question, rules]

    def _demo_block(self, number: int, demo: Demonstration, options: PromptOptions) -> str:
        answer = "yes" if demo.label else "no"
        if options.baseline:
            return load_template("baseline_demonstration").render(
                number=str(number), pair=pair_lines(demo.pair), answer=answer
            )
        if demo.reasoning is None:
            raise DataError(f"demonstration {demo.demo_id} has no reasoning steps")

        summarized = demo.summarized if options.summary_strategy is not SummaryStrategy.NONE else None
        indicator = demo.self_indicator if options.self_indicator else None
        return load_template("demonstration").render(
            number=str(number),
            pair=pair_lines(demo.pair, summarized),
            knowledge=knowledge_lines(list(demo.knowledge), options.u_indices),
            reasoning=demo.reasoning.lines(start=1, indicator=indicator),
            answer=answer,
        )

    def _target_block(
        self,
        pair: CandidatePair,
        knowledge: list[KnowledgeItem],
        options: PromptOptions,
        self_indicator: Optional[str],
        summarized: Optional[tuple[str, str]],
    ) -> str:
        if options.baseline:
            return load_template("baseline_target").render(
                pair=pair_lines(pair),
                answer_cue=["Answer:"] if self.task_kind is TaskKind.EM else [],
            )
        reasoning = []
        if options.self_indicator and self_indicator:
            reasoning = [f"1. {self_indicator}"]
        return load_template("target").render(
            pair=pair_lines(pair, summarized),
            knowledge=knowledge_lines(knowledge, options.u_indices),
            reasoning=reasoning,
        )

    def render(
        self,
        pair: CandidatePair,
        knowledge: list[KnowledgeItem],
        demos: list[Demonstration],
        source: str = "",
        self_indicator: Optional[str] = None,
        summarized: Optional[tuple[str, str]] = None,
        options: Optional[PromptOptions] = None,
    ) -> PromptBundle:
        """
        Build the k-shot match prompt for one pair and one knowledge source.

        Args:
            pair: Target pair
            knowledge: Knowledge items of this source for the target
            demos: Exactly k demonstrations, carrying their own knowledge
            source: Knowledge source name recorded on the bundle
            self_indicator: Self-indicator text for the target, if any
            summarized: Target summaries (summary strategy "all")
            options: Per-source override of the architect's options

        Returns:
            PromptBundle with the full body
        """
        options = options or self.options
        if len(demos) != self.shots:
            raise DataError(f"expected {self.shots} demonstrations, got {len(demos)}")

        head = self._head_blocks(options)
        blocks: list[str] = list(head)
        for number, demo in enumerate(demos, start=1):
            if number > 1 and not options.instruction_extraction:
                blocks.extend(head)
            blocks.append(self._demo_block(number, demo, options))
        if demos and not options.instruction_extraction:
            blocks.extend(head)
        blocks.append(self._target_block(pair, knowledge, options, self_indicator, summarized))

        return PromptBundle(
            template_id=self.task_kind,
            body="\n\n".join(blocks),
            k=len(demos),
            source=source,
            options=options,
        )

    def self_indicator_prompt(self, pair: CandidatePair, knowledge: list[KnowledgeItem]) -> str:
        template = "self_indicator_sm" if self.task_kind is TaskKind.SM else "self_indicator_em"
        return load_template(template).render(
            pair=pair_lines(pair),
            knowledge=knowledge_lines(knowledge, self.options.u_indices),
        )

    def summary_prompt(self, name: str, description: str) -> str:
        template = "summarize_demo_sm" if self.task_kind is TaskKind.SM else "summarize_demo_em"
        return load_template(template).render(name=name, description=description)

    async def extract_self_indicator(
        self,
        pair: CandidatePair,
        knowledge: list[KnowledgeItem],
        backend: LLMBackend,
        params: Optional[GenerationParams] = None,
    ) -> Optional[SelfIndicator]:
        """One backend call; None when the call fails or returns nothing."""
        prompt = self.self_indicator_prompt(pair, knowledge)
        try:
            response = await backend.generate(prompt, params or GenerationParams(), tag="self_indicator")
        except FATAL_BACKEND_ERRORS:
            raise
        except BackendError as e:
            logger.warning(f"Self-indicator failed for {pair.id}, continuing without it: {e}")
            return None
        text = " ".join(response.text.split())
        return SelfIndicator(text=text) if text else None

    async def summarize_pair(
        self,
        pair: CandidatePair,
        backend: LLMBackend,
        params: Optional[GenerationParams] = None,
    ) -> Optional[tuple[str, str]]:
        """Summaries of both items, one call each. None on backend failure."""
        summaries = []
        try:
            for item in (pair.left, pair.right):
                name, description = render_item(item)
                response = await backend.generate(
                    self.summary_prompt(name, description), params or GenerationParams(), tag="summarize"
                )
                summaries.append(" ".join(response.text.split()))
        except FATAL_BACKEND_ERRORS:
            raise
        except BackendError as e:
            logger.warning(f"Summarizing {pair.id} failed, keeping raw descriptions: {e}")
            return None
        return summaries[0], summaries[1]

    async def summarize_demo(
        self,
        demo: Demonstration,
        backend: LLMBackend,
        params: Optional[GenerationParams] = None,
    ) -> Demonstration:
        summarized = await self.summarize_pair(demo.pair, backend, params)
        if summarized is None:
            return demo
        return demo.model_copy(update={"summarized": summarized})


def render_prompt(
    pseudocode: PseudoCode,
    pair: CandidatePair,
    knowledge: list[KnowledgeItem],
    demos: list[Demonstration],
    opts: PromptOptions,
    *,
    source: str = "",
    self_indicator: Optional[str] = None,
    summarized: Optional[tuple[str, str]] = None,
    k: Optional[int] = None,
) -> PromptBundle:
    """Stateless form of `PromptArchitect.render`; k defaults to len(demos)."""
    architect = PromptArchitect(pseudocode, opts, len(demos) if k is None else k)
    return architect.render(pair, knowledge, demos, source, self_indicator, summarized)
