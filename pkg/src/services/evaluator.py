"""Scoring, multi-run aggregation and format audits."""

from collections import Counter
from pathlib import Path
from typing import Iterable, Mapping

from pydantic import ValidationError

from src.exceptions import DataError
from src.models import AggregationMode, Decision, FormatAudit, FormatClass, Metrics, RunReport
from src.services.dataset_loader import iter_jsonl


def metrics_from_counts(tp: float, fp: float, tn: float, fn: float) -> Metrics:
    """Derived scores; any zero denominator gives 0."""
    total = tp + fp + tn + fn
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    accuracy = (tp + tn) / total if total else 0.0
    return Metrics(accuracy=accuracy, precision=precision, recall=recall, f1=f1, tp=tp, fp=fp, tn=tn, fn=fn)


def score(decisions: Iterable[Decision], labels: Mapping[str, bool]) -> Metrics:
    """Confusion matrix of final verdicts against labels."""
    tp = fp = tn = fn = 0
    for decision in decisions:
        if decision.pair_id not in labels:
            raise DataError(f"no label for pair {decision.pair_id}")
        actual = labels[decision.pair_id]
        if decision.final and actual:
            tp += 1
        elif decision.final:
            fp += 1
        elif actual:
            fn += 1
        else:
            tn += 1
    return metrics_from_counts(tp, fp, tn, fn)


def select_best_run(run_metrics: list[Metrics]) -> int:
    """Index of the highest-F1 run; the first one wins ties."""
    if not run_metrics:
        raise DataError("no runs to aggregate")
    best = 0
    for index, metrics in enumerate(run_metrics):
        if metrics.f1 > run_metrics[best].f1:
            best = index
    return best


def aggregate_runs(run_metrics: list[Metrics], mode: AggregationMode = AggregationMode.BEST_F1) -> Metrics:
    """Best-F1 run, or the field-wise mean of all runs."""
    if not run_metrics:
        raise DataError("no runs to aggregate")
    if mode is AggregationMode.BEST_F1:
        return run_metrics[select_best_run(run_metrics)]

    count = len(run_metrics)
    fields = ("accuracy", "precision", "recall", "f1", "tp", "fp", "tn", "fn")
    means = {name: sum(getattr(m, name) for m in run_metrics) / count for name in fields}
    return Metrics(**means)


def audit(decisions: Iterable[Decision]) -> FormatAudit:
    counts = Counter(decision.format_class for decision in decisions)
    return FormatAudit(
        well_formatted=counts[FormatClass.WELL_FORMATTED],
        badly_formatted=counts[FormatClass.BADLY_FORMATTED],
        eliminated=counts[FormatClass.ELIMINATED],
    )


def load_run_log(path: Path) -> list[Decision]:
    """Read decisions back from a run log."""
    decisions = []
    for lineno, record in iter_jsonl(path):
        try:
            decisions.append(Decision.from_record(record))
        except (KeyError, ValueError, ValidationError) as e:
            raise DataError(f"{path}:{lineno}: malformed decision: {e}") from e
    return decisions


def build_report(
    run_decisions: list[list[Decision]],
    labels: Mapping[str, bool],
    mode: AggregationMode = AggregationMode.BEST_F1,
) -> RunReport:
    """
    Score every run and aggregate.

    The audit covers the selected run for best-F1 aggregation and every
    decision of every run for the mean.
    """
    run_metrics = [score(decisions, labels) for decisions in run_decisions]
    selected = select_best_run(run_metrics) if mode is AggregationMode.BEST_F1 else None
    audited = run_decisions[selected] if selected is not None else [d for run in run_decisions for d in run]
    return RunReport(
        metrics=aggregate_runs(run_metrics, mode),
        audit=audit(audited),
        runs=tuple(run_metrics),
        aggregation=mode,
        selected_run=selected,
    )
