"""Delivery service for writing run artifacts.

Handles:
- Run logs (one JSONL file per run, decisions ordered by pair id)
- The aggregated report as JSON and as a plain-text table
- Progress lines while pairs are classified
"""

import json
import logging
from pathlib import Path
from typing import Optional

from src.models import Decision, Metrics, RunReport

logger = logging.getLogger(__name__)


class DeliveryService:
    """Writes run logs and reports under one output directory."""

    REPORT_JSON = "report.json"
    REPORT_TEXT = "report.txt"

    def __init__(self, output_dir: Path):
        self.output_dir = Path(output_dir)

    def run_log_path(self, run_index: int) -> Path:
        return self.output_dir / "runs" / f"run-{run_index + 1}.jsonl"

    def write_run_log(self, run_index: int, decisions: list[Decision]) -> Path:
        """
        Write one run's decisions as JSONL.

        Args:
            run_index: Zero-based run number
            decisions: Decisions of the run, any order

        Returns:
            Path of the written log
        """
        path = self.run_log_path(run_index)
        path.parent.mkdir(parents=True, exist_ok=True)
        lines = [
            json.dumps(decision.to_record(), ensure_ascii=False)
            for decision in sorted(decisions, key=lambda d: d.pair_id)
        ]
        path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
        logger.info(f"Wrote {len(lines)} decisions to {path}")
        return path

    def write_report(self, report: RunReport) -> tuple[Path, Path]:
        """Write report.json and report.txt; returns both paths."""
        self.output_dir.mkdir(parents=True, exist_ok=True)
        json_path = self.output_dir / self.REPORT_JSON
        text_path = self.output_dir / self.REPORT_TEXT
        json_path.write_text(json.dumps(report.to_summary(), indent=2) + "\n", encoding="utf-8")
        text_path.write_text(self.format_report(report), encoding="utf-8")
        logger.info(f"Wrote report to {json_path}")
        return json_path, text_path

    def format_report(self, report: RunReport) -> str:
        """Plain-text report: one row per run, then the aggregate."""
        lines = [
            f"{'run':<6}{'accuracy':>10}{'precision':>11}{'recall':>9}{'f1':>9}"
            f"{'tp':>7}{'fp':>7}{'tn':>7}{'fn':>7}",
        ]
        for index, metrics in enumerate(report.runs):
            marker = "*" if report.selected_run == index else " "
            lines.append(self._row(f"{index + 1}{marker}", metrics))
        lines.append(self._row(report.aggregation.value, report.metrics))
        lines.append("")

        audit = report.audit
        lines.append(
            f"format audit: {audit.well_formatted} well-formatted, "
            f"{audit.badly_formatted} badly-formatted, {audit.eliminated} eliminated"
        )
        if report.selected_run is not None:
            lines.append(f"selected run: {report.selected_run + 1}")
        return "\n".join(lines) + "\n"

    def _row(self, label: str, metrics: Metrics) -> str:
        return (
            f"{label:<6}{metrics.accuracy:>10.4f}{metrics.precision:>11.4f}{metrics.recall:>9.4f}"
            f"{metrics.f1:>9.4f}{self._count(metrics.tp)}{self._count(metrics.fp)}"
            f"{self._count(metrics.tn)}{self._count(metrics.fn)}"
        )

    @staticmethod
    def _count(value) -> str:
        if float(value).is_integer():
            return f"{int(value):>7d}"
        return f"{value:>7.1f}"

    def send_progress_update(self, completed: int, total: int, status: Optional[str] = None) -> None:
        """Log classification progress."""
        progress_bar = self._create_progress_bar(completed, total)
        suffix = f" {status}" if status else ""
        logger.info(f"{progress_bar} {completed}/{total}{suffix}")

    def _create_progress_bar(self, completed: int, total: int, width: int = 20) -> str:
        filled = int(width * completed / total) if total else width
        return f"[{'=' * filled}{' ' * (width - filled)}]"
