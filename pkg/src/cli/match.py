"""`match`: classify every pair of the pool and write run logs and a report."""

import argparse
import logging

from src.cli import add_run_options, load_config
from src.services.orchestrator import Orchestrator

logger = logging.getLogger(__name__)


async def run_match(args: argparse.Namespace) -> int:
    config = load_config(args)
    orchestrator = Orchestrator(config)
    try:
        report = await orchestrator.run()
    finally:
        await orchestrator.aclose()

    if report is not None:
        print(orchestrator.delivery.format_report(report), end="")
    logger.info(f"Artifacts written to {config.output_dir}")
    return 0


def setup(subparsers) -> None:
    parser = subparsers.add_parser("match", help="run the matching pipeline over a pool")
    add_run_options(parser)
    parser.set_defaults(handler=run_match)
