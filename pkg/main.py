#!/usr/bin/env python3
"""
kcmf - knowledge-enhanced schema and entity matching
Main entry point for the command line.
"""

import argparse
import asyncio
import importlib
import logging
import sys
from typing import Optional

from src.exceptions import KcmfError

logger = logging.getLogger("kcmf")

COMMAND_MODULES = [
    "src.cli.match",
    "src.cli.knowledge",
    "src.cli.dataset",
    "src.cli.render",
    "src.cli.evaluate",
]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kcmf",
        description="Fine-tuning-free schema and entity matching with LLMs.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for module_name in COMMAND_MODULES:
        importlib.import_module(module_name).setup(subparsers)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    """Parse arguments, run the command, map errors to exit codes."""
    args = build_parser().parse_args(argv)

    logging.basicConfig(
        level=logging.DEBUG if getattr(args, "trace", False) else logging.INFO,
        format="%(asctime)s | %(levelname)-8s | %(name)s | %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
    )

    try:
        return asyncio.run(args.handler(args))
    except KcmfError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code
    except KeyboardInterrupt:
        logger.info("Interrupted")
        return 130


if __name__ == "__main__":
    sys.exit(main())
