"""Command modules. Each exposes `setup(subparsers)` and an async handler."""

import argparse
from pathlib import Path

from src.config import RunConfig, load_run_config


def add_run_options(parser: argparse.ArgumentParser, config_required: bool = True) -> None:
    """Flags shared by every command that reads a run config."""
    parser.add_argument("--config", type=Path, required=config_required, help="YAML run configuration")
    parser.add_argument("--mock", type=Path, help="answer every prompt from this mock script")
    parser.add_argument("--workers", type=int, help="pairs classified concurrently")
    parser.add_argument("--seed", type=int, help="seed for sampling and tie-breaking")
    parser.add_argument("--trace", action="store_true", help="debug logging with HTTP traces")


def load_config(args: argparse.Namespace) -> RunConfig:
    """Load the run config and apply command-line overrides."""
    overrides = {
        "workers": args.workers,
        "seed": args.seed,
        "trace": True if args.trace else None,
    }
    if args.mock is not None:
        overrides["backend.kind"] = "mock"
        overrides["backend.mock_script"] = args.mock.resolve()
    return load_run_config(args.config, **overrides)
