"""`knowledge build`: populate the knowledge cache for one source."""

import argparse
import logging

from src.cli import add_run_options, load_config
from src.exceptions import ConfigError
from src.models import SourceSpec
from src.services.orchestrator import Orchestrator

logger = logging.getLogger(__name__)


async def run_knowledge_build(args: argparse.Namespace) -> int:
    try:
        spec = SourceSpec.parse(args.source)
    except ValueError as e:
        raise ConfigError(f"--source: {e}") from e
    if spec.is_null:
        print("Null source: no knowledge to build")
        return 0

    config = load_config(args)
    orchestrator = Orchestrator(config)
    try:
        counts = await orchestrator.build_knowledge(spec)
    finally:
        await orchestrator.aclose()

    pairs = len(orchestrator.pool.pairs)
    print(
        f"{spec.name}: {pairs} pairs, {counts.get('hit', 0)} cached, "
        f"{counts.get('built', 0)} built, {counts.get('empty', 0)} empty"
    )
    return 0


def setup(subparsers) -> None:
    parser = subparsers.add_parser("knowledge", help="knowledge cache commands")
    actions = parser.add_subparsers(dest="action", required=True)
    build = actions.add_parser("build", help="retrieve and cache knowledge for every pair")
    build.add_argument("--source", required=True, help="source expression, e.g. Wikipedia+EaK")
    add_run_options(build)
    build.set_defaults(handler=run_knowledge_build)
