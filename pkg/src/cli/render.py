"""`render`: print the match prompts of one pair without calling a backend."""

import argparse

from src.cli import add_run_options, load_config
from src.services.orchestrator import Orchestrator


async def run_render(args: argparse.Namespace) -> int:
    orchestrator = Orchestrator(load_config(args))
    try:
        bundles = await orchestrator.render_pair(args.pair_id)
    finally:
        await orchestrator.aclose()

    for bundle in bundles:
        print(f"===== {bundle.source} (k={bundle.k}, {bundle.digest[:12]}) =====")
        print(bundle.body)
        print()
    return 0


def setup(subparsers) -> None:
    parser = subparsers.add_parser("render", help="dump the prompts for one pair")
    parser.add_argument("--pair-id", required=True)
    add_run_options(parser)
    parser.set_defaults(handler=run_render)
