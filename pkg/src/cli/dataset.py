"""`dataset build`: entity-matching pool from concept-linked mentions."""

import argparse
import logging
from pathlib import Path

from src.models import GenConfig
from src.services.dataset_loader import dump_pool, pool_stats
from src.services.pool_generator import SIMILARITIES, build_pool, load_mentions

logger = logging.getLogger(__name__)


async def run_dataset_build(args: argparse.Namespace) -> int:
    cfg = GenConfig(
        negative_quota=args.quota,
        similarity=args.similarity,
        seed=args.seed,
        random_negatives=args.random_negatives,
    )
    pool = build_pool(load_mentions(args.input), cfg)
    dump_pool(pool, args.output)

    stats = pool_stats(pool)
    ratio = f"{stats.imbalance_ratio:.1f}" if stats.imbalance_ratio is not None else "n/a"
    print(f"{args.output}: {stats.n_instances} pairs, {stats.n_positive} positive, IR {ratio}")
    return 0


def setup(subparsers) -> None:
    parser = subparsers.add_parser("dataset", help="dataset commands")
    actions = parser.add_subparsers(dest="action", required=True)
    build = actions.add_parser("build", help="build an entity-matching pool from mentions")
    build.add_argument("--input", type=Path, required=True, help="mentions JSONL")
    build.add_argument("--output", type=Path, required=True, help="pair JSONL to write")
    build.add_argument("--quota", type=int, default=100_000, help="maximum negative pairs")
    build.add_argument("--similarity", choices=sorted(SIMILARITIES), default="trigram")
    build.add_argument("--seed", type=int, default=0)
    build.add_argument("--random-negatives", action="store_true", help="seeded sampling instead of top similarity")
    build.add_argument("--trace", action="store_true", help="debug logging")
    build.set_defaults(handler=run_dataset_build)
