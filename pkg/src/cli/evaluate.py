"""`eval`: re-score existing run logs against the pool labels."""

import argparse
from pathlib import Path

from src.cli import add_run_options, load_config
from src.exceptions import DataError
from src.services.dataset_loader import load_pool
from src.services.delivery import DeliveryService
from src.services.evaluator import build_report, load_run_log


async def run_eval(args: argparse.Namespace) -> int:
    config = load_config(args)
    pool = load_pool(config.dataset, config.task_kind)
    runs = [load_run_log(path) for path in args.log]

    expected = {pair.id for pair in pool.pairs}
    for path, decisions in zip(args.log, runs):
        logged = {decision.pair_id for decision in decisions}
        if logged != expected:
            missing = len(expected - logged)
            extra = len(logged - expected)
            raise DataError(f"{path}: does not match the pool ({missing} missing, {extra} unknown pairs)")

    report = build_report(runs, pool.labels(), config.aggregation)
    print(DeliveryService(config.output_dir).format_report(report), end="")
    return 0


def setup(subparsers) -> None:
    parser = subparsers.add_parser("eval", help="score run logs without calling a backend")
    parser.add_argument("--log", type=Path, nargs="+", required=True, help="run log JSONL (one per run)")
    add_run_options(parser)
    parser.set_defaults(handler=run_eval)
