"""Loading, serializing, rendering and summarizing candidate pools."""

import json
import logging
from pathlib import Path
from typing import Iterator

from pydantic import ValidationError

from src.exceptions import DataError
from src.models import (
    CandidatePair,
    DatasetStats,
    EntityItem,
    Item,
    MappingPool,
    SchemaItem,
    TaskKind,
)

logger = logging.getLogger(__name__)


def iter_jsonl(path: Path) -> Iterator[tuple[int, dict]]:
    """Yield (line number, record) for every non-blank line of a JSONL file."""
    path = Path(path)
    try:
        handle = path.open(encoding="utf-8")
    except OSError as e:
        raise DataError(f"cannot read {path}: {e}") from e
    with handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as e:
                raise DataError(f"{path}:{lineno}: invalid JSON: {e.msg}") from e
            if not isinstance(record, dict):
                raise DataError(f"{path}:{lineno}: record must be a JSON object")
            yield lineno, record


def _field_error(path: Path, lineno: int, error: ValidationError) -> DataError:
    first = error.errors()[0]
    field = ".".join(str(part) for part in first["loc"]) or "record"
    return DataError(f"{path}:{lineno}: field '{field}': {first['msg']}")


def load_pool(path: Path, task_kind: TaskKind) -> MappingPool:
    """Load a pre-enumerated pool, preserving record order and labels."""
    pairs = []
    seen: set[str] = set()
    for lineno, record in iter_jsonl(path):
        for field in ("id", "kind", "left", "right"):
            if field not in record:
                raise DataError(f"{path}:{lineno}: field '{field}': missing")
        if record["kind"] != task_kind.value:
            raise DataError(
                f"{path}:{lineno}: record {record['id']!r} is {record['kind']!r}, "
                f"expected {task_kind.value!r}"
            )
        try:
            pair = CandidatePair.from_record(record)
        except ValidationError as e:
            raise _field_error(path, lineno, e) from e
        except (KeyError, TypeError, ValueError) as e:
            raise DataError(f"{path}:{lineno}: malformed record {record.get('id')!r}: {e}") from e
        if pair.id in seen:
            raise DataError(f"{path}:{lineno}: duplicate pair id {pair.id!r}")
        seen.add(pair.id)
        pairs.append(pair)

    logger.info(f"Loaded {len(pairs)} {task_kind.value} pairs from {path}")
    return MappingPool(task_kind=task_kind, pairs=tuple(pairs))


def dump_pool(pool: MappingPool, path: Path) -> None:
    """Write a pool as JSONL in the same record format `load_pool` reads."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as handle:
        for pair in pool.pairs:
            handle.write(json.dumps(pair.to_record(), ensure_ascii=False) + "\n")


def render_item(item: Item) -> tuple[str, str]:
    """Render an item as (name text, description text).

    Schema items join table and column with a dash, and their
    descriptions with a semicolon. Entity attributes become
    `key: value` segments joined by `; `.
    """
    if isinstance(item, SchemaItem):
        name = f"{item.table_name}-{item.column_name}"
        description = f"{item.table_description};{item.column_description}"
        return name, description
    description = "; ".join(f"{key}: {value}" for key, value in item.attrs)
    return item.name, description


def parse_rendered(kind: TaskKind, name_text: str, description_text: str) -> Item:
    """Inverse of `render_item`. The first dash / semicolon is the separator."""
    if kind is TaskKind.SM:
        table, _, column = name_text.partition("-")
        table_desc, _, column_desc = description_text.partition(";")
        return SchemaItem(
            table_name=table,
            column_name=column,
            table_description=table_desc,
            column_description=column_desc,
        )
    attrs = []
    if description_text:
        for segment in description_text.split("; "):
            key, _, value = segment.partition(": ")
            attrs.append((key, value))
    return EntityItem(name=name_text, attrs=tuple(attrs))


def pool_stats(pool: MappingPool) -> DatasetStats:
    """Instance count, positives and imbalance ratio of a labeled pool."""
    unlabeled = [p.id for p in pool.pairs if p.label is None]
    if unlabeled:
        raise DataError(f"pool_stats needs labels; {len(unlabeled)} unlabeled, first {unlabeled[0]!r}")

    n_instances = len(pool.pairs)
    n_positive = sum(1 for p in pool.pairs if p.label)
    ratio = n_instances / n_positive if n_positive else None
    return DatasetStats(n_instances=n_instances, n_positive=n_positive, imbalance_ratio=ratio)
