"""Builders for pairs, pools and JSONL files used across the suite."""

import json
from pathlib import Path
from typing import Iterable, Optional

from src.models import CandidatePair, EntityItem, MappingPool, SchemaItem, TaskKind

LONG_EXTRACT = " ".join(f"word{n}" for n in range(1200))


def schema(table: str, column: str, table_desc: str = "", column_desc: str = "") -> SchemaItem:
    return SchemaItem(
        table_name=table,
        column_name=column,
        table_description=table_desc,
        column_description=column_desc,
    )


def entity(name: str, **attrs: str) -> EntityItem:
    return EntityItem(name=name, attrs=tuple(attrs.items()))


def pair(pair_id: str, left, right, label: Optional[bool] = None) -> CandidatePair:
    return CandidatePair(id=pair_id, left=left, right=right, label=label)


def pool(*pairs: CandidatePair) -> MappingPool:
    return MappingPool(task_kind=pairs[0].kind if pairs else TaskKind.SM, pairs=tuple(pairs))


def write_jsonl(path: Path, records: Iterable[dict]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("".join(json.dumps(record) + "\n" for record in records), encoding="utf-8")
    return path


# Pairs the toy mock script answers "yes" for
TOY_YES = ("00", "02", "04", "06", "08", "10", "11", "13")


def toy_schema_records(count: int = 20, labeled: bool = True) -> list[dict]:
    """Schema pairs tNN; even pairs match. Table descriptions mention the next pair's table."""
    records = []
    for i in range(count):
        number, following = f"{i:02d}", f"{(i + 1) % count:02d}"
        record = {
            "id": f"t{number}",
            "kind": "SM",
            "left": {
                "table": f"tbl{number}",
                "column": f"c{number}",
                "table_desc": f"records linked to tbl{following} entries",
                "column_desc": f"value {number}",
            },
            "right": {
                "table": f"src{number}",
                "column": f"c{number}",
                "table_desc": f"source rows {number}",
                "column_desc": f"source value {number}",
            },
        }
        if labeled:
            record["label"] = i % 2 == 0
        records.append(record)
    return records


def toy_mock_rules() -> list[dict]:
    yes = "|".join(TOY_YES)
    return [
        {"tag": "self_indicator", "response": "Both schemas hold toy values."},
        {"tag": "summarize", "response": "toy values"},
        {"tag": "match", "regex": f"Your turn:\\nSchema A: tbl({yes})-", "response": "Answer: yes"},
        {"tag": "match", "response": "Answer: no"},
    ]
