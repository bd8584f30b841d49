"""Prompt template files.

Templates live in `src/templates/`. `{name}` is replaced by a string
value; a line consisting only of `[name]` is replaced by the lines of a
list value, and dropped when the list is empty.
"""

import re
from functools import lru_cache
from pathlib import Path
from typing import Union

from src.exceptions import TemplateError

TEMPLATE_DIR = Path(__file__).resolve().parent.parent / "templates"

_SCALAR = re.compile(r"\{(\w+)\}")
_LIST_LINE = re.compile(r"^\[(\w+)\]$")

Value = Union[str, list[str]]


class Template:
    def __init__(self, name: str, text: str):
        self.name = name
        self.text = text.rstrip("\n")

    def render(self, **values: Value) -> str:
        out: list[str] = []
        for line in self.text.split("\n"):
            list_match = _LIST_LINE.match(line.strip())
            if list_match:
                key = list_match.group(1)
                value = self._lookup(key, values)
                out.extend([value] if isinstance(value, str) else value)
                continue
            out.append(_SCALAR.sub(lambda m: self._scalar(m.group(1), values), line))
        return "\n".join(out)

    def _lookup(self, key: str, values: dict[str, Value]) -> Value:
        if key not in values:
            raise TemplateError(f"template {self.name}: no value for placeholder '{key}'")
        return values[key]

    def _scalar(self, key: str, values: dict[str, Value]) -> str:
        value = self._lookup(key, values)
        if not isinstance(value, str):
            raise TemplateError(f"template {self.name}: '{{{key}}}' needs text, got a list")
        return value


@lru_cache(maxsize=None)
def load_template(name: str) -> Template:
    path = TEMPLATE_DIR / f"{name}.txt"
    try:
        return Template(name, path.read_text(encoding="utf-8"))
    except OSError as e:
        raise TemplateError(f"missing template {name}: {e}") from e
