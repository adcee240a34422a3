"""CSV/JSON 输出与错误行格式化工具。

stdout 只承载结果（JSON 或 CSV），错误以单行 JSON 写到 stderr。
"""
import json
import sys
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Any, Optional

from pydantic import BaseModel

from digraph_perf.core.config import settings


def format_number(value: Any, digits: Optional[int] = None) -> str:
    """Scientific notation with ``digits`` significant digits; ints and bools as-is."""
    digits = digits or settings.CSV_DIGITS
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    return f"{float(value):.{digits - 1}e}"


def format_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    """Header line plus one line per row, no quoting (all fields are numeric)."""
    lines = [",".join(header)]
    lines.extend(",".join(format_number(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def format_json(model: BaseModel) -> str:
    return model.model_dump_json(indent=2) + "\n"


def format_error(error: dict[str, Any]) -> str:
    """One-line JSON error record."""
    return json.dumps(error, ensure_ascii=False)


def write_output(text: str, out: Optional[Path] = None) -> None:
    if out is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text, encoding="utf-8")


def print_error(error: dict[str, Any]) -> None:
    print(format_error(error), file=sys.stderr)
