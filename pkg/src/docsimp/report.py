"""Render report objects as JSON, aligned-column text, or CSV.

Every report dataclass in this package exposes ``to_dict()``; the renderers
here work off that dict so new report types need no extra wiring.  JSON is
the machine format (full precision, sorted keys); text is for terminals;
CSV emits the per-category table for plotting, or key/value rows when a
report has no table.
"""

from __future__ import annotations

import csv
import io
import json
from typing import Any, Mapping

FORMATS = ("json", "text", "csv")

# keys holding a list-of-dicts table inside a report dict
_TABLE_KEYS = ("per_category", "per_class", "rows")


def _as_dict(report: Any) -> dict:
    if isinstance(report, Mapping):
        return dict(report)
    to_dict = getattr(report, "to_dict", None)
    if callable(to_dict):
        return to_dict()
    raise TypeError(f"cannot render {type(report).__name__}: no to_dict()")


def _fmt(value: Any) -> str:
    if value is None:
        return "-"
    if isinstance(value, bool):
        return str(value)
    if isinstance(value, float):
        return f"{value:.2f}"
    return str(value)


def _split(d: Mapping[str, Any]) -> tuple[dict, list[tuple[str, list[dict]]], list[tuple[str, dict]]]:
    """Partition a report dict into scalars, tables, and nested mappings."""
    scalars: dict[str, Any] = {}
    tables: list[tuple[str, list[dict]]] = []
    nested: list[tuple[str, dict]] = []
    for key, value in d.items():
        if isinstance(value, list) and value and all(isinstance(r, Mapping) for r in value):
            tables.append((key, [dict(r) for r in value]))
        elif isinstance(value, Mapping):
            nested.append((key, dict(value)))
        elif isinstance(value, list):
            scalars[key] = ", ".join(_fmt(v) for v in value) if value else "-"
        else:
            scalars[key] = value
    return scalars, tables, nested


def _render_table(rows: list[dict]) -> list[str]:
    headers = list(rows[0].keys())
    cells = [[_fmt(r.get(h)) for h in headers] for r in rows]
    widths = [
        max(len(h), *(len(row[i]) for row in cells)) for i, h in enumerate(headers)
    ]
    lines = [
        "  ".join(h.ljust(w) for h, w in zip(headers, widths)).rstrip(),
        "  ".join("-" * w for w in widths),
    ]
    for row in cells:
        lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
    return lines


def render_text(report: Any) -> str:
    d = _as_dict(report)
    scalars, tables, nested = _split(d)
    lines: list[str] = []
    if scalars:
        width = max(len(k) for k in scalars)
        for key, value in scalars.items():
            lines.append(f"{key.ljust(width)}  {_fmt(value)}")
    for key, mapping in nested:
        lines.append("")
        lines.append(f"{key}:")
        if mapping:
            width = max(len(str(k)) for k in mapping)
            for k, v in mapping.items():
                lines.append(f"  {str(k).ljust(width)}  {_fmt(v)}")
        else:
            lines.append("  (empty)")
    for key, rows in tables:
        lines.append("")
        lines.append(f"{key}:")
        lines.extend(_render_table(rows))
    return "\n".join(lines) + "\n"


def render_csv(report: Any) -> str:
    """CSV of the report's main table; key/value rows if it has none."""
    d = _as_dict(report)
    _, tables, _ = _split(d)
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    for key in _TABLE_KEYS:
        rows = next((r for k, r in tables if k == key), None)
        if rows:
            headers = list(rows[0].keys())
            writer.writerow(headers)
            for row in rows:
                writer.writerow([row.get(h, "") for h in headers])
            return out.getvalue()
    writer.writerow(["key", "value"])
    for key, value in d.items():
        if not isinstance(value, (list, Mapping)):
            writer.writerow([key, "" if value is None else value])
    return out.getvalue()


def render_json(report: Any) -> str:
    return json.dumps(_as_dict(report), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def render_report(report: Any, fmt: str = "json") -> str:
    if fmt == "json":
        return render_json(report)
    if fmt == "text":
        return render_text(report)
    if fmt == "csv":
        return render_csv(report)
    raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")
