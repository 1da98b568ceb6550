"""Structured run reports and their renderings.

A Report is a plain-data record of one CLI invocation: command name, package
version, seed, UTC timestamp, an echo of the inputs, a results mapping, and
a list of named warnings.  Everything stored is JSON-plain (str, int, float,
bool, None, list, dict), so serialize/parse round-trips exactly.

Floats are rounded to 12 significant digits when the report is built, not at
render time, so every output format and the machine-readable form agree.
Infinities become the strings "inf"/"-inf" (JSON has no literal for them).

Results may carry a "tables" entry: a list of {"title", "columns", "rows"}
mappings that the markdown and csv renderers lay out as actual tables.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Optional

from . import __version__
from .errors import ParseError


def clean_value(value):
    """Normalize a value tree to JSON-plain data with 12-significant-digit floats."""
    if isinstance(value, bool) or value is None or isinstance(value, (str, int)):
        return value
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        if math.isnan(value):
            return "nan"
        return float(format(value, ".12g"))
    if isinstance(value, dict):
        return {str(k): clean_value(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [clean_value(v) for v in value]
    # numpy scalars and arrays land here
    if hasattr(value, "tolist"):
        return clean_value(value.tolist())
    if hasattr(value, "item"):
        return clean_value(value.item())
    raise TypeError(f"cannot put {type(value).__name__} into a report")


@dataclass(frozen=True)
class Report:
    command: str
    version: str
    seed: Optional[int]
    timestamp: str
    inputs: dict
    results: dict
    warnings: list = field(default_factory=list)


def new_report(
    command: str,
    *,
    seed: Optional[int] = None,
    inputs: Optional[dict] = None,
    results: Optional[dict] = None,
    warnings=(),
) -> Report:
    warn_list = []
    for w in warnings:
        if isinstance(w, dict):
            name, message = w.get("name"), w.get("message")
        else:
            name, message = w  # (name, message) pairs
        warn_list.append({"name": str(name), "message": str(message)})
    return Report(
        command=command,
        version=__version__,
        seed=seed,
        timestamp=datetime.now(timezone.utc).isoformat(timespec="seconds"),
        inputs=clean_value(inputs or {}),
        results=clean_value(results or {}),
        warnings=warn_list,
    )


def serialize_report(report: Report) -> str:
    doc = {
        "command": report.command,
        "version": report.version,
        "seed": report.seed,
        "timestamp": report.timestamp,
        "inputs": report.inputs,
        "results": report.results,
        "warnings": report.warnings,
    }
    return json.dumps(doc, indent=2) + "\n"


def parse_report(text: str) -> Report:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid report JSON: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ParseError("report must be a JSON object")
    missing = {"command", "version", "seed", "timestamp", "inputs", "results", "warnings"} - set(doc)
    if missing:
        raise ParseError(f"report is missing fields: {sorted(missing)}")
    if not isinstance(doc["inputs"], dict) or not isinstance(doc["results"], dict):
        raise ParseError("report fields 'inputs' and 'results' must be objects")
    if not isinstance(doc["warnings"], list):
        raise ParseError("report field 'warnings' must be an array")
    return Report(
        command=str(doc["command"]),
        version=str(doc["version"]),
        seed=doc["seed"],
        timestamp=str(doc["timestamp"]),
        inputs=doc["inputs"],
        results=doc["results"],
        warnings=doc["warnings"],
    )


def _fmt(value) -> str:
    if isinstance(value, float):
        return format(value, ".12g")
    if isinstance(value, list):
        return "[" + ", ".join(_fmt(v) for v in value) + "]"
    return str(value)


def _split_tables(results: dict):
    tables = results.get("tables", [])
    scalars = {k: v for k, v in results.items() if k != "tables"}
    return scalars, tables


def render_markdown(report: Report) -> str:
    out = [f"# {report.command}", ""]
    out.append(f"- version: {report.version}")
    if report.seed is not None:
        out.append(f"- seed: {report.seed}")
    out.append(f"- timestamp: {report.timestamp}")
    for key, value in report.inputs.items():
        out.append(f"- {key}: {_fmt(value)}")
    out.append("")
    scalars, tables = _split_tables(report.results)
    if scalars:
        out.append("## Results")
        out.append("")
        for key, value in scalars.items():
            out.append(f"- {key}: {_fmt(value)}")
        out.append("")
    for table in tables:
        out.append(f"## {table.get('title', 'Table')}")
        out.append("")
        cols = [str(c) for c in table.get("columns", [])]
        out.append("| " + " | ".join(cols) + " |")
        out.append("|" + "|".join(" --- " for _ in cols) + "|")
        for row in table.get("rows", []):
            out.append("| " + " | ".join(_fmt(v) for v in row) + " |")
        out.append("")
    if report.warnings:
        out.append("## Warnings")
        out.append("")
        for w in report.warnings:
            out.append(f"- **{w.get('name', 'warning')}**: {w.get('message', '')}")
        out.append("")
    return "\n".join(out)


def render_csv(report: Report) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["command", report.command])
    writer.writerow(["version", report.version])
    writer.writerow(["seed", "" if report.seed is None else report.seed])
    writer.writerow(["timestamp", report.timestamp])
    for key, value in report.inputs.items():
        writer.writerow([key, _fmt(value)])
    scalars, tables = _split_tables(report.results)
    for key, value in scalars.items():
        writer.writerow([key, _fmt(value)])
    for table in tables:
        writer.writerow([])
        writer.writerow(["table", table.get("title", "")])
        writer.writerow([str(c) for c in table.get("columns", [])])
        for row in table.get("rows", []):
            writer.writerow([_fmt(v) for v in row])
    for w in report.warnings:
        writer.writerow(["warning", w.get("name", ""), w.get("message", "")])
    return buf.getvalue()


def render(report: Report, fmt: str) -> str:
    if fmt == "structured":
        return serialize_report(report)
    if fmt == "markdown":
        return render_markdown(report)
    if fmt == "csv":
        return render_csv(report)
    raise ValueError(f"unknown report format {fmt!r}")
