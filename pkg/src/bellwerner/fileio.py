"""Structured-text (JSON) loading and saving of expressions and pure states.

Expression documents: {"parties": m, "terms": [{"pattern": "...", "coeff": x}]}
with patterns over {_, 0, 1}.  State documents: {"parties": m, "amplitudes":
[{"index": "<m bits>", "re": x, "im": y}]}; omitted indices are zero.

Structural problems (malformed JSON, missing or mistyped fields, bad
patterns) raise ParseError with a field path; domain problems a well-formed
document can still have (for states, a non-unit norm) keep their ValueError
so callers can distinguish the two.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Union

from .errors import ParseError
from .expressions import BellExpression, new_expression
from .werner import PureFamily

PathLike = Union[str, Path]


def _require_dict(doc, what: str) -> dict:
    if not isinstance(doc, dict):
        raise ParseError(f"{what} must be an object, got {type(doc).__name__}")
    return doc


def _require_parties(doc: dict, what: str) -> int:
    parties = doc.get("parties")
    if isinstance(parties, bool) or not isinstance(parties, int):
        raise ParseError(f"{what}: field 'parties' must be an integer")
    if parties < 1:
        raise ParseError(f"{what}: field 'parties' must be at least 1")
    return parties


def _require_number(entry: dict, key: str, where: str) -> float:
    value = entry.get(key)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError(f"{where}: field {key!r} must be a number")
    value = float(value)
    if not math.isfinite(value):
        raise ParseError(f"{where}: field {key!r} must be finite")
    return value


def expression_from_document(doc) -> BellExpression:
    doc = _require_dict(doc, "expression document")
    parties = _require_parties(doc, "expression document")
    terms = doc.get("terms")
    if not isinstance(terms, list) or not terms:
        raise ParseError("expression document: field 'terms' must be a non-empty array")
    pairs = []
    for idx, entry in enumerate(terms):
        where = f"terms[{idx}]"
        if not isinstance(entry, dict):
            raise ParseError(f"{where}: must be an object")
        pattern = entry.get("pattern")
        if not isinstance(pattern, str):
            raise ParseError(f"{where}: field 'pattern' must be a string")
        coeff = _require_number(entry, "coeff", where)
        pairs.append((pattern, coeff))
    try:
        return new_expression(parties, pairs)
    except ValueError as exc:
        raise ParseError(f"expression document: {exc}") from exc


def expression_to_document(expr: BellExpression) -> dict:
    return {
        "parties": expr.parties,
        "terms": [
            {"pattern": pattern, "coeff": coeff} for pattern, coeff in expr.terms()
        ],
    }


def load_expression(path: PathLike) -> BellExpression:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read expression file {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"expression file {path}: invalid JSON at line {exc.lineno}, "
            f"column {exc.colno}: {exc.msg}"
        ) from exc
    return expression_from_document(doc)


def save_expression(expr: BellExpression, path: PathLike) -> None:
    Path(path).write_text(json.dumps(expression_to_document(expr), indent=2) + "\n")


def state_from_document(doc) -> PureFamily:
    doc = _require_dict(doc, "state document")
    parties = _require_parties(doc, "state document")
    entries = doc.get("amplitudes")
    if not isinstance(entries, list) or not entries:
        raise ParseError("state document: field 'amplitudes' must be a non-empty array")
    vec = [0j] * (2 ** parties)
    seen = set()
    for idx, entry in enumerate(entries):
        where = f"amplitudes[{idx}]"
        if not isinstance(entry, dict):
            raise ParseError(f"{where}: must be an object")
        index = entry.get("index")
        if not isinstance(index, str) or len(index) != parties or set(index) - {"0", "1"}:
            raise ParseError(
                f"{where}: field 'index' must be a bit string of length {parties}"
            )
        if index in seen:
            raise ParseError(f"{where}: duplicate index {index!r}")
        seen.add(index)
        re = _require_number(entry, "re", where)
        im = _require_number(entry, "im", where) if "im" in entry else 0.0
        vec[int(index, 2)] = complex(re, im)
    return PureFamily(vec)  # non-unit norm raises ValueError, by design


def state_to_document(family: PureFamily) -> dict:
    parties = family.parties
    entries = []
    for idx, amp in enumerate(family.amplitudes):
        if amp == 0:
            continue
        entries.append(
            {
                "index": format(idx, f"0{parties}b"),
                "re": float(amp.real),
                "im": float(amp.imag),
            }
        )
    return {"parties": parties, "amplitudes": entries}


def load_state(path: PathLike) -> PureFamily:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read state file {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"state file {path}: invalid JSON at line {exc.lineno}, "
            f"column {exc.colno}: {exc.msg}"
        ) from exc
    return state_from_document(doc)


def save_state(family: PureFamily, path: PathLike) -> None:
    Path(path).write_text(json.dumps(state_to_document(family), indent=2) + "\n")
