"""Line-delimited JSON file formats for pairs, revisions, sequences,
annotations, scores and labels.

Every reader validates as it goes and fails with the line number and field
name; every writer emits canonical JSON (sorted keys, compact separators,
UTF-8, one record per line) so that re-serialising parsed records is
byte-stable and files diff cleanly.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Sequence

from .core import (
    AlignmentSequence,
    AnnotationRecord,
    DocumentRevision,
    EditCategory,
    EditGroup,
)
from .markup import parse_markup, serialize_markup
from .match import ScoredPair, revision_pair_id


class SchemaError(ValueError):
    """A corpus file record failed validation; message has line and field."""


def format_timestamp(ts: datetime) -> str:
    """UTC ISO-8601 with a Z suffix, second resolution."""
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def parse_timestamp(raw: str, lineno: int | None = None) -> datetime:
    try:
        return datetime.fromisoformat(raw.replace("Z", "+00:00")).astimezone(timezone.utc)
    except ValueError:
        where = f"line {lineno}: " if lineno is not None else ""
        raise SchemaError(f"{where}bad timestamp {raw!r}") from None


def dumps_canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def read_jsonl(path: str | Path) -> Iterator[tuple[int, dict]]:
    """Yield (lineno, record) for every non-blank line; records must be objects."""
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as e:
                raise SchemaError(f"line {lineno}: not valid JSON ({e.msg})") from None
            if not isinstance(obj, dict):
                raise SchemaError(f"line {lineno}: expected a JSON object")
            yield lineno, obj


def write_jsonl(path: str | Path, records: Iterable[dict]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(dumps_canonical(rec))
            fh.write("\n")


def _require(obj: dict, fld: str, lineno: int, kind: type | tuple[type, ...] | None = None):
    if fld not in obj:
        raise SchemaError(f"line {lineno}: missing field {fld!r}")
    value = obj[fld]
    if kind is not None and not isinstance(value, kind):
        raise SchemaError(f"line {lineno}: field {fld!r} has wrong type {type(value).__name__}")
    return value


# ---------------------------------------------------------------------------
# revisions

def revision_to_dict(rev: DocumentRevision) -> dict:
    return {
        "page_id": rev.page_id,
        "revision_id": rev.revision_id,
        "timestamp": format_timestamp(rev.timestamp),
        "title": rev.title,
        "text": rev.text,
        "source_wiki": rev.source_wiki,
    }


def revision_from_dict(obj: dict, lineno: int = 0) -> DocumentRevision:
    rev = DocumentRevision(
        page_id=_require(obj, "page_id", lineno, int),
        revision_id=_require(obj, "revision_id", lineno, int),
        timestamp=parse_timestamp(_require(obj, "timestamp", lineno, str), lineno),
        title=_require(obj, "title", lineno, str),
        text=_require(obj, "text", lineno, str),
        source_wiki=_require(obj, "source_wiki", lineno, str),
    )
    return rev


def read_revisions(path: str | Path) -> list[DocumentRevision]:
    out = []
    for lineno, obj in read_jsonl(path):
        try:
            out.append(revision_from_dict(obj, lineno))
        except ValueError as e:
            if isinstance(e, SchemaError):
                raise
            raise SchemaError(f"line {lineno}: {e}") from None
    return out


def write_revisions(path: str | Path, revisions: Iterable[DocumentRevision]) -> None:
    write_jsonl(path, (revision_to_dict(r) for r in revisions))


# ---------------------------------------------------------------------------
# document pairs

@dataclass(frozen=True, slots=True)
class PairRecord:
    """One complex/simple document pair ready for alignment."""

    pair_id: str
    complex: DocumentRevision
    simple: DocumentRevision
    split: str | None = None


def pair_to_dict(pair: PairRecord) -> dict:
    obj = {
        "pair_id": pair.pair_id,
        "complex": revision_to_dict(pair.complex),
        "simple": revision_to_dict(pair.simple),
    }
    if pair.split is not None:
        obj["split"] = pair.split
    return obj


def read_pairs(path: str | Path) -> list[PairRecord]:
    out = []
    seen: set[str] = set()
    for lineno, obj in read_jsonl(path):
        pair_id = _require(obj, "pair_id", lineno, str)
        if pair_id in seen:
            raise SchemaError(f"line {lineno}: duplicate pair_id {pair_id!r}")
        seen.add(pair_id)
        split = obj.get("split")
        if split is not None and not isinstance(split, str):
            raise SchemaError(f"line {lineno}: field 'split' has wrong type")
        try:
            complex_rev = revision_from_dict(_require(obj, "complex", lineno, dict), lineno)
            simple_rev = revision_from_dict(_require(obj, "simple", lineno, dict), lineno)
        except ValueError as e:
            if isinstance(e, SchemaError):
                raise
            raise SchemaError(f"line {lineno}: {e}") from None
        out.append(PairRecord(pair_id=pair_id, complex=complex_rev, simple=simple_rev, split=split))
    return out


def write_pairs(path: str | Path, pairs: Iterable[PairRecord]) -> None:
    write_jsonl(path, (pair_to_dict(p) for p in pairs))


# ---------------------------------------------------------------------------
# alignment sequences (markup is the wire format)

def read_sequences(path: str | Path) -> dict[str, AlignmentSequence]:
    out: dict[str, AlignmentSequence] = {}
    for lineno, obj in read_jsonl(path):
        pair_id = _require(obj, "pair_id", lineno, str)
        if pair_id in out:
            raise SchemaError(f"line {lineno}: duplicate pair_id {pair_id!r}")
        markup = _require(obj, "markup", lineno, str)
        try:
            out[pair_id] = parse_markup(markup, pair_id=pair_id)
        except ValueError as e:
            raise SchemaError(f"line {lineno}: bad markup: {e}") from None
    return out


def write_sequences(path: str | Path, seqs: Iterable[AlignmentSequence]) -> None:
    write_jsonl(
        path,
        ({"pair_id": s.pair_id, "markup": serialize_markup(s)} for s in seqs),
    )


# ---------------------------------------------------------------------------
# annotations

def annotation_to_dict(rec: AnnotationRecord) -> dict:
    obj: dict = {
        "pair_id": rec.pair_id,
        "annotator_id": rec.annotator_id,
        "unaligned_flag": rec.unaligned_flag,
        "groups": [
            {"category": g.category.value, "op_indices": list(g.sorted_ops)}
            for g in rec.groups
        ],
    }
    if rec.completed_at is not None:
        obj["completed_at"] = format_timestamp(rec.completed_at)
    return obj


def annotation_from_dict(obj: dict, lineno: int = 0) -> AnnotationRecord:
    groups = []
    raw_groups = _require(obj, "groups", lineno, list)
    for g_no, g in enumerate(raw_groups):
        if not isinstance(g, dict):
            raise SchemaError(f"line {lineno}: group {g_no} is not an object")
        cat_raw = _require(g, "category", lineno, str)
        try:
            category = EditCategory(cat_raw)
        except ValueError:
            raise SchemaError(f"line {lineno}: group {g_no}: unknown category {cat_raw!r}") from None
        ops = _require(g, "op_indices", lineno, list)
        if not ops or not all(isinstance(i, int) and i >= 0 for i in ops):
            raise SchemaError(
                f"line {lineno}: group {g_no}: op_indices must be a non-empty list of ints >= 0"
            )
        if len(set(ops)) != len(ops):
            raise SchemaError(f"line {lineno}: group {g_no}: duplicate op index")
        groups.append(EditGroup(category=category, op_indices=frozenset(ops)))
    completed_raw = obj.get("completed_at")
    completed = parse_timestamp(completed_raw, lineno) if completed_raw is not None else None
    flag = obj.get("unaligned_flag", False)
    if not isinstance(flag, bool):
        raise SchemaError(f"line {lineno}: field 'unaligned_flag' has wrong type")
    return AnnotationRecord(
        pair_id=_require(obj, "pair_id", lineno, str),
        annotator_id=_require(obj, "annotator_id", lineno, str),
        groups=tuple(groups),
        unaligned_flag=flag,
        completed_at=completed,
    )


def read_annotations(path: str | Path) -> list[AnnotationRecord]:
    return [annotation_from_dict(obj, lineno) for lineno, obj in read_jsonl(path)]


def write_annotations(path: str | Path, records: Iterable[AnnotationRecord]) -> None:
    write_jsonl(path, (annotation_to_dict(r) for r in records))


# ---------------------------------------------------------------------------
# scores, labels, candidate texts

def read_scores(path: str | Path) -> dict[str, float]:
    """External scorer output: one ``{"pair_id", "score"}`` object per line."""
    out: dict[str, float] = {}
    for lineno, obj in read_jsonl(path):
        pair_id = _require(obj, "pair_id", lineno, str)
        if pair_id in out:
            raise SchemaError(f"line {lineno}: duplicate pair_id {pair_id!r}")
        score = _require(obj, "score", lineno, (int, float))
        if isinstance(score, bool):
            raise SchemaError(f"line {lineno}: field 'score' has wrong type bool")
        out[pair_id] = float(score)
    return out


def read_labels(path: str | Path) -> dict[str, str]:
    """Gold alignment labels: ``{"pair_id", "label"}``, label aligned|unaligned."""
    out: dict[str, str] = {}
    for lineno, obj in read_jsonl(path):
        pair_id = _require(obj, "pair_id", lineno, str)
        if pair_id in out:
            raise SchemaError(f"line {lineno}: duplicate pair_id {pair_id!r}")
        label = _require(obj, "label", lineno, str)
        if label not in ("aligned", "unaligned"):
            raise SchemaError(f"line {lineno}: label must be 'aligned' or 'unaligned'")
        out[pair_id] = label
    return out


def read_candidates(path: str | Path) -> dict[str, str]:
    """Model outputs for generation scoring: ``{"pair_id", "text"}`` per line."""
    out: dict[str, str] = {}
    for lineno, obj in read_jsonl(path):
        pair_id = _require(obj, "pair_id", lineno, str)
        if pair_id in out:
            raise SchemaError(f"line {lineno}: duplicate pair_id {pair_id!r}")
        out[pair_id] = _require(obj, "text", lineno, str)
    return out


def write_matches(path: str | Path, matches: Iterable[ScoredPair]) -> None:
    def rows():
        for m in matches:
            yield {
                "pair_id": revision_pair_id(m.sew_rev, m.ew_rev),
                "scorer_id": m.scorer_id,
                "score": m.score,
                "sew": revision_to_dict(m.sew_rev),
                "ew": revision_to_dict(m.ew_rev),
            }

    write_jsonl(path, rows())
