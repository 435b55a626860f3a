"""Descriptive statistics over an annotated corpus.

Per-category: group counts, share of documents touched, mean ops per group,
and the insert-only / delete-only / mixed composition of groups. Corpus
level: groups-per-document and distinct-simplification-classes-per-document
distributions, plus how often a group's edits span multiple sentences of
the complex document.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping

from ..core import (
    AlignmentSequence,
    AnnotationRecord,
    EditCategory,
    OpKind,
    SIMPLIFICATION_CLASSES,
    class_of,
)

_TERMINAL = set(".!?")


def _is_terminal(token: str) -> bool:
    return bool(token) and set(token) <= _TERMINAL


def op_sentence_ids(seq: AlignmentSequence) -> dict[int, frozenset[int]]:
    """Map each op to the complex-document sentence ids it touches.

    Sentences are counted on the source (keep + delete) token stream, with a
    boundary after every terminal-punctuation token. Insert ops carry no
    source tokens; they are attributed to the sentence of the nearest
    preceding source token (sentence 0 at the very start).
    """
    out: dict[int, frozenset[int]] = {}
    sentence = 0
    last_source_sentence = 0
    for op in seq.operations:
        if op.kind is OpKind.INSERT:
            out[op.index] = frozenset({last_source_sentence})
            continue
        touched = set()
        for tok in op.tokens:
            touched.add(sentence)
            last_source_sentence = sentence
            if _is_terminal(tok):
                sentence += 1
        out[op.index] = frozenset(touched)
    return out


@dataclass(frozen=True, slots=True)
class MultiSentenceRates:
    overall_pct: float
    per_category_pct: Mapping[EditCategory, float]
    n_groups: int

    def to_dict(self) -> dict:
        return {
            "overall_pct": self.overall_pct,
            "per_category_pct": {c.value: v for c, v in self.per_category_pct.items()},
            "n_groups": self.n_groups,
        }


def multi_sentence_rate(
    annotations: Iterable[AnnotationRecord],
    seqs: Mapping[str, AlignmentSequence],
) -> MultiSentenceRates:
    """Share of groups whose ops touch more than one complex-doc sentence."""
    total: Counter = Counter()
    multi: Counter = Counter()
    n_groups = 0
    sentence_cache: dict[str, dict[int, frozenset[int]]] = {}
    for rec in annotations:
        if rec.unaligned_flag:
            continue
        seq = seqs.get(rec.pair_id)
        if seq is None:
            raise KeyError(f"no sequence for annotated pair {rec.pair_id!r}")
        ids = sentence_cache.setdefault(rec.pair_id, op_sentence_ids(seq))
        for group in rec.groups:
            n_groups += 1
            touched: set[int] = set()
            for idx in group.op_indices:
                touched |= ids[idx]
            total[group.category] += 1
            if len(touched) > 1:
                multi[group.category] += 1
    per_cat = {
        cat: 100.0 * multi[cat] / total[cat] for cat in total
    }
    overall = 100.0 * sum(multi.values()) / n_groups if n_groups else 0.0
    return MultiSentenceRates(
        overall_pct=overall,
        per_category_pct=per_cat,
        n_groups=n_groups,
    )


@dataclass(frozen=True, slots=True)
class CategoryStats:
    category: EditCategory
    n_groups: int
    pct_docs: float
    mean_ops: float
    pct_insert_only: float
    pct_delete_only: float
    pct_mixed: float


@dataclass(frozen=True, slots=True)
class CorpusStats:
    rows: tuple[CategoryStats, ...]
    n_records: int
    n_flagged: int
    n_groups: int
    mean_groups_per_doc: float
    groups_per_doc: Mapping[int, int]
    distinct_classes_per_doc: Mapping[int, int]

    def to_dict(self) -> dict:
        return {
            "n_records": self.n_records,
            "n_flagged": self.n_flagged,
            "n_groups": self.n_groups,
            "mean_groups_per_doc": self.mean_groups_per_doc,
            "groups_per_doc": {str(k): v for k, v in sorted(self.groups_per_doc.items())},
            "distinct_classes_per_doc": {
                str(k): v for k, v in sorted(self.distinct_classes_per_doc.items())
            },
            "per_category": [
                {
                    "category": r.category.value,
                    "n_groups": r.n_groups,
                    "pct_docs": r.pct_docs,
                    "mean_ops": r.mean_ops,
                    "pct_insert_only": r.pct_insert_only,
                    "pct_delete_only": r.pct_delete_only,
                    "pct_mixed": r.pct_mixed,
                }
                for r in self.rows
            ],
        }


def corpus_stats(
    annotations: Iterable[AnnotationRecord],
    seqs: Mapping[str, AlignmentSequence],
) -> CorpusStats:
    """Summarise an annotation set the way the taxonomy table reads.

    Every non-flagged record counts as one annotated document (a pair
    annotated twice contributes twice). Flagged-unaligned records are only
    counted, not described.
    """
    n_records = 0
    n_flagged = 0
    n_groups_cat: Counter = Counter()
    docs_with: dict[EditCategory, int] = Counter()
    ops_per_group: dict[EditCategory, list[int]] = {}
    kinds: dict[EditCategory, Counter] = {}
    groups_per_doc: Counter = Counter()
    classes_per_doc: Counter = Counter()

    for rec in annotations:
        if rec.unaligned_flag:
            n_flagged += 1
            continue
        seq = seqs.get(rec.pair_id)
        if seq is None:
            raise KeyError(f"no sequence for annotated pair {rec.pair_id!r}")
        n_records += 1
        groups_per_doc[len(rec.groups)] += 1
        cls_set = {class_of(g.category) for g in rec.groups}
        classes_per_doc[len(cls_set & set(SIMPLIFICATION_CLASSES))] += 1
        seen_cats: set[EditCategory] = set()
        for group in rec.groups:
            cat = group.category
            seen_cats.add(cat)
            n_groups_cat[cat] += 1
            ops_per_group.setdefault(cat, []).append(len(group.op_indices))
            has_ins = any(
                seq.operations[i].kind is OpKind.INSERT for i in group.op_indices
            )
            has_del = any(
                seq.operations[i].kind is OpKind.DELETE for i in group.op_indices
            )
            bucket = kinds.setdefault(cat, Counter())
            if has_ins and has_del:
                bucket["mixed"] += 1
            elif has_ins:
                bucket["insert"] += 1
            else:
                bucket["delete"] += 1
        for cat in seen_cats:
            docs_with[cat] += 1

    rows = []
    for cat in EditCategory:
        n = n_groups_cat.get(cat, 0)
        if n == 0:
            continue
        sizes = ops_per_group[cat]
        bucket = kinds[cat]
        rows.append(
            CategoryStats(
                category=cat,
                n_groups=n,
                pct_docs=100.0 * docs_with[cat] / n_records if n_records else 0.0,
                mean_ops=sum(sizes) / len(sizes),
                pct_insert_only=100.0 * bucket["insert"] / n,
                pct_delete_only=100.0 * bucket["delete"] / n,
                pct_mixed=100.0 * bucket["mixed"] / n,
            )
        )
    total_groups = sum(n_groups_cat.values())
    return CorpusStats(
        rows=tuple(rows),
        n_records=n_records,
        n_flagged=n_flagged,
        n_groups=total_groups,
        mean_groups_per_doc=total_groups / n_records if n_records else 0.0,
        groups_per_doc=dict(groups_per_doc),
        distinct_classes_per_doc=dict(classes_per_doc),
    )
