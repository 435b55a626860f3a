"""Inter-annotator agreement.

Fleiss' kappa for >= 2 raters on a fixed item set (the default unit of
analysis is per-(pair, class) binary presence: did this annotator use any
group of this class on this document), Cohen's kappa for rater pairs on
per-operation category presence. Degenerate inputs — where the expected
agreement is 1 and kappa is undefined — raise a typed error rather than
returning NaN, so callers can distinguish "no signal" from "no agreement".
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping, Sequence

from ..core import (
    AlignmentSequence,
    AnnotationRecord,
    EditCategory,
    EditClass,
    class_of,
)


class DegenerateRatingsError(ValueError):
    """All ratings fall in one category; chance agreement is 1 and kappa undefined."""


def fleiss_kappa(counts: Sequence[Sequence[int]]) -> float:
    """Fleiss' kappa from an items x categories count matrix.

    ``counts[i][j]`` is how many raters put item ``i`` in category ``j``;
    every row must sum to the same rater count n >= 2.
    """
    if not counts:
        raise ValueError("fleiss_kappa needs at least one item")
    n = sum(counts[0])
    if n < 2:
        raise ValueError(f"fleiss_kappa needs >= 2 raters per item, got {n}")
    big_n = len(counts)
    k = len(counts[0])
    p_item_sum = 0.0
    cat_totals = [0] * k
    for row in counts:
        if len(row) != k or sum(row) != n:
            raise ValueError("ragged count matrix: every item needs the same rater count")
        p_item_sum += (sum(c * c for c in row) - n) / (n * (n - 1))
        for j, c in enumerate(row):
            cat_totals[j] += c
    p_bar = p_item_sum / big_n
    p_e = sum((t / (big_n * n)) ** 2 for t in cat_totals)
    if 1.0 - p_e == 0.0:
        raise DegenerateRatingsError("all ratings identical: expected agreement is 1")
    return (p_bar - p_e) / (1.0 - p_e)


def cohen_kappa(a: Sequence[Hashable], b: Sequence[Hashable]) -> float:
    """Cohen's kappa between two raters' label sequences."""
    if len(a) != len(b):
        raise ValueError(f"rating sequences differ in length: {len(a)} vs {len(b)}")
    if not a:
        raise ValueError("cohen_kappa needs at least one item")
    n = len(a)
    labels = sorted(set(a) | set(b), key=repr)
    p_o = sum(1 for x, y in zip(a, b) if x == y) / n
    p_e = 0.0
    for lbl in labels:
        p_e += (sum(1 for x in a if x == lbl) / n) * (sum(1 for y in b if y == lbl) / n)
    if 1.0 - p_e == 0.0:
        raise DegenerateRatingsError("both raters constant and identical: kappa undefined")
    return (p_o - p_e) / (1.0 - p_e)


@dataclass(frozen=True, slots=True)
class AgreementReport:
    unit: str
    n_pairs_total: int
    n_pairs_multi: int
    rater_count: int
    n_items: int
    fleiss_per_class: Mapping[EditClass, float | None]
    fleiss_average: float | None
    cohen_per_category: Mapping[EditCategory, float | None]
    cohen_average: float | None

    def to_dict(self) -> dict:
        return {
            "unit": self.unit,
            "n_pairs_total": self.n_pairs_total,
            "n_pairs_multi": self.n_pairs_multi,
            "rater_count": self.rater_count,
            "n_items": self.n_items,
            "fleiss_per_class": {k.value: v for k, v in self.fleiss_per_class.items()},
            "fleiss_average": self.fleiss_average,
            "cohen_per_category": {k.value: v for k, v in self.cohen_per_category.items()},
            "cohen_average": self.cohen_average,
        }


def _by_pair(annotations: Iterable[AnnotationRecord]) -> dict[str, dict[str, AnnotationRecord]]:
    """pair_id -> annotator_id -> record (last record per annotator wins)."""
    out: dict[str, dict[str, AnnotationRecord]] = {}
    for rec in annotations:
        out.setdefault(rec.pair_id, {})[rec.annotator_id] = rec
    return out


def _classes_used(record: AnnotationRecord) -> set[EditClass]:
    return {class_of(g.category) for g in record.groups}


def _ops_of_class(record: AnnotationRecord, cls: EditClass) -> set[int]:
    ops: set[int] = set()
    for g in record.groups:
        if class_of(g.category) is cls:
            ops |= g.op_indices
    return ops


def _ops_of_category(record: AnnotationRecord, cat: EditCategory) -> set[int]:
    ops: set[int] = set()
    for g in record.groups:
        if g.category is cat:
            ops |= g.op_indices
    return ops


def build_agreement_report(
    annotations: Iterable[AnnotationRecord],
    seqs: Mapping[str, AlignmentSequence] | None = None,
    unit: str = "document",
) -> AgreementReport:
    """Agreement over multiply-annotated pairs.

    Fleiss' kappa per class needs a constant rater count per item, so pairs
    are stratified by how many annotators covered them and the largest
    stratum is used (its size and rater count are reported). Units:
    ``document`` scores class presence per pair, ``operation`` scores class
    presence per (pair, edit op) and needs ``seqs`` for the op universe.
    Classes or categories that come out degenerate are reported as None.
    """
    if unit not in ("document", "operation"):
        raise ValueError(f"unknown unit {unit!r}")
    if unit == "operation" and seqs is None:
        raise ValueError("unit='operation' needs alignment sequences")
    by_pair = _by_pair(annotations)
    multi = {pid: recs for pid, recs in by_pair.items() if len(recs) >= 2}

    # pick the dominant rater-count stratum for Fleiss
    strata: dict[int, list[str]] = {}
    for pid, recs in multi.items():
        strata.setdefault(len(recs), []).append(pid)
    if strata:
        rater_count, stratum = max(strata.items(), key=lambda kv: (len(kv[1]), kv[0]))
        stratum = sorted(stratum)
    else:
        rater_count, stratum = 0, []

    def items_for(pid: str) -> list[int] | list[None]:
        if unit == "document":
            return [None]
        seq = seqs.get(pid) if seqs else None
        if seq is None:
            raise KeyError(f"no sequence for multiply-annotated pair {pid!r}")
        return list(seq.edit_indices)

    fleiss_per_class: dict[EditClass, float | None] = {}
    n_items = 0
    for cls in EditClass:
        matrix: list[list[int]] = []
        for pid in stratum:
            recs = sorted(multi[pid].values(), key=lambda r: r.annotator_id)
            for item in items_for(pid):
                if unit == "document":
                    present = sum(1 for r in recs if cls in _classes_used(r))
                else:
                    present = sum(1 for r in recs if item in _ops_of_class(r, cls))
                matrix.append([rater_count - present, present])
        n_items = len(matrix)
        if not matrix:
            fleiss_per_class[cls] = None
            continue
        try:
            fleiss_per_class[cls] = fleiss_kappa(matrix)
        except DegenerateRatingsError:
            fleiss_per_class[cls] = None

    defined = [v for v in fleiss_per_class.values() if v is not None]
    fleiss_average = sum(defined) / len(defined) if defined else None

    # Cohen: pool per-operation category presence over all co-annotating rater
    # pairs (no equal-rater-count requirement here)
    cohen_per_category: dict[EditCategory, float | None] = {}
    pooled: dict[EditCategory, tuple[list[int], list[int]]] = {
        cat: ([], []) for cat in EditCategory
    }
    for pid in sorted(multi):
        recs = sorted(multi[pid].values(), key=lambda r: r.annotator_id)
        if seqs and pid in seqs:
            ops: Iterable[int] = seqs[pid].edit_indices
        else:
            union: set[int] = set()
            for r in recs:
                for g in r.groups:
                    union |= g.op_indices
            ops = sorted(union)
        for i in range(len(recs)):
            for j in range(i + 1, len(recs)):
                for cat in EditCategory:
                    a_ops = _ops_of_category(recs[i], cat)
                    b_ops = _ops_of_category(recs[j], cat)
                    for op in ops:
                        pooled[cat][0].append(1 if op in a_ops else 0)
                        pooled[cat][1].append(1 if op in b_ops else 0)
    for cat in EditCategory:
        a, b = pooled[cat]
        if not a:
            cohen_per_category[cat] = None
            continue
        try:
            cohen_per_category[cat] = cohen_kappa(a, b)
        except DegenerateRatingsError:
            cohen_per_category[cat] = None
    defined_c = [v for v in cohen_per_category.values() if v is not None]
    cohen_average = sum(defined_c) / len(defined_c) if defined_c else None

    return AgreementReport(
        unit=unit,
        n_pairs_total=len(by_pair),
        n_pairs_multi=len(multi),
        rater_count=rater_count,
        n_items=n_items,
        fleiss_per_class=fleiss_per_class,
        fleiss_average=fleiss_average,
        cohen_per_category=cohen_per_category,
        cohen_average=cohen_average,
    )
