"""Scoring predicted edit groups against reference annotations.

Operation-level scores treat each edit op as a multi-label instance (an op
can belong to groups of several categories); per-category F1 is combined
into a support-weighted mean, where support is the number of reference
occurrences and zero-support categories are left out. Group-level scores
ask, for every reference group, whether some predicted group of the same
category matches it exactly or partially (Jaccard >= 0.5 on op indices).
All percentages are on a 0-100 scale.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Hashable, Mapping, Sequence

from ..core import EditCategory, EditClass, EditGroup, TaggedOperations, class_of, tags_from_groups

GroupsByPair = Mapping[str, Sequence[EditGroup]]
TagsByPair = Mapping[str, TaggedOperations]


def _label_counts(
    pred: TagsByPair,
    ref: TagsByPair,
    project: Callable[[EditCategory], Hashable],
) -> dict[Hashable, list[int]]:
    """Per-label [tp, fp, fn] over all (pair, op) instances."""
    counts: dict[Hashable, list[int]] = {}

    def bucket(label: Hashable) -> list[int]:
        return counts.setdefault(label, [0, 0, 0])

    for pair_id in sorted(set(pred) | set(ref)):
        p = pred.get(pair_id)
        r = ref.get(pair_id)
        ops = set(p.tags if p else ()) | set(r.tags if r else ())
        for idx in ops:
            p_labels = {project(c) for c in (p.categories_for(idx) if p else set())}
            r_labels = {project(c) for c in (r.categories_for(idx) if r else set())}
            for lbl in p_labels & r_labels:
                bucket(lbl)[0] += 1
            for lbl in p_labels - r_labels:
                bucket(lbl)[1] += 1
            for lbl in r_labels - p_labels:
                bucket(lbl)[2] += 1
    return counts


def _f1(tp: int, fp: int, fn: int) -> float:
    denom = 2 * tp + fp + fn
    return 2 * tp / denom if denom else 0.0


def _weighted_f1(counts: Mapping[Hashable, list[int]]) -> float:
    total_support = sum(tp + fn for tp, _, fn in counts.values())
    if total_support == 0:
        # nothing to find: perfect only if nothing was (wrongly) predicted
        return 100.0 if all(fp == 0 for _, fp, _ in counts.values()) else 0.0
    acc = 0.0
    for tp, fp, fn in counts.values():
        support = tp + fn
        if support:
            acc += support * _f1(tp, fp, fn)
    return 100.0 * acc / total_support


def category_f1(pred: TagsByPair, ref: TagsByPair) -> float:
    """Support-weighted mean of per-category F1 over (pair, op) instances."""
    return _weighted_f1(_label_counts(pred, ref, lambda c: c))


def class_f1(pred: TagsByPair, ref: TagsByPair) -> float:
    """Same as :func:`category_f1` after projecting categories to classes."""
    return _weighted_f1(_label_counts(pred, ref, class_of))


def _jaccard_at_least_half(a: frozenset[int], b: frozenset[int]) -> bool:
    # |a & b| / |a | b| >= 0.5, in exact integer arithmetic
    return 2 * len(a & b) >= len(a | b)


def _group_match_pct(
    pred: GroupsByPair,
    ref: GroupsByPair,
    matches: Callable[[EditGroup, EditGroup], bool],
) -> float:
    total = hit = 0
    for pair_id in sorted(set(pred) | set(ref)):
        p_groups = list(pred.get(pair_id, ()))
        for rg in ref.get(pair_id, ()):
            total += 1
            if any(pg.category is rg.category and matches(pg, rg) for pg in p_groups):
                hit += 1
    if total == 0:
        return 100.0  # no reference group was missed
    return 100.0 * hit / total


def group_exact_pct(pred: GroupsByPair, ref: GroupsByPair) -> float:
    """Share of reference groups reproduced exactly (category + op set)."""
    return _group_match_pct(pred, ref, lambda pg, rg: pg.op_indices == rg.op_indices)


def group_partial_pct(pred: GroupsByPair, ref: GroupsByPair) -> float:
    """Share of reference groups matched by category with op-set Jaccard >= 0.5."""
    return _group_match_pct(
        pred, ref, lambda pg, rg: _jaccard_at_least_half(pg.op_indices, rg.op_indices)
    )


@dataclass(frozen=True, slots=True)
class CategoryRow:
    category: EditCategory
    f1: float
    support: int
    n_ref_groups: int
    exact_pct: float
    partial_pct: float


@dataclass(frozen=True, slots=True)
class IdentificationReport:
    """Aggregate + per-category identification scores for one system."""

    category_f1: float
    class_f1: float
    exact_pct: float
    partial_pct: float
    rows: tuple[CategoryRow, ...]
    n_pairs: int
    n_pred_groups: int
    n_ref_groups: int

    def to_dict(self) -> dict:
        return {
            "category_f1": self.category_f1,
            "class_f1": self.class_f1,
            "exact_pct": self.exact_pct,
            "partial_pct": self.partial_pct,
            "n_pairs": self.n_pairs,
            "n_pred_groups": self.n_pred_groups,
            "n_ref_groups": self.n_ref_groups,
            "per_category": [
                {
                    "category": row.category.value,
                    "f1": row.f1,
                    "support": row.support,
                    "n_ref_groups": row.n_ref_groups,
                    "exact_pct": row.exact_pct,
                    "partial_pct": row.partial_pct,
                }
                for row in self.rows
            ],
        }


def build_identification_report(pred: GroupsByPair, ref: GroupsByPair) -> IdentificationReport:
    """Score predicted groups against reference groups, per pair_id.

    Operation tags are derived from the groups on both sides, so this is the
    one entry point for the full table: op-level F1s plus group-level
    exact/partial percentages, overall and per category.
    """
    pred_tags = {pid: tags_from_groups(pid, groups) for pid, groups in pred.items()}
    ref_tags = {pid: tags_from_groups(pid, groups) for pid, groups in ref.items()}
    counts = _label_counts(pred_tags, ref_tags, lambda c: c)

    rows = []
    for cat in EditCategory:
        tp, fp, fn = counts.get(cat, (0, 0, 0))
        ref_cat = {
            pid: [g for g in groups if g.category is cat] for pid, groups in ref.items()
        }
        pred_cat = {
            pid: [g for g in groups if g.category is cat] for pid, groups in pred.items()
        }
        n_ref = sum(len(v) for v in ref_cat.values())
        if tp + fp + fn == 0 and n_ref == 0:
            continue  # category entirely absent on both sides
        rows.append(
            CategoryRow(
                category=cat,
                f1=100.0 * _f1(tp, fp, fn),
                support=tp + fn,
                n_ref_groups=n_ref,
                exact_pct=group_exact_pct(pred_cat, ref_cat),
                partial_pct=group_partial_pct(pred_cat, ref_cat),
            )
        )

    return IdentificationReport(
        category_f1=_weighted_f1(counts),
        class_f1=class_f1(pred_tags, ref_tags),
        exact_pct=group_exact_pct(pred, ref),
        partial_pct=group_partial_pct(pred, ref),
        rows=tuple(rows),
        n_pairs=len(set(pred) | set(ref)),
        n_pred_groups=sum(len(v) for v in pred.values()),
        n_ref_groups=sum(len(v) for v in ref.values()),
    )
