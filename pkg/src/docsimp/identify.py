"""Turning alignment sequences into categorized edit groups.

Two stages: a *tagger* puts category tags on individual edit operations
(rule baseline here, classifier output loaded from file), and a *grouper*
merges tagged operations into edit groups. The begin/inside (BIC) codec is
the joint alternative: it encodes grouped annotations as per-op
``(flag, category)`` tags and decodes such tags back into groups.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .core import (
    AlignmentSequence,
    AnnotationRecord,
    EditCategory,
    EditGroup,
    OpKind,
    OpTag,
    TaggedOperations,
    category_sort_key,
)
from .align import canonicalize_ops

CONTIGUOUS = "contiguous"
GLOBAL = "global"


class RepresentabilityError(ValueError):
    """An annotation cannot be expressed in the BI scheme.

    Carries the offending category so callers can report which part of an
    annotation the codec refused.
    """

    def __init__(self, category: EditCategory, reason: str):
        self.category = category
        super().__init__(f"category {category.value}: {reason}")


class PredictionFormatError(ValueError):
    """A predictions file failed validation; message names line and field."""


# ---------------------------------------------------------------------------
# taggers

def op_majority(seq: AlignmentSequence) -> TaggedOperations:
    """Majority-class rule baseline: every delete op is tagged
    semantic_deletion, every insert op lexical."""
    tags: dict[int, tuple[OpTag, ...]] = {}
    for op in seq.operations:
        if op.kind is OpKind.DELETE:
            tags[op.index] = (OpTag(EditCategory.SEMANTIC_DELETION),)
        elif op.kind is OpKind.INSERT:
            tags[op.index] = (OpTag(EditCategory.LEXICAL),)
    return TaggedOperations(pair_id=seq.pair_id, tags=tags)


# ---------------------------------------------------------------------------
# groupers

def _ordered_tagged(tags: TaggedOperations, category: EditCategory) -> list[int]:
    return [i for i in tags.tagged_indices() if category in tags.categories_for(i)]


def _categories_present(tags: TaggedOperations) -> list[EditCategory]:
    seen: set[EditCategory] = set()
    for idx in tags.tagged_indices():
        seen.update(tags.categories_for(idx))
    return sorted(seen, key=category_sort_key)


def group_single(tags: TaggedOperations) -> list[EditGroup]:
    """Every (op, category) tag becomes its own singleton group."""
    groups: list[EditGroup] = []
    for idx in tags.tagged_indices():
        for tag in tags.tags[idx]:
            groups.append(EditGroup(tag.category, frozenset({idx})))
    return groups


def group_adjacent(tags: TaggedOperations, seq: AlignmentSequence) -> list[EditGroup]:
    """Merge maximal runs of position-consecutive ops sharing a category.

    Consecutive means adjacent in the operation sequence itself, so any
    intervening op — keep or edit — breaks a run.
    """
    edit_set = set(seq.edit_indices)
    for idx in tags.tagged_indices():
        if idx not in edit_set:
            raise ValueError(f"pair {seq.pair_id}: tagged op {idx} is not an edit op")
    groups: list[tuple[int, EditGroup]] = []
    for category in _categories_present(tags):
        ops = _ordered_tagged(tags, category)
        run: list[int] = []
        for idx in ops:
            if run and idx == run[-1] + 1:
                run.append(idx)
            else:
                if run:
                    groups.append((run[0], EditGroup(category, frozenset(run))))
                run = [idx]
        if run:
            groups.append((run[0], EditGroup(category, frozenset(run))))
    groups.sort(key=lambda g: (g[0], category_sort_key(g[1].category)))
    return [g for _, g in groups]


def group_uncategorized_adjacent(seq: AlignmentSequence) -> list[frozenset[int]]:
    """Maximal runs of adjacent edit ops, ignoring categories entirely."""
    runs: list[frozenset[int]] = []
    current: list[int] = []
    for op in seq.operations:
        if op.is_edit:
            current.append(op.index)
        elif current:
            runs.append(frozenset(current))
            current = []
    if current:
        runs.append(frozenset(current))
    return runs


def _is_contiguous_in_edit_order(group: EditGroup, seq: AlignmentSequence) -> bool:
    """True when no *edit* op outside the group falls between its members.

    Keeps in between do not break contiguity; an intervening edit op does.
    """
    edit_order = {idx: rank for rank, idx in enumerate(seq.edit_indices)}
    try:
        ranks = sorted(edit_order[i] for i in group.op_indices)
    except KeyError as e:
        raise ValueError(f"group references non-edit op {e.args[0]}") from None
    return ranks[-1] - ranks[0] + 1 == len(ranks)


@dataclass(frozen=True)
class CategoryModeTable:
    """Per-category grouping mode: contiguous runs vs one global group."""

    modes: Mapping[EditCategory, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        complete = {cat: CONTIGUOUS for cat in EditCategory}
        for cat, mode in self.modes.items():
            if mode not in (CONTIGUOUS, GLOBAL):
                raise ValueError(f"unknown mode {mode!r} for {cat.value}")
            complete[cat] = mode
        object.__setattr__(self, "modes", complete)

    def mode_for(self, category: EditCategory) -> str:
        return self.modes[category]

    def to_json(self) -> dict[str, str]:
        return {cat.value: self.modes[cat] for cat in EditCategory}

    @classmethod
    def from_json(cls, data: Mapping[str, str]) -> "CategoryModeTable":
        return cls({EditCategory(k): v for k, v in data.items()})


def derive_category_modes(
    annotations: Iterable[AnnotationRecord],
    seqs: Mapping[str, AlignmentSequence],
) -> CategoryModeTable:
    """Learn each category's dominant grouping shape from annotations.

    A category is ``contiguous`` when strictly more than half of its
    observed groups are contiguous in edit-op order, else ``global``.
    Categories never observed default to contiguous.
    """
    contiguous: dict[EditCategory, int] = {}
    total: dict[EditCategory, int] = {}
    for record in annotations:
        seq = seqs.get(record.pair_id)
        if seq is None:
            raise KeyError(f"no sequence for annotated pair {record.pair_id!r}")
        for group in record.groups:
            total[group.category] = total.get(group.category, 0) + 1
            if _is_contiguous_in_edit_order(group, seq):
                contiguous[group.category] = contiguous.get(group.category, 0) + 1
    modes = {
        cat: (CONTIGUOUS if 2 * contiguous.get(cat, 0) > n else GLOBAL)
        for cat, n in total.items()
    }
    return CategoryModeTable(modes)


def group_rules(
    tags: TaggedOperations,
    seq: AlignmentSequence,
    modes: CategoryModeTable,
) -> list[EditGroup]:
    """Group per category according to its learned mode."""
    groups: list[EditGroup] = []
    adjacent = group_adjacent(tags, seq)
    for category in _categories_present(tags):
        if modes.mode_for(category) == GLOBAL:
            groups.append(EditGroup(category, frozenset(_ordered_tagged(tags, category))))
        else:
            groups.extend(g for g in adjacent if g.category is category)
    groups.sort(key=lambda g: (min(g.op_indices), category_sort_key(g.category)))
    return groups


GROUPERS = ("single", "adjacent", "rules")


# ---------------------------------------------------------------------------
# begin/inside codec

def encode_bic(record: AnnotationRecord, seq: AlignmentSequence) -> TaggedOperations:
    """Encode grouped annotations as per-op B/I flags, one per category.

    Representable iff, per category, groups are pairwise disjoint and each
    occupies a consecutive stretch of that category's ops (ops of *other*
    categories may interleave freely). The first op of each group gets B,
    the rest I. Raises :class:`RepresentabilityError` otherwise.
    """
    edit_set = set(seq.edit_indices)
    by_cat: dict[EditCategory, list[EditGroup]] = {}
    for group in record.groups:
        for idx in group.op_indices:
            if idx not in edit_set:
                raise ValueError(f"pair {record.pair_id}: group op {idx} is not an edit op")
        by_cat.setdefault(group.category, []).append(group)

    flags: dict[int, dict[EditCategory, str]] = {}
    for category, groups in by_cat.items():
        claimed: set[int] = set()
        for group in groups:
            if claimed & group.op_indices:
                raise RepresentabilityError(category, "overlapping groups of one category")
            claimed |= group.op_indices
        cat_ops = sorted(claimed)
        rank = {idx: r for r, idx in enumerate(cat_ops)}
        for group in sorted(groups, key=lambda g: min(g.op_indices)):
            ranks = sorted(rank[i] for i in group.op_indices)
            if ranks[-1] - ranks[0] + 1 != len(ranks):
                raise RepresentabilityError(
                    category, "group is not contiguous within the category's ops"
                )
            ordered = group.sorted_ops
            flags.setdefault(ordered[0], {})[category] = "B"
            for idx in ordered[1:]:
                flags.setdefault(idx, {})[category] = "I"

    tags = {
        idx: tuple(
            OpTag(cat, flag=cat_flags[cat])
            for cat in sorted(cat_flags, key=category_sort_key)
        )
        for idx, cat_flags in sorted(flags.items())
    }
    return TaggedOperations(pair_id=record.pair_id, tags=tags)


def decode_bic(tags: TaggedOperations, seq: AlignmentSequence) -> list[EditGroup]:
    """Decode B/I tags back into groups.

    Walks each category's tagged ops in sequence order; B starts a group, I
    extends the open one. Lenient on a leading I (it opens a group). Tags
    lacking both a flag and probabilities are an error — this codec cannot
    segment without them.
    """
    edit_set = set(seq.edit_indices)
    groups: list[tuple[int, EditGroup]] = []
    for category in _categories_present(tags):
        current: list[int] = []
        for idx in _ordered_tagged(tags, category):
            if idx not in edit_set:
                raise ValueError(f"pair {seq.pair_id}: tagged op {idx} is not an edit op")
            tag = next(t for t in tags.tags[idx] if t.category is category)
            flag = tag.resolved_flag()
            if flag is None:
                raise ValueError(
                    f"pair {seq.pair_id}: op {idx} tag {category.value} has no B/I information"
                )
            if flag == "B" and current:
                groups.append((current[0], EditGroup(category, frozenset(current))))
                current = []
            current.append(idx)
        if current:
            groups.append((current[0], EditGroup(category, frozenset(current))))
    groups.sort(key=lambda g: (g[0], category_sort_key(g[1].category)))
    return [g for _, g in groups]


# ---------------------------------------------------------------------------
# adjusted sequences

def build_adjusted_sequence(
    seq: AlignmentSequence, keep_ops: Iterable[int]
) -> AlignmentSequence:
    """Rebuild the sequence as if only ``keep_ops`` had been edited.

    Every other edit op is reverted: deletes turn back into keeps, inserts
    vanish. The result is canonical and reconstructs the same source
    document; its target shows only the chosen ops' effect. Used to isolate
    one group's edit for per-group scoring or cleaning.
    """
    chosen = set(keep_ops)
    edit_set = set(seq.edit_indices)
    bad = chosen - edit_set
    if bad:
        raise ValueError(f"pair {seq.pair_id}: ops {sorted(bad)} are not edit ops")
    raw: list[tuple[OpKind, Sequence[str]]] = []
    for op in seq.operations:
        if op.kind is OpKind.KEEP or op.index in chosen:
            raw.append((op.kind, op.tokens))
        elif op.kind is OpKind.DELETE:
            raw.append((OpKind.KEEP, op.tokens))
        # reverted inserts are dropped
    return AlignmentSequence(pair_id=seq.pair_id, operations=canonicalize_ops(raw))


# ---------------------------------------------------------------------------
# classifier predictions

def load_predictions(
    path,
    seqs: Mapping[str, AlignmentSequence],
) -> dict[str, TaggedOperations]:
    """Read per-op category predictions (JSONL) and validate against sequences.

    Each line: ``{"pair_id", "op_index", "category"}`` plus optional
    ``"p_b"``/``"p_i"`` for BI-bearing schemes. Unknown pairs, non-edit ops,
    unknown categories and duplicate (pair, op, category) rows raise
    :class:`PredictionFormatError` naming the line.
    """
    staged: dict[str, dict[int, list[OpTag]]] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as e:
                raise PredictionFormatError(f"line {lineno}: not valid JSON ({e})") from None
            if not isinstance(row, dict):
                raise PredictionFormatError(f"line {lineno}: expected an object")
            for fld in ("pair_id", "op_index", "category"):
                if fld not in row:
                    raise PredictionFormatError(f"line {lineno}: missing field {fld!r}")
            pair_id = row["pair_id"]
            seq = seqs.get(pair_id)
            if seq is None:
                raise PredictionFormatError(f"line {lineno}: unknown pair_id {pair_id!r}")
            op_index = row["op_index"]
            if not isinstance(op_index, int) or op_index not in set(seq.edit_indices):
                raise PredictionFormatError(
                    f"line {lineno}: op_index {op_index!r} is not an edit op of {pair_id!r}"
                )
            try:
                category = EditCategory(row["category"])
            except ValueError:
                raise PredictionFormatError(
                    f"line {lineno}: unknown category {row['category']!r}"
                ) from None
            p_b, p_i = row.get("p_b"), row.get("p_i")
            if (p_b is None) != (p_i is None):
                raise PredictionFormatError(
                    f"line {lineno}: p_b and p_i must be given together"
                )
            try:
                tag = OpTag(category, p_b=p_b, p_i=p_i)
            except ValueError as e:
                raise PredictionFormatError(f"line {lineno}: {e}") from None
            op_tags = staged.setdefault(pair_id, {}).setdefault(op_index, [])
            if any(t.category is category for t in op_tags):
                raise PredictionFormatError(
                    f"line {lineno}: duplicate prediction for pair {pair_id!r} "
                    f"op {op_index} category {category.value}"
                )
            op_tags.append(tag)

    out: dict[str, TaggedOperations] = {}
    for pair_id, per_op in staged.items():
        tags = {
            idx: tuple(sorted(tag_list, key=lambda t: category_sort_key(t.category)))
            for idx, tag_list in per_op.items()
        }
        out[pair_id] = TaggedOperations(pair_id=pair_id, tags=tags)
    return out


# ---------------------------------------------------------------------------
# named pipelines

PIPELINES = (
    "op-majority+single",
    "op-majority+adjacent",
    "op-majority+rules",
    "external+single",
    "external+adjacent",
    "external+rules",
    "external-bic",
)


def run_pipeline(
    pipeline: str,
    seq: AlignmentSequence,
    predictions: Mapping[str, TaggedOperations] | None = None,
    modes: CategoryModeTable | None = None,
) -> tuple[TaggedOperations, list[EditGroup]]:
    """Run a named tagger+grouper combination on one sequence.

    External pipelines read tags for the pair from ``predictions`` (missing
    pair -> no tags, no groups). Rules-based grouping needs ``modes``.
    """
    if pipeline not in PIPELINES:
        raise ValueError(f"unknown pipeline {pipeline!r}; known: {', '.join(PIPELINES)}")
    if pipeline.startswith("op-majority"):
        tags = op_majority(seq)
    else:
        predictions = predictions or {}
        tags = predictions.get(seq.pair_id, TaggedOperations(pair_id=seq.pair_id, tags={}))
    if pipeline == "external-bic":
        return tags, decode_bic(tags, seq)
    grouper = pipeline.split("+", 1)[1]
    if grouper == "single":
        return tags, group_single(tags)
    if grouper == "adjacent":
        return tags, group_adjacent(tags, seq)
    if modes is None:
        raise ValueError("rules grouper needs a category mode table")
    return tags, group_rules(tags, seq, modes)
