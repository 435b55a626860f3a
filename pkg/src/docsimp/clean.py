"""Corpus cleaning: undo selected edits so the simple side stays faithful.

Reverting an edit op restores the source reading (deleted spans come back,
inserted spans disappear). An op is reverted only when it is covered by at
least one group *and* every group containing it passes the filter — an op
shared with a group we want to keep must stay, or that edit would be
half-undone. Uncovered ops are left alone and counted.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

from .core import AlignmentSequence, EditGroup, OpKind, class_of, EditClass
from .align import canonicalize_ops, reconstruct_target

logger = logging.getLogger(__name__)

#: Decides whether a group's edit should be *reverted* (True = undo it).
GroupFilter = Callable[[EditGroup], bool]


def non_simplification_filter(group: EditGroup) -> bool:
    """The standard cleaning filter: undo everything non-simplifying."""
    return class_of(group.category) is EditClass.NON_SIMPLIFICATION


def revert_plan(
    seq: AlignmentSequence,
    groups: Sequence[EditGroup],
    revert_filter: GroupFilter,
) -> tuple[set[int], set[int]]:
    """(ops to revert, uncovered edit ops) for a sequence and its groups."""
    edit_set = set(seq.edit_indices)
    covered: set[int] = set()
    protected: set[int] = set()
    revertable: set[int] = set()
    for group in groups:
        bad = group.op_indices - edit_set
        if bad:
            raise ValueError(f"pair {seq.pair_id}: group ops {sorted(bad)} are not edit ops")
        covered |= group.op_indices
        if revert_filter(group):
            revertable |= group.op_indices
        else:
            protected |= group.op_indices
    return revertable - protected, edit_set - covered


def revert_groups(
    seq: AlignmentSequence,
    groups: Sequence[EditGroup],
    revert_filter: GroupFilter,
) -> str:
    """New simple text with the filtered groups' edits undone."""
    to_revert, uncovered = revert_plan(seq, groups, revert_filter)
    if uncovered:
        logger.warning(
            "pair %s: %d edit op(s) not covered by any group were left untouched",
            seq.pair_id,
            len(uncovered),
        )
    raw = []
    for op in seq.operations:
        if op.index in to_revert:
            if op.kind is OpKind.DELETE:
                raw.append((OpKind.KEEP, op.tokens))
            # reverted insert disappears
        else:
            raw.append((op.kind, op.tokens))
    reverted = AlignmentSequence(pair_id=seq.pair_id, operations=canonicalize_ops(raw))
    return reconstruct_target(reverted)


@dataclass(frozen=True, slots=True)
class CleanStats:
    n_pairs: int
    n_cleaned: int
    n_passthrough: int
    n_reverted_ops: int
    n_uncovered_ops: int

    def to_dict(self) -> dict:
        return {
            "n_pairs": self.n_pairs,
            "n_cleaned": self.n_cleaned,
            "n_passthrough": self.n_passthrough,
            "n_reverted_ops": self.n_reverted_ops,
            "n_uncovered_ops": self.n_uncovered_ops,
        }


def clean_corpus(
    seqs: Iterable[AlignmentSequence],
    groups_by_pair: Mapping[str, Sequence[EditGroup]],
    revert_filter: GroupFilter = non_simplification_filter,
) -> tuple[dict[str, str], CleanStats]:
    """Clean every pair's simple text; pairs without groups pass through.

    Returns ``pair_id -> cleaned simple text`` plus counts. Grouping can
    come from gold annotations or from a silver identification pipeline —
    anything that yields :class:`EditGroup` lists.
    """
    cleaned: dict[str, str] = {}
    n_pairs = n_cleaned = n_pass = n_rev = n_unc = 0
    for seq in seqs:
        n_pairs += 1
        groups = groups_by_pair.get(seq.pair_id)
        if not groups:
            cleaned[seq.pair_id] = reconstruct_target(seq)
            n_pass += 1
            continue
        to_revert, uncovered = revert_plan(seq, groups, revert_filter)
        n_rev += len(to_revert)
        n_unc += len(uncovered)
        cleaned[seq.pair_id] = revert_groups(seq, groups, revert_filter)
        n_cleaned += 1
    return cleaned, CleanStats(
        n_pairs=n_pairs,
        n_cleaned=n_cleaned,
        n_passthrough=n_pass,
        n_reverted_ops=n_rev,
        n_uncovered_ops=n_unc,
    )
