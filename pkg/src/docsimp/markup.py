"""Inline markup codec for alignment sequences.

Plain form wraps edit spans in ``<INS>``/``<DEL>`` tags::

    The Mariinsky Theater is a <INS>very famous</INS> <DEL>historic</DEL> theater

Tagged form replaces the opening tag of a categorized edit op with one or
more ``<flag;category>`` tags (flag is B or I); closing tags stay
``</INS>``/``</DEL>`` so the operation kind remains readable::

    ... is a <B;lexical>very famous</INS> <I;lexical>historic</DEL> theater ...

Both directions are bit-exact inverses on canonical sequences, which is why
these strings double as the corpus file representation.
"""
from __future__ import annotations

import re

from .core import (
    AlignmentSequence,
    EditCategory,
    EditOperation,
    OpKind,
    OpTag,
    PairMismatchError,
    TaggedOperations,
    category_sort_key,
)
from .align import canonicalize_ops

INS_OPEN = "<INS>"
INS_CLOSE = "</INS>"
DEL_OPEN = "<DEL>"
DEL_CLOSE = "</DEL>"

_PLAIN_LITERALS = (INS_OPEN, INS_CLOSE, DEL_OPEN, DEL_CLOSE)
_FLAG_TAG_RE = re.compile(r"<([BI]);([a-z_]+)>")


class MarkupParseError(ValueError):
    """Malformed markup. ``offset`` is the character position when known."""

    def __init__(self, message: str, offset: int | None = None):
        self.offset = offset
        if offset is not None:
            message = f"{message} (at offset {offset})"
        super().__init__(message)


def _check_serializable(op: EditOperation) -> None:
    for tok in op.tokens:
        if any(lit in tok for lit in _PLAIN_LITERALS):
            raise ValueError(
                f"op {op.index}: token {tok!r} contains a markup tag literal and cannot be serialised"
            )


def serialize_markup(seq: AlignmentSequence) -> str:
    """Render a sequence as plain inline markup."""
    parts: list[str] = []
    for op in seq.operations:
        _check_serializable(op)
        body = " ".join(op.tokens)
        if op.kind is OpKind.KEEP:
            parts.append(body)
        elif op.kind is OpKind.INSERT:
            parts.append(f"{INS_OPEN}{body}{INS_CLOSE}")
        else:
            parts.append(f"{DEL_OPEN}{body}{DEL_CLOSE}")
    return " ".join(parts)


def _find_plain_tag(s: str, pos: int) -> tuple[int, str] | None:
    """Next position where one of the four tag literals starts, or None."""
    i = s.find("<", pos)
    while i != -1:
        for lit in _PLAIN_LITERALS:
            if s.startswith(lit, i):
                return i, lit
        i = s.find("<", i + 1)
    return None


def parse_markup(s: str, pair_id: str = "") -> AlignmentSequence:
    """Parse plain markup back into a canonical sequence.

    Lenient about adjacent same-kind spans (they merge), strict about tag
    structure: stray closers, unclosed or nested tags, and empty edit spans
    all raise :class:`MarkupParseError` with a character offset.
    """
    raw: list[tuple[OpKind, list[str]]] = []
    pos = 0
    while True:
        hit = _find_plain_tag(s, pos)
        if hit is None:
            raw.append((OpKind.KEEP, s[pos:].split()))
            break
        i, lit = hit
        raw.append((OpKind.KEEP, s[pos:i].split()))
        if lit in (INS_CLOSE, DEL_CLOSE):
            raise MarkupParseError(f"unexpected {lit}", i)
        kind = OpKind.INSERT if lit == INS_OPEN else OpKind.DELETE
        closer = INS_CLOSE if lit == INS_OPEN else DEL_CLOSE
        nxt = _find_plain_tag(s, i + len(lit))
        if nxt is None:
            raise MarkupParseError(f"unclosed {lit}", i)
        j, lit2 = nxt
        if lit2 != closer:
            raise MarkupParseError(f"expected {closer} to close {lit}, found {lit2}", j)
        tokens = s[i + len(lit) : j].split()
        if not tokens:
            raise MarkupParseError("empty edit span", i)
        raw.append((kind, tokens))
        pos = j + len(closer)
    return AlignmentSequence(pair_id=pair_id, operations=canonicalize_ops(raw))


def serialize_tagged_markup(seq: AlignmentSequence, tags: TaggedOperations) -> str:
    """Render a sequence with BI category tags on the tagged edit ops.

    Untagged edit ops keep their plain ``<INS>``/``<DEL>`` opening tag.
    Every tag must resolve to a B or I flag (explicitly or via
    probabilities); multi-category ops emit adjacent opening tags in
    taxonomy order.
    """
    if tags.pair_id != seq.pair_id:
        raise PairMismatchError(
            f"tags are for pair {tags.pair_id!r} but sequence is {seq.pair_id!r}"
        )
    edit_set = set(seq.edit_indices)
    for idx in tags.tags:
        if idx not in edit_set:
            raise ValueError(f"op {idx} is tagged but is not an edit op of the sequence")
    parts: list[str] = []
    for op in seq.operations:
        _check_serializable(op)
        body = " ".join(op.tokens)
        if op.kind is OpKind.KEEP:
            parts.append(body)
            continue
        closer = INS_CLOSE if op.kind is OpKind.INSERT else DEL_CLOSE
        op_tags = tags.tags.get(op.index, ())
        if not op_tags:
            opener = INS_OPEN if op.kind is OpKind.INSERT else DEL_OPEN
        else:
            pieces = []
            for t in sorted(op_tags, key=lambda t: category_sort_key(t.category)):
                flag = t.resolved_flag()
                if flag is None:
                    raise ValueError(
                        f"op {op.index}: tag {t.category.value} has neither flag nor probabilities"
                    )
                pieces.append(f"<{flag};{t.category.value}>")
            opener = "".join(pieces)
        parts.append(f"{opener}{body}{closer}")
    return " ".join(parts)


def _find_any_tag(s: str, pos: int):
    """Next (offset, plain_literal_or_None, flag_match_or_None) from pos."""
    i = s.find("<", pos)
    while i != -1:
        for lit in _PLAIN_LITERALS:
            if s.startswith(lit, i):
                return i, lit, None
        m = _FLAG_TAG_RE.match(s, i)
        if m:
            return i, None, m
        i = s.find("<", i + 1)
    return None, None, None


def parse_tagged_markup(s: str, pair_id: str = "") -> tuple[AlignmentSequence, TaggedOperations]:
    """Parse tagged markup into its sequence plus per-op tags.

    The operation kind of a tagged span comes from its closing tag. Unknown
    categories, duplicate categories on one op, and structural problems
    raise :class:`MarkupParseError`.
    """
    raw_ops: list[tuple[OpKind, list[str], tuple[OpTag, ...] | None]] = []
    pos = 0
    while True:
        i, lit, m = _find_any_tag(s, pos)
        if i is None:
            raw_ops.append((OpKind.KEEP, s[pos:].split(), None))
            break
        raw_ops.append((OpKind.KEEP, s[pos:i].split(), None))
        if lit in (INS_CLOSE, DEL_CLOSE):
            raise MarkupParseError(f"unexpected {lit}", i)
        if lit is not None:  # plain untagged edit span
            kind = OpKind.INSERT if lit == INS_OPEN else OpKind.DELETE
            closer = INS_CLOSE if lit == INS_OPEN else DEL_CLOSE
            j, lit2, m2 = _find_any_tag(s, i + len(lit))
            if j is None or lit2 is None:
                raise MarkupParseError(f"unclosed {lit}", i)
            if lit2 != closer:
                raise MarkupParseError(f"expected {closer} to close {lit}, found tag", j)
            tokens = s[i + len(lit) : j].split()
            if not tokens:
                raise MarkupParseError("empty edit span", i)
            raw_ops.append((kind, tokens, None))
            pos = j + len(closer)
            continue
        # run of one or more <flag;category> opening tags
        tags: list[OpTag] = []
        cursor = i
        while (fm := _FLAG_TAG_RE.match(s, cursor)) is not None:
            cat_name = fm.group(2)
            try:
                cat = EditCategory(cat_name)
            except ValueError:
                raise MarkupParseError(f"unknown category {cat_name!r}", fm.start(2)) from None
            if any(t.category is cat for t in tags):
                raise MarkupParseError(f"duplicate category {cat_name!r} on one op", fm.start(2))
            tags.append(OpTag(cat, flag=fm.group(1)))
            cursor = fm.end()
        j, lit2, m2 = _find_any_tag(s, cursor)
        if j is None or lit2 not in (INS_CLOSE, DEL_CLOSE):
            raise MarkupParseError("tagged span is not closed by </INS> or </DEL>", i)
        tokens = s[cursor:j].split()
        if not tokens:
            raise MarkupParseError("empty edit span", i)
        kind = OpKind.INSERT if lit2 == INS_CLOSE else OpKind.DELETE
        raw_ops.append((kind, tokens, tuple(tags)))
        pos = j + len(lit2)

    ops: list[EditOperation] = []
    tag_map: dict[int, tuple[OpTag, ...]] = {}
    for kind, tokens, op_tags in raw_ops:
        if not tokens:
            continue
        idx = len(ops)
        ops.append(EditOperation(index=idx, kind=kind, tokens=tuple(tokens)))
        if op_tags:
            tag_map[idx] = op_tags
    try:
        seq = AlignmentSequence(pair_id=pair_id, operations=tuple(ops))
    except ValueError as e:
        raise MarkupParseError(str(e)) from None
    return seq, TaggedOperations(pair_id=pair_id, tags=tag_map)
