"""Domain types shared across the toolkit.

The taxonomy (19 edit categories in 5 classes), alignment operations, edit
groups, annotation records, and the per-operation tag container all live here
so that every other module agrees on one vocabulary.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from datetime import datetime
from typing import Iterable, Mapping


class OpKind(enum.Enum):
    KEEP = "keep"
    INSERT = "insert"
    DELETE = "delete"


class EditClass(str, enum.Enum):
    LEXICAL = "lexical"
    SYNTACTIC = "syntactic"
    DISCOURSE = "discourse"
    SEMANTIC = "semantic"
    NON_SIMPLIFICATION = "non_simplification"


class EditCategory(str, enum.Enum):
    # lexical
    LEXICAL = "lexical"
    LEXICAL_ENTITY = "lexical_entity"
    # syntactic
    SENTENCE_SPLIT = "sentence_split"
    SENTENCE_FUSION = "sentence_fusion"
    SYNTACTIC_DELETION = "syntactic_deletion"
    SYNTACTIC_GENERIC = "syntactic_generic"
    # discourse
    REORDERING = "reordering"
    ANAPHORA_RESOLUTION = "anaphora_resolution"
    ANAPHORA_INSERTION = "anaphora_insertion"
    # semantic
    ELABORATION_BACKGROUND = "elaboration_background"
    ELABORATION_EXAMPLE = "elaboration_example"
    ELABORATION_GENERIC = "elaboration_generic"
    SEMANTIC_DELETION = "semantic_deletion"
    SPECIFIC_TO_GENERAL = "specific_to_general"
    # non-simplification
    FORMAT = "format"
    NOISE_DELETION = "noise_deletion"
    FACT_CORRECTION = "fact_correction"
    EXTRANEOUS_INFORMATION = "extraneous_information"
    MISCELLANEOUS = "miscellaneous"


_CLASS_OF: dict[EditCategory, EditClass] = {
    EditCategory.LEXICAL: EditClass.LEXICAL,
    EditCategory.LEXICAL_ENTITY: EditClass.LEXICAL,
    EditCategory.SENTENCE_SPLIT: EditClass.SYNTACTIC,
    EditCategory.SENTENCE_FUSION: EditClass.SYNTACTIC,
    EditCategory.SYNTACTIC_DELETION: EditClass.SYNTACTIC,
    EditCategory.SYNTACTIC_GENERIC: EditClass.SYNTACTIC,
    EditCategory.REORDERING: EditClass.DISCOURSE,
    EditCategory.ANAPHORA_RESOLUTION: EditClass.DISCOURSE,
    EditCategory.ANAPHORA_INSERTION: EditClass.DISCOURSE,
    EditCategory.ELABORATION_BACKGROUND: EditClass.SEMANTIC,
    EditCategory.ELABORATION_EXAMPLE: EditClass.SEMANTIC,
    EditCategory.ELABORATION_GENERIC: EditClass.SEMANTIC,
    EditCategory.SEMANTIC_DELETION: EditClass.SEMANTIC,
    EditCategory.SPECIFIC_TO_GENERAL: EditClass.SEMANTIC,
    EditCategory.FORMAT: EditClass.NON_SIMPLIFICATION,
    EditCategory.NOISE_DELETION: EditClass.NON_SIMPLIFICATION,
    EditCategory.FACT_CORRECTION: EditClass.NON_SIMPLIFICATION,
    EditCategory.EXTRANEOUS_INFORMATION: EditClass.NON_SIMPLIFICATION,
    EditCategory.MISCELLANEOUS: EditClass.NON_SIMPLIFICATION,
}

#: Declaration order of the taxonomy; used wherever a stable category order
#: is needed (reports, multi-tag markup, the taxonomy endpoint).
CATEGORY_ORDER: tuple[EditCategory, ...] = tuple(EditCategory)

#: The four classes that constitute actual simplification (everything but
#: non_simplification).
SIMPLIFICATION_CLASSES: tuple[EditClass, ...] = (
    EditClass.LEXICAL,
    EditClass.SYNTACTIC,
    EditClass.DISCOURSE,
    EditClass.SEMANTIC,
)


def class_of(category: EditCategory) -> EditClass:
    """Map a category to its class. Total over all 19 categories."""
    return _CLASS_OF[category]


@dataclass(frozen=True, slots=True)
class CategoryInfo:
    """Human-facing description of one taxonomy entry."""

    category: EditCategory
    edit_class: EditClass
    definition: str
    example: str


TAXONOMY: tuple[CategoryInfo, ...] = tuple(
    CategoryInfo(cat, _CLASS_OF[cat], definition, example)
    for cat, definition, example in [
        (
            EditCategory.LEXICAL,
            "A word or short phrase is swapped for a simpler wording with the same meaning.",
            "a historic theater -> a very famous theater",
        ),
        (
            EditCategory.LEXICAL_ENTITY,
            "A proper name or other entity mention is rewritten in a different surface form.",
            "William Henry Gates III -> Bill Gates",
        ),
        (
            EditCategory.SENTENCE_SPLIT,
            "One long sentence is broken into two or more shorter sentences.",
            "He ran , and she followed . -> He ran . She followed .",
        ),
        (
            EditCategory.SENTENCE_FUSION,
            "Two or more sentences are merged into a single sentence.",
            "He ran . She followed . -> He ran and she followed .",
        ),
        (
            EditCategory.SYNTACTIC_DELETION,
            "Grammatical structure or function words are dropped without removing content.",
            "the house , which was empty -> the empty house",
        ),
        (
            EditCategory.SYNTACTIC_GENERIC,
            "Any other grammatical rewrite, such as a voice or tense change.",
            "the ball was thrown by Sam -> Sam threw the ball",
        ),
        (
            EditCategory.REORDERING,
            "Content moves to a different position without being rewritten.",
            "In 1905 , the theater opened . -> The theater opened in 1905 .",
        ),
        (
            EditCategory.ANAPHORA_RESOLUTION,
            "A pronoun or short referring expression is replaced by the full name it refers to.",
            "She won the prize . -> Marie Curie won the prize .",
        ),
        (
            EditCategory.ANAPHORA_INSERTION,
            "A repeated full name is replaced by a pronoun or shorter referring expression.",
            "Marie Curie was glad . -> She was glad .",
        ),
        (
            EditCategory.ELABORATION_BACKGROUND,
            "Background knowledge the reader may lack is added.",
            "the Baroque style -> the Baroque style , a grand old art style ,",
        ),
        (
            EditCategory.ELABORATION_EXAMPLE,
            "An illustrative example is added.",
            "large mammals -> large mammals , such as elephants ,",
        ),
        (
            EditCategory.ELABORATION_GENERIC,
            "Other added wording that spells out what was only implied.",
            "he was convicted -> he was found guilty in court",
        ),
        (
            EditCategory.SEMANTIC_DELETION,
            "Content is removed from the document.",
            "The opera , founded by decree , closed . -> The opera closed .",
        ),
        (
            EditCategory.SPECIFIC_TO_GENERAL,
            "A precise term or detail is replaced by a broader one.",
            "12,400 residents -> many residents",
        ),
        (
            EditCategory.FORMAT,
            "Markup, numbers, dates or punctuation change form; the wording does not.",
            "1 January 2000 -> January 1 , 2000",
        ),
        (
            EditCategory.NOISE_DELETION,
            "Vandalism, broken markup, or other junk is removed.",
            "the best best page !!! -> the page",
        ),
        (
            EditCategory.FACT_CORRECTION,
            "A factual detail is changed into a different factual claim.",
            "opened in 1859 -> opened in 1860",
        ),
        (
            EditCategory.EXTRANEOUS_INFORMATION,
            "Content unrelated to simplifying the source is added.",
            "(nothing) -> My school visited it last year .",
        ),
        (
            EditCategory.MISCELLANEOUS,
            "Edits that fit no other category.",
            "-",
        ),
    ]
)
assert len(TAXONOMY) == len(EditCategory)


class PairMismatchError(ValueError):
    """Raised when records that must describe the same pair disagree on pair_id."""


@dataclass(frozen=True, slots=True)
class DocumentRevision:
    """One revision of one wiki page, already reduced to plain intro text."""

    page_id: int
    revision_id: int
    timestamp: datetime
    title: str
    text: str
    source_wiki: str  # "complex" | "simple"

    def __post_init__(self) -> None:
        if self.source_wiki not in ("complex", "simple"):
            raise ValueError(f"source_wiki must be 'complex' or 'simple', got {self.source_wiki!r}")


@dataclass(frozen=True, slots=True)
class EditOperation:
    """One keep/insert/delete span of an alignment sequence."""

    index: int
    kind: OpKind
    tokens: tuple[str, ...]

    def __post_init__(self) -> None:
        if self.index < 0:
            raise ValueError(f"op index must be >= 0, got {self.index}")
        if not self.tokens:
            raise ValueError(f"op {self.index}: empty token span")
        for tok in self.tokens:
            if not tok or any(c.isspace() for c in tok):
                raise ValueError(f"op {self.index}: bad token {tok!r}")

    @property
    def is_edit(self) -> bool:
        return self.kind is not OpKind.KEEP


@dataclass(frozen=True, slots=True)
class AlignmentSequence:
    """Canonical edit-operation view of one complex/simple document pair.

    Invariants enforced here: operation indices are consecutive from 0,
    no two adjacent operations share a kind, and every operation carries at
    least one token.
    """

    pair_id: str
    operations: tuple[EditOperation, ...]

    def __post_init__(self) -> None:
        for i, op in enumerate(self.operations):
            if op.index != i:
                raise ValueError(f"pair {self.pair_id}: op at position {i} has index {op.index}")
            if i and self.operations[i - 1].kind is op.kind:
                raise ValueError(
                    f"pair {self.pair_id}: adjacent ops {i - 1},{i} share kind {op.kind.value}"
                )

    @property
    def edit_indices(self) -> tuple[int, ...]:
        """Indices of insert/delete operations, in sequence order."""
        return tuple(op.index for op in self.operations if op.is_edit)

    def __len__(self) -> int:
        return len(self.operations)


@dataclass(frozen=True, slots=True)
class EditGroup:
    """A set of edit operations judged to realise one categorized edit."""

    category: EditCategory
    op_indices: frozenset[int]

    def __post_init__(self) -> None:
        if not self.op_indices:
            raise ValueError("edit group must contain at least one op")
        if any(i < 0 for i in self.op_indices):
            raise ValueError("edit group op indices must be >= 0")

    @property
    def sorted_ops(self) -> tuple[int, ...]:
        return tuple(sorted(self.op_indices))


@dataclass(frozen=True, slots=True)
class AnnotationRecord:
    """One annotator's (or model's) full grouping of a pair's edit ops."""

    pair_id: str
    annotator_id: str
    groups: tuple[EditGroup, ...]
    unaligned_flag: bool = False
    completed_at: datetime | None = None


@dataclass(frozen=True, slots=True)
class OpTag:
    """A single category tag on one edit operation.

    ``flag`` is an explicit begin/inside marker ("B"/"I") for schemes that
    carry one; ``p_b``/``p_i`` are classifier probabilities for schemes that
    carry those instead. Either, both, or neither may be present.
    """

    category: EditCategory
    flag: str | None = None
    p_b: float | None = None
    p_i: float | None = None

    def __post_init__(self) -> None:
        if self.flag not in (None, "B", "I"):
            raise ValueError(f"flag must be 'B', 'I' or None, got {self.flag!r}")
        for name, p in (("p_b", self.p_b), ("p_i", self.p_i)):
            if p is not None and not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {p}")

    def resolved_flag(self) -> str | None:
        """Explicit flag if present, else the argmax of (p_b, p_i), else None."""
        if self.flag is not None:
            return self.flag
        if self.p_b is not None and self.p_i is not None:
            return "B" if self.p_b >= self.p_i else "I"
        return None


@dataclass(frozen=True)
class TaggedOperations:
    """Per-operation category tags for one pair (no grouping information)."""

    pair_id: str
    tags: Mapping[int, tuple[OpTag, ...]]

    def __post_init__(self) -> None:
        norm: dict[int, tuple[OpTag, ...]] = {}
        for idx in sorted(self.tags):
            tags = tuple(self.tags[idx])
            seen = [t.category for t in tags]
            if len(set(seen)) != len(seen):
                raise ValueError(f"op {idx}: duplicate category tag")
            norm[idx] = tags
        object.__setattr__(self, "tags", norm)

    def categories_for(self, op_index: int) -> set[EditCategory]:
        return {t.category for t in self.tags.get(op_index, ())}

    def tagged_indices(self) -> tuple[int, ...]:
        return tuple(sorted(self.tags))


def category_sort_key(category: EditCategory) -> int:
    """Position of ``category`` in the canonical taxonomy order."""
    return CATEGORY_ORDER.index(category)


def validate_annotation(record: AnnotationRecord, seq: AlignmentSequence) -> list[str]:
    """Check an annotation against its alignment sequence.

    Returns a list of human-readable violations (empty when the record is a
    valid full annotation). Raises :class:`PairMismatchError` if the record
    and sequence disagree about which pair they describe.
    """
    if record.pair_id != seq.pair_id:
        raise PairMismatchError(
            f"annotation is for pair {record.pair_id!r} but sequence is {seq.pair_id!r}"
        )
    violations: list[str] = []
    n_ops = len(seq.operations)
    edit_set = set(seq.edit_indices)
    if record.unaligned_flag and record.groups:
        violations.append("pair flagged as unaligned but carries edit groups")
    covered: set[int] = set()
    for g_no, group in enumerate(record.groups):
        for idx in group.sorted_ops:
            if idx >= n_ops:
                violations.append(f"group {g_no}: op index {idx} out of range (sequence has {n_ops} ops)")
            elif idx not in edit_set:
                violations.append(f"group {g_no}: op {idx} is a keep, not an edit op")
            else:
                covered.add(idx)
    if not record.unaligned_flag:
        uncovered = sorted(edit_set - covered)
        if uncovered:
            violations.append(
                "edit ops not covered by any group: " + ", ".join(str(i) for i in uncovered)
            )
    return violations


def tags_from_groups(
    pair_id: str, groups: Iterable[EditGroup]
) -> TaggedOperations:
    """Flatten groups to per-op category tags (the grouping is forgotten)."""
    by_op: dict[int, list[EditCategory]] = {}
    for group in groups:
        for idx in group.op_indices:
            cats = by_op.setdefault(idx, [])
            if group.category not in cats:
                cats.append(group.category)
    tags = {
        idx: tuple(OpTag(c) for c in sorted(cats, key=category_sort_key))
        for idx, cats in by_op.items()
    }
    return TaggedOperations(pair_id=pair_id, tags=tags)
