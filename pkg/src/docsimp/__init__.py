"""Document-level simplification editing toolkit.

Aligns complex/simple document pairs into edit-operation sequences, mines
aligned revision pairs from wiki histories, identifies and evaluates
categorized edit groups, and cleans corpora by reverting edits that do not
simplify.
"""

from docsimp.align import align, align_texts, tokenize
from docsimp.core import (
    AlignmentSequence,
    AnnotationRecord,
    EditCategory,
    EditClass,
    EditGroup,
    EditOperation,
    OpTag,
    TaggedOperations,
    TAXONOMY,
    class_of,
)
from docsimp.markup import parse_markup, serialize_markup

__version__ = "0.1.0"

__all__ = [
    "AlignmentSequence",
    "AnnotationRecord",
    "EditCategory",
    "EditClass",
    "EditGroup",
    "EditOperation",
    "OpTag",
    "TaggedOperations",
    "TAXONOMY",
    "__version__",
    "align",
    "align_texts",
    "class_of",
    "parse_markup",
    "serialize_markup",
    "tokenize",
]
