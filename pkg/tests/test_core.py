import pytest

from docsimp.core import (
    CATEGORY_ORDER,
    TAXONOMY,
    AnnotationRecord,
    EditCategory,
    EditClass,
    EditGroup,
    EditOperation,
    OpKind,
    OpTag,
    PairMismatchError,
    TaggedOperations,
    class_of,
    tags_from_groups,
    validate_annotation,
)
from conftest import mkseq


def test_taxonomy_has_19_categories_in_5_classes():
    assert len(EditCategory) == 19
    assert len(EditClass) == 5
    assert len(TAXONOMY) == 19
    by_class = {}
    for cat in EditCategory:
        by_class.setdefault(class_of(cat), []).append(cat)
    assert len(by_class[EditClass.LEXICAL]) == 2
    assert len(by_class[EditClass.SYNTACTIC]) == 4
    assert len(by_class[EditClass.DISCOURSE]) == 3
    assert len(by_class[EditClass.SEMANTIC]) == 5
    assert len(by_class[EditClass.NON_SIMPLIFICATION]) == 5


def test_taxonomy_entries_are_ordered_and_described():
    assert tuple(info.category for info in TAXONOMY) == CATEGORY_ORDER
    for info in TAXONOMY:
        assert info.definition
        assert info.example
        assert info.edit_class is class_of(info.category)


def test_edit_operation_rejects_bad_tokens():
    with pytest.raises(ValueError):
        EditOperation(index=0, kind=OpKind.KEEP, tokens=())
    with pytest.raises(ValueError):
        EditOperation(index=0, kind=OpKind.KEEP, tokens=("a b",))
    with pytest.raises(ValueError):
        EditOperation(index=-1, kind=OpKind.KEEP, tokens=("a",))


def test_sequence_rejects_adjacent_same_kind_and_bad_indices():
    ok = mkseq([("k", "a"), ("i", "x"), ("d", "y"), ("k", "b")])
    assert ok.edit_indices == (1, 2)
    with pytest.raises(ValueError, match="share kind"):
        mkseq([("k", "a"), ("k", "b")])
    with pytest.raises(ValueError, match="has index"):
        ops = (
            EditOperation(index=0, kind=OpKind.KEEP, tokens=("a",)),
            EditOperation(index=2, kind=OpKind.INSERT, tokens=("x",)),
        )
        from docsimp.core import AlignmentSequence

        AlignmentSequence(pair_id="p", operations=ops)


def test_edit_group_validation():
    with pytest.raises(ValueError):
        EditGroup(EditCategory.LEXICAL, frozenset())
    g = EditGroup(EditCategory.LEXICAL, frozenset({3, 1}))
    assert g.sorted_ops == (1, 3)


def test_op_tag_validation_and_flag_resolution():
    with pytest.raises(ValueError):
        OpTag(EditCategory.LEXICAL, flag="X")
    with pytest.raises(ValueError):
        OpTag(EditCategory.LEXICAL, p_b=1.5)
    assert OpTag(EditCategory.LEXICAL, flag="B").resolved_flag() == "B"
    assert OpTag(EditCategory.LEXICAL, p_b=0.4, p_i=0.6).resolved_flag() == "I"
    assert OpTag(EditCategory.LEXICAL, p_b=0.5, p_i=0.5).resolved_flag() == "B"
    assert OpTag(EditCategory.LEXICAL).resolved_flag() is None


def test_tagged_operations_rejects_duplicate_categories():
    with pytest.raises(ValueError, match="duplicate"):
        TaggedOperations(
            pair_id="p",
            tags={0: (OpTag(EditCategory.LEXICAL), OpTag(EditCategory.LEXICAL))},
        )


def test_validate_annotation_full_coverage_ok():
    seq = mkseq([("k", "a"), ("i", "x"), ("d", "y"), ("k", "b")])
    rec = AnnotationRecord(
        pair_id="p",
        annotator_id="annotator1",
        groups=(EditGroup(EditCategory.LEXICAL, frozenset({1, 2})),),
    )
    assert validate_annotation(rec, seq) == []


def test_validate_annotation_reports_violations():
    seq = mkseq([("k", "a"), ("i", "x"), ("d", "y"), ("k", "b")])
    rec = AnnotationRecord(
        pair_id="p",
        annotator_id="annotator1",
        groups=(
            EditGroup(EditCategory.LEXICAL, frozenset({0})),  # keep op
            EditGroup(EditCategory.LEXICAL, frozenset({9})),  # out of range
        ),
    )
    violations = validate_annotation(rec, seq)
    assert any("is a keep" in v for v in violations)
    assert any("out of range" in v for v in violations)
    assert any("not covered" in v for v in violations)


def test_validate_annotation_unaligned_flag_skips_coverage():
    seq = mkseq([("k", "a"), ("i", "x")])
    rec = AnnotationRecord(pair_id="p", annotator_id="a", groups=(), unaligned_flag=True)
    assert validate_annotation(rec, seq) == []
    # but groups on a flagged record are contradictory
    rec2 = AnnotationRecord(
        pair_id="p",
        annotator_id="a",
        groups=(EditGroup(EditCategory.LEXICAL, frozenset({1})),),
        unaligned_flag=True,
    )
    assert any("flagged" in v for v in validate_annotation(rec2, seq))


def test_validate_annotation_pair_mismatch_raises():
    seq = mkseq([("k", "a")], pair_id="other")
    rec = AnnotationRecord(pair_id="p", annotator_id="a", groups=())
    with pytest.raises(PairMismatchError):
        validate_annotation(rec, seq)


def test_tags_from_groups_flattens_and_orders():
    groups = [
        EditGroup(EditCategory.SEMANTIC_DELETION, frozenset({2, 3})),
        EditGroup(EditCategory.LEXICAL, frozenset({2})),
    ]
    tags = tags_from_groups("p", groups)
    assert tags.categories_for(2) == {EditCategory.LEXICAL, EditCategory.SEMANTIC_DELETION}
    # taxonomy order: lexical before semantic_deletion
    assert [t.category for t in tags.tags[2]] == [
        EditCategory.LEXICAL,
        EditCategory.SEMANTIC_DELETION,
    ]
    assert tags.tagged_indices() == (2, 3)
