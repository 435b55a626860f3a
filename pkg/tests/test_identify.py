import json
import random

import pytest

from docsimp.align import reconstruct_source, reconstruct_target
from docsimp.core import (
    AnnotationRecord,
    EditCategory,
    EditGroup,
    OpKind,
    OpTag,
    TaggedOperations,
)
from docsimp.identify import (
    CONTIGUOUS,
    GLOBAL,
    CategoryModeTable,
    PredictionFormatError,
    RepresentabilityError,
    build_adjusted_sequence,
    decode_bic,
    derive_category_modes,
    encode_bic,
    group_adjacent,
    group_single,
    group_rules,
    group_uncategorized_adjacent,
    load_predictions,
    op_majority,
    run_pipeline,
)
from conftest import mkseq

LEX = EditCategory.LEXICAL
SEM = EditCategory.SEMANTIC_DELETION
FMT = EditCategory.FORMAT


def rec(groups, pair_id="p"):
    return AnnotationRecord(pair_id=pair_id, annotator_id="a1", groups=tuple(groups))


def g(cat, *ops):
    return EditGroup(cat, frozenset(ops))


def test_op_majority_rule():
    seq = mkseq([("k", "a"), ("d", "x y"), ("k", "b"), ("i", "z")])
    tags = op_majority(seq)
    assert tags.categories_for(1) == {SEM}
    assert tags.categories_for(3) == {LEX}
    assert tags.categories_for(0) == set()


def test_group_single():
    tags = TaggedOperations(pair_id="p", tags={2: (OpTag(LEX), OpTag(SEM)), 4: (OpTag(LEX),)})
    groups = group_single(tags)
    assert groups == [g(LEX, 2), g(SEM, 2), g(LEX, 4)]


def test_group_adjacent_merges_position_consecutive_runs():
    # ops 1,2 adjacent (insert then delete), op 4 separated by a keep
    seq = mkseq([("k", "a"), ("i", "x"), ("d", "y"), ("k", "b"), ("d", "z")])
    tags = TaggedOperations(
        pair_id="p", tags={1: (OpTag(LEX),), 2: (OpTag(LEX),), 4: (OpTag(LEX),)}
    )
    groups = group_adjacent(tags, seq)
    assert groups == [g(LEX, 1, 2), g(LEX, 4)]


def test_group_adjacent_different_categories_do_not_merge():
    seq = mkseq([("i", "x"), ("d", "y")])
    tags = TaggedOperations(pair_id="p", tags={0: (OpTag(LEX),), 1: (OpTag(SEM),)})
    assert group_adjacent(tags, seq) == [g(LEX, 0), g(SEM, 1)]


def test_group_uncategorized_adjacent():
    seq = mkseq([("k", "a"), ("i", "x"), ("d", "y"), ("k", "b"), ("d", "z")])
    assert group_uncategorized_adjacent(seq) == [frozenset({1, 2}), frozenset({4})]


def test_derive_modes_keeps_do_not_break_contiguity():
    # group {1, 3}: intervening op 2 is a keep in edit-op order terms?
    # edit ops are 1 and 3 only, so the group is contiguous in edit order.
    seq = mkseq([("k", "a"), ("d", "x"), ("k", "b"), ("d", "y"), ("k", "c")])
    ann = rec([g(SEM, 1, 3)])
    modes = derive_category_modes([ann], {"p": seq})
    assert modes.mode_for(SEM) == CONTIGUOUS


def test_derive_modes_intervening_edit_op_breaks_contiguity():
    # edit ops 1, 2, 3; group {1, 3} skips edit op 2 -> not contiguous
    seq = mkseq([("k", "a"), ("d", "x"), ("i", "q"), ("d", "y"), ("k", "c")])
    ann = rec([g(SEM, 1, 3), g(LEX, 2)])
    modes = derive_category_modes([ann], {"p": seq})
    assert modes.mode_for(SEM) == GLOBAL
    assert modes.mode_for(LEX) == CONTIGUOUS


def test_derive_modes_majority_and_tie():
    seq = mkseq([("d", "a"), ("i", "b"), ("d", "c"), ("i", "e")])
    contiguous = rec([g(SEM, 0, 1)])
    split = rec([g(SEM, 0, 2)])  # skips edit op 1
    # tie at exactly 50% -> global
    modes = derive_category_modes([contiguous, split], {"p": seq})
    assert modes.mode_for(SEM) == GLOBAL
    # unseen categories default to contiguous
    assert modes.mode_for(FMT) == CONTIGUOUS


def test_group_rules_mixes_modes():
    seq = mkseq([("i", "x"), ("k", "a"), ("i", "y"), ("k", "b"), ("d", "z")])
    tags = TaggedOperations(
        pair_id="p",
        tags={0: (OpTag(EditCategory.REORDERING),), 2: (OpTag(EditCategory.REORDERING),), 4: (OpTag(SEM),)},
    )
    modes = CategoryModeTable({EditCategory.REORDERING: GLOBAL, SEM: CONTIGUOUS})
    groups = group_rules(tags, seq, modes)
    assert g(EditCategory.REORDERING, 0, 2) in groups
    assert g(SEM, 4) in groups


def test_mode_table_round_trip_and_validation():
    table = CategoryModeTable({LEX: GLOBAL})
    again = CategoryModeTable.from_json(table.to_json())
    assert again.mode_for(LEX) == GLOBAL
    assert again.mode_for(SEM) == CONTIGUOUS
    with pytest.raises(ValueError, match="unknown mode"):
        CategoryModeTable({LEX: "diagonal"})


# --- BIC codec -------------------------------------------------------------


def test_encode_bic_simple():
    seq = mkseq([("k", "a"), ("i", "x"), ("d", "y"), ("k", "b")])
    tags = encode_bic(rec([g(LEX, 1, 2)]), seq)
    assert tags.tags[1] == (OpTag(LEX, flag="B"),)
    assert tags.tags[2] == (OpTag(LEX, flag="I"),)


def test_bic_round_trip_interleaved_categories():
    # ops: 0:d 1:i 2:d 3:i; lexical on {0, 2}, format on {1, 3} -- interleaved
    seq = mkseq([("d", "a"), ("i", "b"), ("d", "c"), ("i", "e")])
    ann = rec([g(LEX, 0, 2), g(FMT, 1, 3)])
    tags = encode_bic(ann, seq)
    decoded = decode_bic(tags, seq)
    assert set(decoded) == set(ann.groups)


def test_bic_round_trip_multiple_groups_same_category():
    seq = mkseq([("d", "a"), ("i", "b"), ("d", "c"), ("i", "e")])
    ann = rec([g(LEX, 0, 1), g(LEX, 2, 3)])
    tags = encode_bic(ann, seq)
    assert tags.tags[2] == (OpTag(LEX, flag="B"),)  # new group restarts with B
    assert set(decode_bic(tags, seq)) == set(ann.groups)


def test_bic_unrepresentable_gap_names_category():
    # lexical ops are 0, 1, 2; group {0, 2} skips lexical-tagged op 1
    seq = mkseq([("d", "a"), ("i", "b"), ("d", "c")])
    ann = rec([g(LEX, 0, 2), g(LEX, 1)])
    with pytest.raises(RepresentabilityError) as e:
        encode_bic(ann, seq)
    assert e.value.category is LEX
    assert "lexical" in str(e.value)


def test_bic_unrepresentable_overlap_names_category():
    seq = mkseq([("d", "a"), ("i", "b")])
    ann = rec([g(SEM, 0, 1), g(SEM, 1)])
    with pytest.raises(RepresentabilityError, match="semantic_deletion"):
        encode_bic(ann, seq)


def test_bic_gap_of_other_category_is_fine():
    # lexical group {0, 2} with op 1 tagged format only: contiguous within lexical
    seq = mkseq([("d", "a"), ("i", "b"), ("d", "c")])
    ann = rec([g(LEX, 0, 2), g(FMT, 1)])
    decoded = decode_bic(encode_bic(ann, seq), seq)
    assert set(decoded) == set(ann.groups)


def test_decode_bic_leading_inside_flag_opens_group():
    seq = mkseq([("d", "a"), ("k", "x"), ("d", "b")])
    tags = TaggedOperations(
        pair_id="p", tags={0: (OpTag(LEX, flag="I"),), 2: (OpTag(LEX, flag="I"),)}
    )
    assert decode_bic(tags, seq) == [g(LEX, 0, 2)]


def test_decode_bic_uses_probabilities():
    seq = mkseq([("d", "a"), ("i", "b")])
    tags = TaggedOperations(
        pair_id="p",
        tags={
            0: (OpTag(LEX, p_b=0.8, p_i=0.2),),
            1: (OpTag(LEX, p_b=0.3, p_i=0.7),),
        },
    )
    assert decode_bic(tags, seq) == [g(LEX, 0, 1)]


def test_decode_bic_without_bi_information_fails():
    seq = mkseq([("d", "a")])
    tags = TaggedOperations(pair_id="p", tags={0: (OpTag(LEX),)})
    with pytest.raises(ValueError, match="no B/I information"):
        decode_bic(tags, seq)


def test_bic_round_trip_random_synthetic(rng):
    cats = [LEX, SEM, FMT, EditCategory.REORDERING]
    for _ in range(200):
        spec = []
        kind_prev = None
        for i in range(rng.randint(1, 10)):
            kind = rng.choice([k for k in ("k", "i", "d") if k != kind_prev])
            spec.append((kind, f"w{i}"))
            kind_prev = kind
        seq = mkseq(spec)
        edit = list(seq.edit_indices)
        if not edit:
            continue
        groups = []
        for cat in rng.sample(cats, rng.randint(1, 3)):
            chosen = [i for i in edit if rng.random() < 0.6]
            if not chosen:
                continue
            # partition chosen (in order) into consecutive chunks
            chunks = [[chosen[0]]]
            for idx in chosen[1:]:
                if rng.random() < 0.4:
                    chunks.append([idx])
                else:
                    chunks[-1].append(idx)
            groups.extend(EditGroup(cat, frozenset(c)) for c in chunks)
        if not groups:
            continue
        ann = rec(groups)
        decoded = decode_bic(encode_bic(ann, seq), seq)
        assert set(decoded) == set(groups)


# --- adjusted sequences ----------------------------------------------------


def test_build_adjusted_sequence_reverts_outside_ops():
    seq = mkseq([("k", "a"), ("i", "x"), ("d", "y"), ("k", "b"), ("i", "z")])
    adjusted = build_adjusted_sequence(seq, {1, 2})
    # op 4's insert is reverted away; source text unchanged
    assert reconstruct_source(adjusted) == reconstruct_source(seq)
    assert reconstruct_target(adjusted) == "a x b"
    # all remaining edits belong to the chosen set
    assert [op.kind for op in adjusted.operations] == [
        OpKind.KEEP,
        OpKind.INSERT,
        OpKind.DELETE,
        OpKind.KEEP,
    ]


def test_build_adjusted_sequence_reverted_delete_becomes_keep():
    seq = mkseq([("d", "x"), ("k", "a"), ("d", "y")])
    adjusted = build_adjusted_sequence(seq, {0})
    assert reconstruct_target(adjusted) == "a y"
    assert reconstruct_source(adjusted) == "x a y"


def test_build_adjusted_sequence_rejects_non_edit_ops():
    seq = mkseq([("k", "a"), ("i", "x")])
    with pytest.raises(ValueError, match="not edit ops"):
        build_adjusted_sequence(seq, {0})


# --- predictions file ------------------------------------------------------


def _write_preds(tmp_path, rows):
    path = tmp_path / "preds.jsonl"
    path.write_text("\n".join(json.dumps(r) for r in rows) + "\n", encoding="utf-8")
    return path


def test_load_predictions_ok(tmp_path):
    seq = mkseq([("k", "a"), ("i", "x"), ("d", "y")])
    path = _write_preds(
        tmp_path,
        [
            {"pair_id": "p", "op_index": 1, "category": "lexical"},
            {"pair_id": "p", "op_index": 2, "category": "semantic_deletion", "p_b": 0.9, "p_i": 0.1},
        ],
    )
    preds = load_predictions(path, {"p": seq})
    assert preds["p"].categories_for(1) == {LEX}
    assert preds["p"].tags[2][0].p_b == 0.9


@pytest.mark.parametrize(
    "row,message",
    [
        ({"pair_id": "p", "op_index": 1}, "missing field 'category'"),
        ({"pair_id": "q", "op_index": 1, "category": "lexical"}, "unknown pair_id"),
        ({"pair_id": "p", "op_index": 0, "category": "lexical"}, "not an edit op"),
        ({"pair_id": "p", "op_index": 1, "category": "nope"}, "unknown category"),
        ({"pair_id": "p", "op_index": 1, "category": "lexical", "p_b": 0.5}, "together"),
    ],
)
def test_load_predictions_validation(tmp_path, row, message):
    seq = mkseq([("k", "a"), ("i", "x"), ("d", "y")])
    path = _write_preds(tmp_path, [row])
    with pytest.raises(PredictionFormatError, match=message):
        load_predictions(path, {"p": seq})


def test_load_predictions_duplicate(tmp_path):
    seq = mkseq([("i", "x")])
    row = {"pair_id": "p", "op_index": 0, "category": "lexical"}
    path = _write_preds(tmp_path, [row, row])
    with pytest.raises(PredictionFormatError, match="duplicate"):
        load_predictions(path, {"p": seq})


# --- pipelines -------------------------------------------------------------


def test_run_pipeline_op_majority_adjacent():
    seq = mkseq([("k", "a"), ("i", "x"), ("d", "y"), ("k", "b")])
    tags, groups = run_pipeline("op-majority+adjacent", seq)
    # insert tagged lexical, delete semantic_deletion: different categories,
    # so adjacency cannot merge them
    assert groups == [g(LEX, 1), g(SEM, 2)]


def test_run_pipeline_external_bic():
    seq = mkseq([("d", "a"), ("i", "b")])
    preds = {
        "p": TaggedOperations(
            pair_id="p",
            tags={0: (OpTag(LEX, p_b=0.9, p_i=0.1),), 1: (OpTag(LEX, p_b=0.2, p_i=0.8),)},
        )
    }
    _, groups = run_pipeline("external-bic", seq, predictions=preds)
    assert groups == [g(LEX, 0, 1)]


def test_run_pipeline_unknown():
    seq = mkseq([("d", "a")])
    with pytest.raises(ValueError, match="unknown pipeline"):
        run_pipeline("magic", seq)
