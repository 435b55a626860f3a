import random
from fractions import Fraction

import pytest

from docsimp.core import EditCategory, EditGroup, tags_from_groups
from docsimp.metrics import (
    build_identification_report,
    category_f1,
    class_f1,
    group_exact_pct,
    group_partial_pct,
)

LEX = EditCategory.LEXICAL
SEM = EditCategory.SEMANTIC_DELETION
REO = EditCategory.REORDERING
SPL = EditCategory.SENTENCE_SPLIT
FUS = EditCategory.SENTENCE_FUSION
FMT = EditCategory.FORMAT


def tags(pair_id, mapping):
    groups = [
        EditGroup(cat, frozenset({idx})) for idx, cats in mapping.items() for cat in cats
    ]
    return tags_from_groups(pair_id, groups)


def g(cat, *ops):
    return EditGroup(cat, frozenset(ops))


# --- weighted F1 hand fixtures (values derived with exact fractions) -------


def test_category_f1_fixture_fp_and_fn():
    ref = {"p": tags("p", {0: [LEX], 1: [SEM]})}
    pred = {"p": tags("p", {0: [LEX], 2: [FMT]})}
    # lexical: tp=1 -> F1=1, support 1; semantic_deletion: fn=1 -> F1=0,
    # support 1; format: fp only -> support 0, excluded.
    expected = 100 * Fraction(1 * 1 + 1 * 0, 2)
    assert category_f1(pred, ref) == pytest.approx(float(expected), abs=1e-9)


def test_category_f1_fixture_multilabel():
    ref = {"p": tags("p", {0: [LEX, REO], 1: [REO]})}
    pred = {"p": tags("p", {0: [LEX], 1: [REO]})}
    # lexical: F1=1 support 1; reordering: tp=1, fn=1 -> F1=2/3 support 2
    expected = 100 * (1 * 1 + 2 * Fraction(2, 3)) / 3
    assert category_f1(pred, ref) == pytest.approx(float(expected), abs=1e-9)


def test_category_and_class_f1_fixture_cross_pair():
    ref = {"p1": tags("p1", {0: [SPL], 1: [SPL]}), "p2": tags("p2", {0: [LEX]})}
    pred = {"p1": tags("p1", {0: [SPL], 1: [FUS]}), "p2": tags("p2", {0: [LEX]})}
    expected_cat = 100 * (2 * Fraction(2, 3) + 1 * 1) / 3
    assert category_f1(pred, ref) == pytest.approx(float(expected_cat), abs=1e-9)
    # at class level the split/fusion confusion disappears (both syntactic)
    assert class_f1(pred, ref) == pytest.approx(100.0, abs=1e-9)


def test_f1_perfect_and_empty():
    ref = {"p": tags("p", {0: [LEX]})}
    assert category_f1(ref, ref) == 100.0
    assert category_f1({}, {}) == 100.0
    assert category_f1({"p": tags("p", {0: [LEX]})}, {}) == 0.0


# --- %Exact / %Partial vs a brute-force matcher ----------------------------


def oracle_match_pct(pred, ref, exact):
    hits = total = 0
    for pid in set(pred) | set(ref):
        for rg in ref.get(pid, []):
            total += 1
            for pg in pred.get(pid, []):
                if pg.category is not rg.category:
                    continue
                if exact:
                    ok = pg.op_indices == rg.op_indices
                else:
                    inter = len(pg.op_indices & rg.op_indices)
                    union = len(pg.op_indices | rg.op_indices)
                    ok = Fraction(inter, union) >= Fraction(1, 2)
                if ok:
                    hits += 1
                    break
    return 100.0 if total == 0 else 100.0 * hits / total


def random_groups(rng, n_ops, max_groups):
    cats = [LEX, SEM, REO, FMT]
    out = []
    for _ in range(rng.randint(0, max_groups)):
        size = rng.randint(1, n_ops)
        ops = frozenset(rng.sample(range(n_ops), size))
        out.append(EditGroup(rng.choice(cats), ops))
    return out


def test_group_match_pcts_match_brute_force(rng):
    for _ in range(400):
        n_ops = rng.randint(1, 8)
        pred = {"p": random_groups(rng, n_ops, 6)}
        ref = {"p": random_groups(rng, n_ops, 6)}
        assert group_exact_pct(pred, ref) == oracle_match_pct(pred, ref, True)
        assert group_partial_pct(pred, ref) == oracle_match_pct(pred, ref, False)


def test_partial_jaccard_boundary_inclusive():
    # |intersection|=1, |union|=2 -> exactly 0.5 -> counts
    ref = {"p": [g(LEX, 0, 1)]}
    pred = {"p": [g(LEX, 0)]}
    assert group_partial_pct(pred, ref) == 100.0
    assert group_exact_pct(pred, ref) == 0.0


def test_match_pcts_empty_reference_is_100():
    assert group_exact_pct({"p": [g(LEX, 0)]}, {}) == 100.0
    assert group_partial_pct({}, {}) == 100.0


def test_match_requires_same_category():
    ref = {"p": [g(LEX, 0)]}
    pred = {"p": [g(SEM, 0)]}
    assert group_exact_pct(pred, ref) == 0.0
    assert group_partial_pct(pred, ref) == 0.0


# --- report ----------------------------------------------------------------


def test_report_perfect_prediction_all_100():
    ref = {
        "p1": [g(LEX, 0), g(SEM, 1, 2)],
        "p2": [g(REO, 0)],
    }
    report = build_identification_report(ref, ref)
    assert report.category_f1 == 100.0
    assert report.class_f1 == 100.0
    assert report.exact_pct == 100.0
    assert report.partial_pct == 100.0
    assert report.n_pairs == 2
    assert report.n_ref_groups == 3


def test_report_per_category_rows():
    ref = {"p": [g(LEX, 0), g(SEM, 1)]}
    pred = {"p": [g(LEX, 0)]}
    report = build_identification_report(pred, ref)
    by_cat = {row.category: row for row in report.rows}
    assert by_cat[LEX].f1 == 100.0
    assert by_cat[LEX].exact_pct == 100.0
    assert by_cat[SEM].f1 == 0.0
    assert by_cat[SEM].exact_pct == 0.0
    assert by_cat[SEM].n_ref_groups == 1
    assert report.to_dict()["per_category"][0]["category"] == "lexical"
