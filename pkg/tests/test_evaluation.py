import json
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from discparse.corpus import DiscourseRelation, TokenSpan
from discparse.evaluation import (
    Baseline1Stats,
    EvalError,
    RowScore,
    baseline1_parse,
    baseline1_stats,
    evaluate,
)
from helpers import load_doc, load_gold


def explicit(conn, a1, a2, sense="Expansion"):
    return DiscourseRelation("Explicit", TokenSpan(a1), TokenSpan(a2), TokenSpan(conn), sense)


GOLD = {
    "d1": [
        explicit((2,), (0, 1), (3, 4), "Contingency/Cause"),
        explicit((7,), (5, 6), (8, 9), "Temporal"),
        explicit((12,), (10, 11), (13, 14), "Comparison"),
        DiscourseRelation("EntRel", TokenSpan((10, 11)), TokenSpan((15, 16))),
    ]
}


def test_identity_scores_one():
    report = evaluate(GOLD, GOLD)
    for row in report.rows.values():
        assert (row.precision, row.recall, row.f1) == (1.0, 1.0, 1.0)


def test_empty_predictions():
    report = evaluate({"d1": []}, GOLD)
    for row in report.rows.values():
        assert (row.precision, row.recall, row.f1) == (0.0, 0.0, 0.0)


def test_two_of_three_connectives():
    pred = {"d1": GOLD["d1"][:2]}
    row = evaluate(pred, GOLD).rows["Connective"]
    assert (row.tp, row.fp, row.fn) == (2, 0, 1)
    assert row.precision == 1.0
    assert row.recall == pytest.approx(2 / 3)
    assert row.f1 == pytest.approx(0.8)


def test_wrong_sense_counts_against_sense_only():
    pred = {"d1": [explicit((2,), (0, 1), (3, 4), "Expansion")] + GOLD["d1"][1:]}
    report = evaluate(pred, GOLD)
    assert report.rows["Connective"].f1 == 1.0
    assert report.rows["Arg2"].f1 == 1.0
    assert report.rows["Sense"].tp == 3


def test_duplicate_prediction_matches_once():
    pred = {"d1": GOLD["d1"] + [GOLD["d1"][0]]}
    row = evaluate(pred, GOLD).rows["Connective"]
    assert (row.tp, row.fp, row.fn) == (3, 1, 0)


def test_order_of_predictions_irrelevant():
    shuffled = list(GOLD["d1"])
    random.Random(4).shuffle(shuffled)
    assert evaluate({"d1": shuffled}, GOLD).to_json() == evaluate(GOLD, GOLD).to_json()


def test_partial_mode():
    # 3 of 4 tokens shared in both directions clears the 70% bar
    pred = {"d1": [explicit((2,), (0, 1), (3, 4)), *GOLD["d1"][1:]]}
    gold = {"d1": [explicit((2,), (0, 1), (3, 4, 5, 6)), *GOLD["d1"][1:]]}
    assert evaluate(pred, gold).rows["Arg2"].tp == 3
    pred = {"d1": [explicit((2,), (0, 1), (3, 4, 5)), *GOLD["d1"][1:]]}
    assert evaluate(pred, gold, partial=True).rows["Arg2"].tp == 4


def test_doc_id_mismatch():
    with pytest.raises(EvalError, match="mismatch"):
        evaluate({"other": []}, GOLD)


def test_breakdown_and_text():
    report = evaluate({"d1": GOLD["d1"][:2]}, GOLD)
    assert set(report.breakdown) == {"Explicit", "NonExplicit"}
    text = report.to_text()
    assert "Connective       1.000     0.667     0.800" in text
    assert json.loads(report.to_json())["rows"]["Connective"]["tp"] == 2


@given(st.integers(0, 50), st.integers(0, 50), st.integers(0, 50))
def test_row_score_bounds(tp, fp, fn):
    row = RowScore(tp, fp, fn)
    assert 0.0 <= row.f1 <= 1.0
    assert row.f1 <= max(row.precision, row.recall) + 1e-12


class TestBaseline1:
    def stats(self, fraction):
        return Baseline1Stats({"because": fraction}, {"because": "Contingency"}, "Expansion", "EntRel")

    def test_frequent_discourse(self, lexicon):
        rels = baseline1_parse(load_doc("because"), self.stats(0.9), lexicon)
        (rel,) = [r for r in rels if r.is_explicit]
        assert rel.sense == "Contingency"
        assert rel.arg1 == TokenSpan((0, 1, 2))
        # everything after the connective in its sentence
        assert rel.arg2 == TokenSpan((4, 5, 6, 7))

    def test_half_is_not_discourse(self, lexicon):
        assert baseline1_parse(load_doc("because"), self.stats(0.5), lexicon) == []

    def test_unseen_surface(self, lexicon):
        assert baseline1_parse(load_doc("because"), Baseline1Stats({}, {}, "Expansion", "EntRel"), lexicon) == []

    def test_majority_nonexplicit_label(self, lexicon):
        doc = load_doc("two_para")
        rels = baseline1_parse(doc, Baseline1Stats({"however": 1.0}, {}, "Comparison", "EntRel"), lexicon)
        assert [r.relation_type for r in rels] == ["Explicit", "EntRel"]
        assert rels[0].sense == "Comparison"

    def test_stats_from_fixture(self, lexicon):
        doc = load_doc("two_para")
        stats = baseline1_stats([(doc, load_gold("two_para", doc))], lexicon)
        assert stats.discourse_fraction == {"however": 1.0}
        assert stats.connective_sense == {"however": "Comparison"}
        assert stats.nonexplicit_label == "EntRel"
        assert Baseline1Stats.from_json(stats.to_json()) == stats
