import pytest

from discparse.corpus import TokenSpan, write_relations
from discparse.maxent import TrainConfig
from discparse.pipeline import (
    INDICATOR_FILE,
    MODEL_FILES,
    ModelSet,
    ParserConfig,
    TrainingError,
    parse_corpus,
    parse_document,
    train_all,
)
from discparse.sense import NONEXPLICIT_TYPES
from helpers import flat_sentence, load_doc, make_doc


def test_no_matches_single_sentence(trained, lexicon):
    doc = make_doc("q", [flat_sentence("Dogs/NNS bark/VBP ./.")])
    assert parse_document(doc, trained, lexicon=lexicon) == []


def test_because_fixture(trained, lexicon):
    doc = load_doc("because")
    (rel,) = parse_document(doc, trained, lexicon=lexicon)
    assert rel.relation_type == "Explicit"
    assert rel.connective == TokenSpan((3,))
    assert rel.arg1 == TokenSpan((0, 1, 2)) and rel.arg2 == TokenSpan((4, 5, 6))
    assert rel.sense_class == "Contingency"


def test_remaining_pairs_get_decisions(trained, lexicon):
    doc = load_doc("two_para")
    rels = parse_document(doc, trained, lexicon=lexicon)
    explicit = [r for r in rels if r.is_explicit]
    assert [r.connective for r in explicit] == [TokenSpan((3,))]
    # pair (1, 2) is the only candidate for a non-explicit relation
    for r in rels:
        if not r.is_explicit:
            assert (doc.sentence_of(r.arg1.first).index, doc.sentence_of(r.arg2.first).index) == (1, 2)


def test_gold_connectives_override(trained, lexicon):
    doc = load_doc("two_para")
    rels = parse_document(doc, trained, lexicon=lexicon, connectives=[])
    assert not any(r.is_explicit for r in rels)


def test_empty_lexicon_gives_only_nonexplicit(synthetic_split, trained):
    _, test = synthetic_split
    for doc, _ in test[:15]:
        assert all(r.relation_type in NONEXPLICIT_TYPES for r in parse_document(doc, trained, lexicon=[]))


def test_parse_is_deterministic(synthetic_split, trained, lexicon):
    _, test = synthetic_split
    docs = [d for d, _ in test]
    a = parse_corpus(docs, trained, lexicon=lexicon)
    b = parse_corpus(docs, trained, lexicon=lexicon)
    assert {k: write_relations(v) for k, v in a.items()} == {k: write_relations(v) for k, v in b.items()}


def test_diagnostics_collected(trained, lexicon):
    doc = make_doc("e", [flat_sentence("They/PRP left/VBD ./."), flat_sentence("However/RB ,/, it/PRP ./.")])
    diags: list[str] = []
    parse_document(doc, trained, lexicon=lexicon, connectives=[TokenSpan((3,))], diagnostics=diags)
    assert any("empty Arg2" in d for d in diags)


def test_save_load_and_retrain_identical(tmp_path, synthetic_split, trained, lexicon):
    written = trained.save(tmp_path / "a")
    assert sorted(p.name for p in written) == sorted(list(MODEL_FILES.values()) + [INDICATOR_FILE])
    again = train_all(synthetic_split[0], lexicon=lexicon)
    again.save(tmp_path / "b")
    for p in written:
        assert p.read_bytes() == (tmp_path / "b" / p.name).read_bytes()
    loaded = ModelSet.load(tmp_path / "a")
    assert loaded.connective == trained.connective and loaded.indicators == trained.indicators


def test_missing_nonexplicit_gold_names_stage(synthetic_split, lexicon):
    train, _ = synthetic_split
    explicit_only = [(doc, [r for r in gold if r.is_explicit]) for doc, gold in train[:40]]
    with pytest.raises(TrainingError, match="non-explicit.*single-label data") as err:
        train_all(explicit_only, lexicon=lexicon)
    assert err.value.stage == "non-explicit"


def test_no_connectives_names_stage(lexicon):
    doc = make_doc("n", [flat_sentence("Dogs/NNS bark/VBP")])
    with pytest.raises(TrainingError, match="connective"):
        train_all([(doc, [])], lexicon=lexicon)


@pytest.mark.parametrize("kwargs", [{"step_bound": 0}, {"threshold": 1.0}, {"indicator_k": 0}])
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        ParserConfig(**kwargs)


def test_train_config_passed_through(synthetic_split, lexicon):
    models = train_all(synthetic_split[0][:30], ParserConfig(train=TrainConfig(max_iters=3)), lexicon)
    assert models.connective.meta["iterations"] <= 3
