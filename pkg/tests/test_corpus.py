import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from discparse.corpus import (
    DiscourseRelation,
    DocumentError,
    TokenSpan,
    default_lexicon,
    document_to_json,
    read_document,
    read_lexicon,
    read_relations,
    trim_punct,
    write_relations,
)
from helpers import doc_dict, fixture_names, fixture_text, load_doc, load_gold, make_doc


def three_token_doc():
    return doc_dict("mini", [("Prices/NNS rose/VBD ./.", "(ROOT (NNS Prices) (VBD rose) (. .))",
                              [(1, "nsubj"), (-1, "root"), (1, "punct")], 0)])


class TestReadDocument:
    def test_minimal_flat_tree(self):
        doc = read_document(json.dumps(three_token_doc()))
        assert len(doc.sentences) == 1
        assert len(doc.sentences[0].constituent_tree.leaves) == 3
        assert [t.text for t in doc.tokens] == ["Prices", "rose", "."]

    def test_leaf_token_mismatch(self):
        d = three_token_doc()
        d["sentences"][0]["const"] = "(ROOT (NNS Prices) (VBD rose))"
        with pytest.raises(DocumentError, match="leaf/token mismatch"):
            read_document(json.dumps(d))

    def test_two_paragraph_fixture(self):
        doc = load_doc("two_para")
        assert [s.paragraph_index for s in doc.sentences] == [0, 0, 0, 1]
        assert [s.index for s in doc.sentences] == [0, 1, 2, 3]

    def test_malformed_json(self):
        with pytest.raises(DocumentError, match="malformed JSON"):
            read_document("{not json")

    def test_dangling_arc(self):
        d = three_token_doc()
        d["sentences"][0]["deps"][0] = [7, 0, "nsubj"]
        with pytest.raises(DocumentError, match="dangling token index"):
            read_document(json.dumps(d))

    def test_cross_sentence_arc_is_dangling(self):
        d = doc_dict("x", [("A/NN", "(ROOT (NN A))", [(-1, "root")], 0),
                           ("B/NN", "(ROOT (NN B))", [(-1, "root")], 0)])
        d["sentences"][1]["deps"] = [[0, 1, "dep"]]
        with pytest.raises(DocumentError, match="dangling"):
            read_document(json.dumps(d))

    def test_multiple_heads(self):
        d = three_token_doc()
        d["sentences"][0]["deps"].append([2, 0, "dep"])
        with pytest.raises(DocumentError, match="multiple dependency heads"):
            read_document(json.dumps(d))

    def test_missing_head(self):
        d = three_token_doc()
        del d["sentences"][0]["deps"][2]
        with pytest.raises(DocumentError, match="exactly one head"):
            read_document(json.dumps(d))

    def test_cycle(self):
        d = doc_dict("c", [("a/NN b/NN c/NN", "(ROOT (NN a) (NN b) (NN c))",
                            [(-1, "root"), (2, "dep"), (1, "dep")], 0)])
        with pytest.raises(DocumentError, match="cycle"):
            read_document(json.dumps(d))

    def test_paragraph_must_not_decrease(self):
        d = doc_dict("p", [("A/NN", "(ROOT (NN A))", [(-1, "root")], 0),
                           ("B/NN", "(ROOT (NN B))", [(-1, "root")], 1),
                           ("C/NN", "(ROOT (NN C))", [(-1, "root")], 0)])
        with pytest.raises(DocumentError, match="paragraph"):
            read_document(json.dumps(d))

    def test_sentences_must_be_adjacent(self):
        d = three_token_doc()
        d["sentences"][0]["start"] = 1
        with pytest.raises(DocumentError, match="adjacent"):
            read_document(json.dumps(d))

    def test_unbalanced_tree(self):
        d = three_token_doc()
        d["sentences"][0]["const"] = "(ROOT (NNS Prices) (VBD rose) (. .)"
        with pytest.raises(DocumentError, match="unbalanced"):
            read_document(json.dumps(d))

    @pytest.mark.parametrize("name", fixture_names())
    def test_fixture_round_trip(self, name):
        doc = load_doc(name)
        again = read_document(document_to_json(doc))
        assert document_to_json(again) == document_to_json(doc)
        assert [t for t in again.tokens] == list(doc.tokens)

    @pytest.mark.parametrize("name", fixture_names())
    def test_node_spans_are_union_of_children(self, name):
        for sent in load_doc(name).sentences:
            tree = sent.constituent_tree
            assert [leaf.token for leaf in tree.leaves] == list(sent.token_range)
            for node in tree.root.iter_nodes():
                if node.children:
                    covered = [t for c in node.children for t in c.tokens()]
                    assert covered == list(node.tokens())


class TestRelations:
    def test_explicit_unless_accepted(self):
        doc = make_doc("u", [("They/PRP stay/VBP unless/IN it/PRP rains/VBZ",
                              "(ROOT (S (NP (PRP They)) (VP (VBP stay) (SBAR (IN unless) (S (NP (PRP it)) (VP (VBZ rains)))))))",
                              [(1, "nsubj"), (-1, "root"), (4, "mark"), (4, "nsubj"), (1, "advcl")], 0)])
        text = json.dumps([{"relation_type": "Explicit", "connective": [2], "arg1": [0, 1],
                            "arg2": [3, 4], "sense": "Contingency"}])
        (rel,) = read_relations(text, doc)
        assert rel.sense_class == "Contingency"
        assert rel.connective == TokenSpan((2,))

    def test_implicit_arg1_after_arg2(self):
        doc = load_doc("two_para")
        text = json.dumps([{"relation_type": "Implicit", "connective": None, "arg1": [8, 9],
                            "arg2": [0, 1], "sense": "Expansion"}])
        with pytest.raises(DocumentError, match="Arg1 must precede Arg2 for non-explicit"):
            read_relations(text, doc)

    def test_entrel_with_sense(self):
        doc = load_doc("two_para")
        text = json.dumps([{"relation_type": "EntRel", "connective": None, "arg1": [0, 1],
                            "arg2": [3, 4], "sense": "Expansion"}])
        with pytest.raises(DocumentError, match="EntRel carries no sense"):
            read_relations(text, doc)

    def test_span_out_of_range(self):
        doc = load_doc("because")
        text = json.dumps([{"relation_type": "EntRel", "arg1": [0], "arg2": [99]}])
        with pytest.raises(DocumentError, match="out of range"):
            read_relations(text, doc)

    def test_explicit_needs_connective(self):
        with pytest.raises(DocumentError, match="missing connective"):
            DiscourseRelation("Explicit", TokenSpan((0,)), TokenSpan((1,)), sense="Expansion")

    def test_overlapping_args(self):
        with pytest.raises(DocumentError, match="overlapping"):
            DiscourseRelation("Explicit", TokenSpan((0, 1)), TokenSpan((1, 2)), TokenSpan((3,)), "Expansion")

    def test_dotted_sense_normalized(self):
        doc = load_doc("because")
        text = json.dumps([{"relation_type": "Explicit", "connective": [3], "arg1": [0, 1, 2],
                            "arg2": [4, 5, 6], "sense": "Contingency.Cause.Reason"}])
        assert read_relations(text, doc)[0].sense == "Contingency/Cause/Reason"

    def test_write_empty(self):
        assert write_relations([]) == "[]"

    def test_write_single_explicit(self):
        doc = load_doc("because")
        gold = load_gold("because", doc)
        data = json.loads(write_relations(gold))
        assert data[0]["relation_type"] == "Explicit"
        assert list(data[0]) == ["relation_type", "connective", "arg1", "arg2", "sense"]

    @pytest.mark.parametrize("name", ["after", "because", "two_para"])
    def test_fixture_relations_round_trip(self, name):
        doc = load_doc(name)
        gold = load_gold(name, doc)
        assert read_relations(write_relations(gold), doc) == gold


class TestLexicon:
    def test_single_word(self):
        (entry,) = read_lexicon("because\tSubordinating\n")
        assert entry.surface == ("because",)
        assert entry.category == "Subordinating"

    def test_multiword(self):
        (entry,) = read_lexicon("as long as\tSubordinating")
        assert entry.surface == ("as", "long", "as")

    def test_duplicate(self):
        with pytest.raises(DocumentError, match="duplicate"):
            read_lexicon("but\tCoordinating\nbut\tCoordinating\n")

    def test_unknown_category(self):
        with pytest.raises(DocumentError, match="unknown category"):
            read_lexicon("but\tConjunction\n")

    def test_comments_and_blank_lines(self):
        assert len(read_lexicon("# header\n\nso\tCoordinating\n")) == 1

    def test_bundled_lexicon(self):
        lex = default_lexicon()
        surfaces = {e.text for e in lex}
        assert {"because", "after", "however", "as long as", "if"} <= surfaces
        assert len(surfaces) == len(lex)


def test_trim_punct():
    doc = load_doc("two_para")
    assert trim_punct(doc, range(3, 8)) == [3, 4, 5, 6]
    assert trim_punct(doc, [2]) == []


@st.composite
def mutated_documents(draw):
    """Fixture documents with one random structural edit."""
    d = json.loads(fixture_text(draw(st.sampled_from(fixture_names())) + ".json"))
    sents = d["sentences"]
    si = draw(st.integers(0, len(sents) - 1))
    kind = draw(st.sampled_from(["start", "end", "paragraph", "head", "drop_arc", "tree", "drop_token"]))
    s = sents[si]
    if kind in ("start", "end", "paragraph"):
        s[kind] += draw(st.integers(-2, 2))
    elif kind == "head":
        arc = s["deps"][draw(st.integers(0, len(s["deps"]) - 1))]
        arc[0] = draw(st.integers(-1, len(d["tokens"])))
    elif kind == "drop_arc":
        s["deps"].pop(draw(st.integers(0, len(s["deps"]) - 1)))
    elif kind == "tree":
        cut = draw(st.integers(0, len(s["const"]) - 1))
        s["const"] = s["const"][:cut] + s["const"][cut + 1:]
    else:
        d["tokens"].pop(draw(st.integers(0, len(d["tokens"]) - 1)))
    return json.dumps(d)


@settings(max_examples=300, deadline=None)
@given(mutated_documents())
def test_mutated_documents_are_valid_or_rejected(text):
    try:
        doc = read_document(text)
    except DocumentError:
        return
    # anything accepted satisfies the structural invariants
    assert [t.index for t in doc.tokens] == list(range(len(doc.tokens)))
    expected = 0
    for prev, sent in zip((None,) + doc.sentences, doc.sentences):
        assert sent.start == expected
        expected = sent.end + 1
        assert len(sent.constituent_tree.leaves) == len(sent)
        assert set(sent.dependency_graph.heads) == set(sent.token_range)
        if prev is not None:
            assert sent.paragraph_index - prev.paragraph_index in (0, 1)
    assert expected == len(doc.tokens)
