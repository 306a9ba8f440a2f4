"""Deterministic synthetic corpus with gold relations.

Sentences are assembled from small phrase templates so that every document
comes with a consistent constituent tree, dependency tree and gold
annotation.  Explicit connectives appear in subordinate, coordinate and
adverbial constructions; the same words also occur in non-discourse roles
(noun-phrase coordination, prepositional phrases).  Adjacent sentence pairs
without an explicit link carry a non-explicit label signalled by a cue word
in the second sentence.

Run ``python -m discparse.synthetic OUTDIR`` to write ``OUTDIR/docs`` and
``OUTDIR/gold``.
"""
from __future__ import annotations

import argparse
import json
import random
from dataclasses import dataclass, field
from pathlib import Path

from .corpus import DiscourseRelation, Document, TokenSpan, read_document, trim_punct, write_relations

SUBORDINATING = [
    ("because", "Contingency/Cause/Reason"),
    ("after", "Temporal/Asynchronous/Succession"),
    ("before", "Temporal/Asynchronous/Precedence"),
    ("although", "Comparison/Concession"),
    ("when", "Temporal/Synchrony"),
    ("unless", "Contingency/Condition"),
    ("if", "Contingency/Condition"),
]
COORDINATING = [
    ("and", "Expansion/Conjunction"),
    ("but", "Comparison/Contrast"),
    ("so", "Contingency/Cause/Result"),
]
ADVERBIAL = [
    ("however", "Comparison/Contrast"),
    ("then", "Temporal/Asynchronous/Precedence"),
    ("moreover", "Expansion/Conjunction"),
    ("therefore", "Contingency/Cause/Result"),
    ("instead", "Expansion/Alternative"),
    ("meanwhile", "Temporal/Synchrony"),
]

NOUNS = ["committee", "board", "company", "plan", "report", "market", "budget", "proposal",
         "deal", "team", "council", "price", "bank", "union", "court", "agency", "museum"]
PLURALS = ["investors", "workers", "officials", "analysts", "residents", "students", "farmers"]
ADJECTIVES = ["new", "local", "small", "large", "federal", "public"]
PRONOUNS = ["they", "we", "he", "she"]
VERBS = ["approved", "rejected", "reviewed", "announced", "delayed", "discussed", "signed",
         "changed", "supported", "criticized", "expanded", "praised", "questioned", "funded"]
INTRANSITIVE = ["resigned", "protested", "agreed", "waited", "complained", "collapsed"]
PP_NOUNS = ["meeting", "vote", "hearing", "election", "morning", "holiday"]
PLAIN_PREPS = ["in", "at", "with"]
PP_CONNECTIVES = ["after", "before", "since"]

# non-explicit label -> cue object for the second sentence of the pair
CUES = {
    "Contingency": ["consequences", "results"],
    "Comparison": ["differences", "contrasts"],
    "Expansion": ["details", "examples"],
    "Temporal": ["schedules", "deadlines"],
}
PAIR_LABELS = ["None", "EntRel", "Contingency", "Comparison", "Expansion", "Temporal"]
PAIR_WEIGHTS = [0.3, 0.14, 0.14, 0.14, 0.14, 0.14]


@dataclass
class Piece:
    words: list[tuple[str, str]]
    arcs: list[tuple[int, int, str]]
    head: int
    tree: str
    roles: list[str | None] = field(default_factory=list)

    def __post_init__(self):
        if not self.roles:
            self.roles = [None] * len(self.words)

    def mark(self, role: str) -> "Piece":
        self.roles = [r if r is not None else role for r in self.roles]
        return self


def leaf(word: str, pos: str) -> Piece:
    return Piece([(word, pos)], [], 0, f"({pos} {word})")


def phrase(label: str, children: list[Piece], head: int, rels: dict[int, str]) -> Piece:
    words, arcs, roles, offsets = [], [], [], []
    for child in children:
        off = len(words)
        offsets.append(off)
        words += child.words
        roles += child.roles
        arcs += [(h + off, d + off, lab) for h, d, lab in child.arcs]
    head_tok = offsets[head] + children[head].head
    for i, child in enumerate(children):
        if i != head:
            arcs.append((head_tok, offsets[i] + child.head, rels[i]))
    tree = f"({label} " + " ".join(c.tree for c in children) + ")"
    return Piece(words, arcs, head_tok, tree, roles)


class _Builder:
    def __init__(self, rng: random.Random):
        self.rng = rng

    def noun_phrase(self, allow_coord: bool = True) -> Piece:
        rng = self.rng
        kind = rng.random()
        if kind < 0.25:
            return phrase("NP", [leaf(rng.choice(PRONOUNS), "PRP")], 0, {})
        if kind < 0.45:
            np = phrase("NP", [leaf(rng.choice(PLURALS), "NNS")], 0, {})
        elif kind < 0.65:
            np = phrase("NP", [leaf("the", "DT"), leaf(rng.choice(ADJECTIVES), "JJ"),
                               leaf(rng.choice(NOUNS), "NN")], 2, {0: "det", 1: "amod"})
        else:
            np = phrase("NP", [leaf("the", "DT"), leaf(rng.choice(NOUNS), "NN")], 1, {0: "det"})
        if allow_coord and rng.random() < 0.15:
            other = self.noun_phrase(allow_coord=False)
            return phrase("NP", [np, leaf("and", "CC"), other], 0, {1: "cc", 2: "conj"})
        return np

    def object_np(self, cue: str | None) -> Piece | None:
        if cue == "EntRel":
            return phrase("NP", [leaf("them", "PRP")], 0, {})
        if cue in CUES:
            return phrase("NP", [leaf("the", "DT"), leaf(self.rng.choice(CUES[cue]), "NNS")], 1, {0: "det"})
        if self.rng.random() < 0.25:
            return None
        return phrase("NP", [leaf("the", "DT"), leaf(self.rng.choice(NOUNS), "NN")], 1, {0: "det"})

    def pp(self) -> Piece:
        rng = self.rng
        prep = rng.choice(PP_CONNECTIVES if rng.random() < 0.6 else PLAIN_PREPS)
        np = phrase("NP", [leaf("the", "DT"), leaf(rng.choice(PP_NOUNS), "NN")], 1, {0: "det"})
        return phrase("PP", [leaf(prep, "IN"), np], 0, {1: "pobj"})

    def verb_phrase(self, cue: str | None = None, extra: Piece | None = None) -> Piece:
        obj = self.object_np(cue)
        verb = self.rng.choice(VERBS if obj is not None else INTRANSITIVE)
        children, rels = [leaf(verb, "VBD")], {}
        if obj is not None:
            rels[len(children)] = "dobj"
            children.append(obj)
        if self.rng.random() < 0.3:
            rels[len(children)] = "prep"
            children.append(self.pp())
        if extra is not None:
            rels[len(children)] = "advcl"
            children.append(extra)
        return phrase("VP", children, 0, rels)

    def clause(self, cue: str | None = None) -> Piece:
        return phrase("S", [self.noun_phrase(), self.verb_phrase(cue)], 1, {0: "nsubj"})


def _finish(sentence: Piece) -> Piece:
    # tokens left unmarked (other than punctuation) belong to Arg1
    sentence.roles = [
        r if r is not None or pos in (".", ",") else "a1"
        for r, (_, pos) in zip(sentence.roles, sentence.words)
    ]
    return sentence


def build_sentence(rng: random.Random, kind: str, cue: str | None) -> tuple[Piece, str | None]:
    """One sentence of the given construction kind and the sense of its connective."""
    b = _Builder(rng)
    period = leaf(".", ".")
    if kind == "plain":
        subj, vp = b.noun_phrase(), b.verb_phrase(cue)
        return phrase("S", [subj, vp, period], 1, {0: "nsubj", 2: "punct"}), None
    if kind == "sub_mid":
        conn, sense = rng.choice(SUBORDINATING)
        sbar = phrase("SBAR", [leaf(conn, "IN").mark("c"), b.clause().mark("a2")], 1, {0: "mark"})
        subj, vp = b.noun_phrase(), b.verb_phrase(cue, extra=sbar)
        return _finish(phrase("S", [subj, vp, period], 1, {0: "nsubj", 2: "punct"})), sense
    if kind == "sub_init":
        conn, sense = rng.choice(SUBORDINATING)
        sbar = phrase("SBAR", [leaf(conn, "IN").mark("c"), b.clause().mark("a2")], 1, {0: "mark"})
        subj, vp = b.noun_phrase(), b.verb_phrase(cue)
        s = phrase("S", [sbar, leaf(",", ","), subj, vp, period], 3,
                   {0: "advcl", 1: "punct", 2: "nsubj", 4: "punct"})
        return _finish(s), sense
    if kind == "coord":
        conn, sense = rng.choice(COORDINATING)
        s = phrase("S", [b.clause(cue), leaf(conn, "CC").mark("c"), b.clause().mark("a2"), period], 0,
                   {1: "cc", 2: "conj", 3: "punct"})
        return _finish(s), sense
    if kind == "adv":
        conn, sense = rng.choice(ADVERBIAL)
        advp = phrase("ADVP", [leaf(conn, "RB").mark("c")], 0, {})
        subj, vp = b.noun_phrase(), b.verb_phrase()
        s = phrase("S", [advp, leaf(",", ","), subj, vp, period], 3,
                   {0: "advmod", 1: "punct", 2: "nsubj", 4: "punct"})
        s.roles = [r if r is not None or pos in (".", ",") else "a2" for r, (_, pos) in zip(s.roles, s.words)]
        return s, sense
    raise ValueError(kind)


KINDS = ["plain", "sub_mid", "sub_init", "coord", "adv"]
KIND_WEIGHTS = [0.3, 0.22, 0.12, 0.18, 0.18]


def generate_document(doc_id: str, rng: random.Random) -> tuple[Document, list[DiscourseRelation]]:
    n_sent = rng.randint(3, 8)
    tokens, sentences = [], []
    relations: list[dict] = []
    pieces: list[tuple[int, Piece]] = []
    paragraph = 0
    for si in range(n_sent):
        if si > 0 and rng.random() < 0.2:
            paragraph += 1
        same_par = si > 0 and sentences[-1]["paragraph"] == paragraph
        kind = rng.choices(KINDS, KIND_WEIGHTS)[0]
        if kind == "adv" and not same_par:
            kind = "plain"
        pair_label = None
        if same_par and kind != "adv":
            pair_label = rng.choices(PAIR_LABELS, PAIR_WEIGHTS)[0]
        cue = pair_label if pair_label not in (None, "None") else None
        piece, sense = build_sentence(rng, kind, cue)

        start = len(tokens)
        for i, (word, pos) in enumerate(piece.words):
            tokens.append({"t": word[0].upper() + word[1:] if i == 0 else word, "pos": pos})
        deps = [[h + start, d + start, lab] for h, d, lab in piece.arcs]
        deps.append([-1, piece.head + start, "root"])
        deps.sort(key=lambda a: a[1])
        words = [t["t"] for t in tokens[start:]]
        sentences.append({
            "start": start,
            "end": len(tokens) - 1,
            "paragraph": paragraph,
            "const": _with_words(piece.tree, words),
            "deps": deps,
        })
        local = lambda role: [start + i for i, r in enumerate(piece.roles) if r == role]
        prev_range = range(sentences[-2]["start"], start) if si > 0 else range(0)
        if sense is not None:
            arg1 = local("a1") if kind != "adv" else list(prev_range)
            relations.append({"relation_type": "Explicit", "connective": local("c"),
                              "arg1": arg1, "arg2": local("a2"), "sense": sense, "_trim1": kind == "adv"})
        if pair_label not in (None, "None"):
            relations.append({
                "relation_type": "EntRel" if pair_label == "EntRel" else "Implicit",
                "connective": None,
                "arg1": list(prev_range),
                "arg2": list(range(start, len(tokens))),
                "sense": None if pair_label == "EntRel" else pair_label,
                "_trim1": True,
                "_trim2": True,
            })
        pieces.append((start, piece))

    doc = read_document(json.dumps({"id": doc_id, "tokens": tokens, "sentences": sentences}))
    gold = []
    for rel in relations:
        arg1 = trim_punct(doc, rel["arg1"]) if rel.get("_trim1") else rel["arg1"]
        arg2 = trim_punct(doc, rel["arg2"]) if rel.get("_trim2") else rel["arg2"]
        gold.append(DiscourseRelation(
            rel["relation_type"], TokenSpan.of(arg1), TokenSpan.of(arg2),
            TokenSpan.of(rel["connective"]) if rel["connective"] else None, rel["sense"],
        ))
    return doc, gold


def _with_words(tree: str, words: list[str]) -> str:
    """Re-insert (possibly capitalized) words into a bracketed tree in order."""
    out, i = [], 0
    for part in tree.split(" "):
        if part.endswith(")") and not part.startswith("("):
            bare = part.rstrip(")")
            out.append(words[i] + part[len(bare):])
            i += 1
        else:
            out.append(part)
    return " ".join(out)


def generate_corpus(n_docs: int = 300, seed: int = 13) -> list[tuple[Document, list[DiscourseRelation]]]:
    rng = random.Random(seed)
    return [generate_document(f"syn_{i:04d}", rng) for i in range(n_docs)]


def split_corpus(corpus, test_fraction: float = 0.2):
    """First part for training, last part held out."""
    cut = int(round(len(corpus) * (1 - test_fraction)))
    return corpus[:cut], corpus[cut:]


def write_corpus(corpus, docs_dir: str | Path, gold_dir: str | Path) -> None:
    from .corpus import document_to_json

    docs_dir, gold_dir = Path(docs_dir), Path(gold_dir)
    docs_dir.mkdir(parents=True, exist_ok=True)
    gold_dir.mkdir(parents=True, exist_ok=True)
    for doc, gold in corpus:
        (docs_dir / f"{doc.id}.json").write_text(document_to_json(doc), encoding="utf-8")
        (gold_dir / f"{doc.id}.json").write_text(write_relations(gold), encoding="utf-8")


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description="Write the synthetic corpus (train/test split) to disk.")
    ap.add_argument("out", help="output directory")
    ap.add_argument("--docs", type=int, default=300)
    ap.add_argument("--seed", type=int, default=13)
    args = ap.parse_args(argv)
    train, test = split_corpus(generate_corpus(args.docs, args.seed))
    out = Path(args.out)
    write_corpus(train, out / "train" / "docs", out / "train" / "gold")
    write_corpus(test, out / "test" / "docs", out / "test" / "gold")


if __name__ == "__main__":
    main()
