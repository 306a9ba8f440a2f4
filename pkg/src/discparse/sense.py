"""Stages 3 and 4: explicit sense classification and non-explicit relations."""
from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from . import maxent
from .arguments import connective_position
from .connective import ConnectiveCandidate, candidate_for_span
from .corpus import (
    SENSE_CLASSES,
    ConnectiveLexiconEntry,
    DiscourseRelation,
    Document,
    TokenSpan,
    is_punct,
    trim_punct,
)
from .syntax import NONE, parent_category, self_category

log = logging.getLogger(__name__)

ENTREL = "EntRel"
NO_RELATION = "None"
NONEXPLICIT_LABELS = SENSE_CLASSES + (ENTREL, NO_RELATION)
NONEXPLICIT_TYPES = ("Implicit", "AltLex", "EntRel")


@dataclass(frozen=True)
class SenseLabel:
    sense_class: str
    type: str | None = None
    subtype: str | None = None

    def __post_init__(self):
        if self.sense_class not in SENSE_CLASSES:
            raise ValueError(f"unknown sense class {self.sense_class!r}")
        if self.subtype is not None and self.type is None:
            raise ValueError("sense subtype given without a type")

    @classmethod
    def parse(cls, path: str) -> "SenseLabel":
        parts = path.replace(".", "/").split("/")
        return cls(*parts[:3])

    def path(self) -> str:
        return "/".join(p for p in (self.sense_class, self.type, self.subtype) if p is not None)


# ------------------------------------------------------------- explicit


def explicit_sense_features(
    doc: Document, conn: ConnectiveCandidate, arg1: TokenSpan | None = None, arg2: TokenSpan | None = None
) -> tuple[str, ...]:
    # the argument spans are accepted for interface symmetry; no feature reads them
    tree = doc.sentences[conn.sentence_index].constituent_tree
    sent = doc.sentences[conn.sentence_index]
    first = conn.span.first
    prev = doc.tokens[first - 1].text.lower() if first > sent.start else NONE
    return (
        "connLower=" + " ".join(doc.tokens[p].text.lower() for p in conn.span),
        f"selfCat={self_category(tree, conn.span)}",
        f"parentCat={parent_category(tree, conn.span)}",
        f"connPos={connective_position(doc, conn.span)}",
        f"connType={conn.category}",
        f"prevWord={prev}",
    )


def classify_explicit_sense(model: maxent.MaxentModel, features: Iterable[str]) -> SenseLabel:
    """Argmax class; ties resolve in alphabetical label order."""
    return SenseLabel(model.classify(features))


def train_sense_stage(
    corpus: Sequence[tuple[Document, Sequence[DiscourseRelation]]],
    lexicon: Sequence[ConnectiveLexiconEntry],
    config: maxent.TrainConfig = maxent.TrainConfig(),
) -> maxent.MaxentModel:
    data = []
    for doc, gold in corpus:
        for rel in gold:
            if not rel.is_explicit:
                continue
            conn = candidate_for_span(doc, rel.connective, lexicon)
            if doc.tokens[rel.connective.last].sentence_index != conn.sentence_index:
                continue
            feats = explicit_sense_features(doc, conn, rel.arg1, rel.arg2)
            data.append(maxent.LabeledInstance(feats, rel.sense_class))
    log.info("explicit sense stage: %d instances", len(data))
    return maxent.train(data, config)


# ---------------------------------------------------------- non-explicit


def _sentences_touched(doc: Document, span: TokenSpan) -> set[int]:
    return {doc.tokens[p].sentence_index for p in span}


def nonexplicit_pairs(doc: Document, explicit: Iterable[DiscourseRelation]) -> list[tuple[int, int]]:
    """Adjacent same-paragraph sentence pairs not already linked explicitly."""
    linked = set()
    for rel in explicit:
        if not rel.is_explicit:
            continue
        s1 = _sentences_touched(doc, rel.arg1)
        s2 = _sentences_touched(doc, rel.arg2)
        for i in s1:
            for j in s2:
                linked.add((min(i, j), max(i, j)))
    pairs = []
    for a, b in zip(doc.sentences, doc.sentences[1:]):
        if a.paragraph_index == b.paragraph_index and (a.index, b.index) not in linked:
            pairs.append((a.index, b.index))
    return pairs


def _words(doc: Document, sentence_index: int) -> list[str]:
    sent = doc.sentences[sentence_index]
    return [doc.tokens[t].text.lower() for t in sent.token_range if not is_punct(doc.tokens[t].pos)]


def build_indicator_lexicon(
    corpus: Sequence[tuple[Document, Sequence[DiscourseRelation]]], k: int = 100
) -> list[str]:
    """The ``k`` most frequent lowercased Arg2 words of non-explicit relations."""
    counts: Counter[str] = Counter()
    n_rel = 0
    for doc, gold in corpus:
        for rel in gold:
            if rel.relation_type in NONEXPLICIT_TYPES:
                n_rel += 1
                counts.update(
                    doc.tokens[p].text.lower() for p in rel.arg2 if not is_punct(doc.tokens[p].pos)
                )
    if n_rel == 0:
        raise maxent.MaxentError("no non-explicit relations to build the indicator lexicon from")
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return [w for w, _ in ranked[:k]]


def _bucket(n: int) -> str:
    return str(n) if n < 3 else "3+"


def nonexplicit_features(doc: Document, pair: tuple[int, int], indicators: Iterable[str]) -> tuple[str, ...]:
    w1 = _words(doc, pair[0])
    w2 = _words(doc, pair[1])
    first1, last1 = (w1[0], w1[-1]) if w1 else (NONE, NONE)
    first2, last2 = (w2[0], w2[-1]) if w2 else (NONE, NONE)
    feats = [
        f"arg1First={first1}",
        f"arg1Last={last1}",
        f"arg2First={first2}",
        f"arg2Last={last2}",
        f"firstPair={first1}&{first2}",
        f"commonWords={_bucket(len(set(w1) & set(w2)))}",
    ]
    types1, types2 = set(w1), set(w2)
    for w in indicators:
        if w in types2:
            feats.append(f"ind2={w}")
        if w in types1:
            feats.append(f"ind1={w}")
    return tuple(feats)


def classify_nonexplicit(model: maxent.MaxentModel, features: Iterable[str]) -> str:
    return model.classify(features)


def nonexplicit_relation(doc: Document, pair: tuple[int, int], label: str) -> DiscourseRelation | None:
    """The relation emitted for a classified pair; ``None`` for the no-relation label."""
    if label == NO_RELATION:
        return None
    arg1 = trim_punct(doc, doc.sentences[pair[0]].token_range)
    arg2 = trim_punct(doc, doc.sentences[pair[1]].token_range)
    if not arg1 or not arg2:
        return None
    if label == ENTREL:
        return DiscourseRelation("EntRel", TokenSpan.of(arg1), TokenSpan.of(arg2))
    return DiscourseRelation("Implicit", TokenSpan.of(arg1), TokenSpan.of(arg2), sense=label)


def gold_pair_label(doc: Document, pair: tuple[int, int], gold: Iterable[DiscourseRelation]) -> str:
    for rel in gold:
        if rel.relation_type not in NONEXPLICIT_TYPES:
            continue
        if pair[0] in _sentences_touched(doc, rel.arg1) and pair[1] in _sentences_touched(doc, rel.arg2):
            return ENTREL if rel.relation_type == ENTREL else (rel.sense_class or NO_RELATION)
    return NO_RELATION


def nonexplicit_instances(
    doc: Document, gold: Sequence[DiscourseRelation], indicators: Sequence[str]
) -> list[maxent.LabeledInstance]:
    return [
        maxent.LabeledInstance(nonexplicit_features(doc, pair, indicators), gold_pair_label(doc, pair, gold))
        for pair in nonexplicit_pairs(doc, gold)
    ]


def train_nonexplicit_stage(
    corpus: Sequence[tuple[Document, Sequence[DiscourseRelation]]],
    indicators: Sequence[str],
    config: maxent.TrainConfig = maxent.TrainConfig(),
) -> maxent.MaxentModel:
    data = []
    for doc, gold in corpus:
        data.extend(nonexplicit_instances(doc, gold, indicators))
    log.info("non-explicit stage: %d instances", len(data))
    return maxent.train(data, config)
