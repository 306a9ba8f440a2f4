"""Stage 1: lexicon scan and discourse/non-discourse usage classification."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Sequence

from . import maxent
from .corpus import ConnectiveLexiconEntry, DiscourseRelation, Document, TokenSpan
from .syntax import (
    NONE,
    left_sibling_category,
    parent_category,
    right_sibling_category,
    right_sibling_contains_vp,
    self_category,
)

log = logging.getLogger(__name__)

DISCOURSE = "discourse"
NON_DISCOURSE = "non-discourse"


@dataclass(frozen=True)
class ConnectiveCandidate:
    span: TokenSpan
    entry: ConnectiveLexiconEntry | None
    sentence_index: int

    @property
    def category(self) -> str:
        return self.entry.category if self.entry is not None else NONE


def _index(lexicon: Iterable[ConnectiveLexiconEntry]) -> dict[str, list[ConnectiveLexiconEntry]]:
    by_first: dict[str, list[ConnectiveLexiconEntry]] = {}
    for entry in lexicon:
        by_first.setdefault(entry.surface[0], []).append(entry)
    return by_first


def scan_candidates(doc: Document, lexicon: Sequence[ConnectiveLexiconEntry]) -> list[ConnectiveCandidate]:
    """Case-insensitive lexicon matches, longest match first, no overlaps."""
    by_first = _index(lexicon)
    found: list[ConnectiveCandidate] = []
    for sent in doc.sentences:
        words = [t.text.lower() for t in doc.tokens[sent.start:sent.end + 1]]
        matches = []
        for i, w in enumerate(words):
            for entry in by_first.get(w, ()):
                n = len(entry.surface)
                if tuple(words[i:i + n]) == entry.surface:
                    matches.append((i, n, entry))
        matches.sort(key=lambda m: (-m[1], m[0]))
        taken: set[int] = set()
        for i, n, entry in matches:
            cover = range(i, i + n)
            if taken.isdisjoint(cover):
                taken.update(cover)
                span = TokenSpan(tuple(sent.start + j for j in cover))
                found.append(ConnectiveCandidate(span, entry, sent.index))
    found.sort(key=lambda c: c.span.first)
    return found


def candidate_for_span(
    doc: Document, span: TokenSpan, lexicon: Sequence[ConnectiveLexiconEntry]
) -> ConnectiveCandidate:
    """Wrap an externally given connective span (e.g. gold) with its lexicon entry."""
    surface = tuple(doc.tokens[p].text.lower() for p in span)
    entry = next((e for e in lexicon if e.surface == surface), None)
    return ConnectiveCandidate(span, entry, doc.tokens[span.first].sentence_index)


def connective_features(doc: Document, cand: ConnectiveCandidate) -> tuple[str, ...]:
    tree = doc.sentences[cand.sentence_index].constituent_tree
    sent = doc.sentences[cand.sentence_index]
    span = cand.span
    self_cat = self_category(tree, span)
    word_pos = doc.tokens[span.first].pos if len(span) == 1 else self_cat
    prev_pos = doc.tokens[span.first - 1].pos if span.first > sent.start else NONE
    next_pos = doc.tokens[span.last + 1].pos if span.last < sent.end else NONE
    word = " ".join(doc.tokens[p].text.lower() for p in span)
    return (
        f"selfCat={self_cat}",
        f"parentCat={parent_category(tree, span)}",
        f"leftSib={left_sibling_category(tree, span)}",
        f"rightSib={right_sibling_category(tree, span)}",
        f"word={word}",
        f"rightVP={'true' if right_sibling_contains_vp(tree, span) else 'false'}",
        f"prevPOS={prev_pos}",
        f"prevPOS+wordPOS={prev_pos}&{word_pos}",
        f"nextPOS={next_pos}",
        f"nextPOS+wordPOS={next_pos}&{word_pos}",
    )


def discourse_probability(doc: Document, model: maxent.MaxentModel, cand: ConnectiveCandidate) -> float:
    return model.prob(connective_features(doc, cand), DISCOURSE)


def identify_connectives(
    doc: Document,
    model: maxent.MaxentModel,
    lexicon: Sequence[ConnectiveLexiconEntry],
    threshold: float = 0.5,
) -> list[ConnectiveCandidate]:
    if not model.is_trained:
        raise maxent.MaxentError("connective model is not trained")
    return [
        cand for cand in scan_candidates(doc, lexicon)
        if discourse_probability(doc, model, cand) > threshold
    ]


def connective_instances(
    doc: Document, gold: Iterable[DiscourseRelation], lexicon: Sequence[ConnectiveLexiconEntry]
) -> list[maxent.LabeledInstance]:
    gold_spans = {r.connective for r in gold if r.is_explicit}
    return [
        maxent.LabeledInstance(
            connective_features(doc, cand),
            DISCOURSE if cand.span in gold_spans else NON_DISCOURSE,
        )
        for cand in scan_candidates(doc, lexicon)
    ]


def train_connective_stage(
    corpus: Sequence[tuple[Document, Sequence[DiscourseRelation]]],
    lexicon: Sequence[ConnectiveLexiconEntry],
    config: maxent.TrainConfig = maxent.TrainConfig(),
) -> maxent.MaxentModel:
    data = []
    for doc, gold in corpus:
        data.extend(connective_instances(doc, gold, lexicon))
    if not data:
        raise maxent.MaxentError("no connective candidates found in the training corpus")
    log.info("connective stage: %d instances", len(data))
    return maxent.train(data, config)
