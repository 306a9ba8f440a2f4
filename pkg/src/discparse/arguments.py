"""Stage 2: head-based Arg1/Arg2 identification for explicit connectives.

Each argument is found by ranking candidate head words with a maxent model
and projecting the winning head to a token span over the constituent tree.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from . import maxent
from .connective import ConnectiveCandidate, candidate_for_span
from .corpus import (
    ConnectiveLexiconEntry,
    DiscourseRelation,
    Document,
    TokenSpan,
    TreeNode,
    trim_punct,
)
from .syntax import NONE, SpanError, collapsed_path, const_path, dep_path, step_distance

log = logging.getLogger(__name__)

ARG1, ARG2 = "Arg1", "Arg2"
HEAD, NOT_HEAD = "head", "not-head"
STEP_BOUND = 10


def is_candidate_pos(pos: str) -> bool:
    """Verbs, common nouns and adjectives."""
    return pos.startswith("VB") or pos in ("NN", "NNS") or pos.startswith("JJ")


def span_head(doc: Document, positions: Iterable[int]) -> int:
    """Leftmost token of the span whose dependency head lies outside the span."""
    pset = set(positions)
    for p in sorted(pset):
        if doc.sentence_of(p).dependency_graph.head(p) not in pset:
            return p
    raise ValueError("span has no outward-pointing token")


def arg1_candidates(doc: Document, conn: ConnectiveCandidate, bound: int = STEP_BOUND) -> list[int]:
    head = span_head(doc, conn.span)
    in_conn = set(conn.span)
    out = []
    for si in range(max(0, conn.sentence_index - bound), conn.sentence_index + 1):
        sent = doc.sentences[si]
        for t in sent.token_range:
            if t in in_conn or not is_candidate_pos(doc.tokens[t].pos):
                continue
            if step_distance(doc, t, head) <= bound:
                out.append(t)
    return out


def arg2_candidates(doc: Document, conn: ConnectiveCandidate) -> list[int]:
    sent = doc.sentences[conn.sentence_index]
    in_conn = set(conn.span)
    return [
        t for t in sent.token_range
        if t not in in_conn and is_candidate_pos(doc.tokens[t].pos)
    ]


def connective_position(doc: Document, span: TokenSpan) -> str:
    sent = doc.sentence_of(span.first)
    r = (span.first - sent.start) / len(sent)
    if r < 0.2:
        return "beginning"
    if r > 0.8:
        return "end"
    return "middle"


def argument_features(doc: Document, conn: ConnectiveCandidate, token: int) -> tuple[str, ...]:
    span = conn.span
    sent = doc.sentences[conn.sentence_index]
    same = doc.tokens[token].sentence_index == conn.sentence_index
    surface = " ".join(doc.tokens[p].text for p in span)
    where = connective_position(doc, span)
    if same:
        path = const_path(sent.constituent_tree, token, span)
        path_str, collapsed, hops = path.render(), collapsed_path(path), str(path.hops)
        dpath = dep_path(sent.dependency_graph, token, span_head(doc, span)).render()
    else:
        path_str = collapsed = hops = dpath = NONE
    return (
        f"sameSent={'true' if same else 'false'}",
        f"conn={surface}",
        f"connLower={surface.lower()}",
        f"candWord={doc.tokens[token].text.lower()}",
        f"relPos={'before' if token < span.first else 'after'}",
        f"connPos={where}",
        f"conn&connPos={surface}&{where}",
        f"constPath={path_str}",
        f"collapsedPath={collapsed}",
        f"pathLen={hops}",
        f"depPath={dpath}",
        f"connType={conn.category}",
    )


def _best(doc: Document, conn: ConnectiveCandidate, candidates: list[int], model: maxent.MaxentModel):
    if not candidates:
        return None
    head = span_head(doc, conn.span)
    # higher score, then nearer by step distance, then smaller index
    return max(
        candidates,
        key=lambda t: (
            model.prob(argument_features(doc, conn, t), HEAD),
            -step_distance(doc, t, head),
            -t,
        ),
    )


def rank_heads(
    doc: Document,
    conn: ConnectiveCandidate,
    model_arg1: maxent.MaxentModel,
    model_arg2: maxent.MaxentModel,
    bound: int = STEP_BOUND,
) -> tuple[int | None, int | None]:
    return (
        _best(doc, conn, arg1_candidates(doc, conn, bound), model_arg1),
        _best(doc, conn, arg2_candidates(doc, conn), model_arg2),
    )


def _same_side(node: TreeNode, head: int, conn: TokenSpan) -> bool:
    if head < conn.first:
        return node.end < conn.first
    return node.start > conn.last


def project_span(
    doc: Document,
    head: int,
    conn: TokenSpan,
    which: str,
    other: Iterable[int] = (),
) -> TokenSpan:
    """Grow a chosen head into an argument span.

    Starts from the largest constituent containing ``head`` but no connective
    token.  If that constituent is not the sentence root, connective-free
    sibling constituents on the head's side of the connective are added: at
    the first connective-bearing ancestor only for Arg2, at every ancestor up
    to the root for Arg1.  Connective tokens and ``other`` are then removed and
    edge punctuation trimmed; the head itself always survives unless it was
    among the removed tokens.
    """
    tree = doc.sentence_of(head).constituent_tree
    in_conn = set(conn)
    node = tree.preterminal(head)
    while node.parent is not None and not node.parent.overlaps(in_conn):
        node = node.parent
    tokens = set(node.tokens())
    child = node
    ancestor = node.parent
    while ancestor is not None:
        for sib in ancestor.children:
            if sib is not child and not sib.overlaps(in_conn) and _same_side(sib, head, conn):
                tokens.update(sib.tokens())
        if which == ARG2:
            break
        child, ancestor = ancestor, ancestor.parent
    excluded = in_conn | set(other)
    kept = set(trim_punct(doc, tokens - excluded))
    if head not in excluded or not kept:
        kept.add(head)
    return TokenSpan.of(kept)


def fallback_arg1(doc: Document, conn: ConnectiveCandidate) -> list[int]:
    """Previous sentence, or the pre-connective part of the connective's own sentence."""
    if conn.sentence_index > 0:
        prev = doc.sentences[conn.sentence_index - 1]
        return trim_punct(doc, prev.token_range)
    sent = doc.sentences[conn.sentence_index]
    return trim_punct(doc, range(sent.start, conn.span.first))


def fallback_arg2(doc: Document, conn: ConnectiveCandidate) -> list[int]:
    sent = doc.sentences[conn.sentence_index]
    rest = trim_punct(doc, range(conn.span.last + 1, sent.end + 1))
    return rest or trim_punct(doc, range(sent.start, conn.span.first))


@dataclass
class ArgumentResult:
    arg1: TokenSpan | None
    arg2: TokenSpan | None
    arg1_head: int | None = None
    arg2_head: int | None = None
    diagnostics: list[str] = field(default_factory=list)


def identify_arguments(
    doc: Document,
    conn: ConnectiveCandidate,
    model_arg1: maxent.MaxentModel,
    model_arg2: maxent.MaxentModel,
    bound: int = STEP_BOUND,
) -> ArgumentResult:
    """Arg1/Arg2 spans, disjoint from each other and from the connective.

    Degraded cases are reported in ``diagnostics``; a side that cannot be
    filled at all comes back as ``None``.
    """
    h1, h2 = rank_heads(doc, conn, model_arg1, model_arg2, bound)
    in_conn = set(conn.span)
    diags: list[str] = []
    if h2 is None:
        diags.append("empty Arg2 candidate set; Arg2 is the post-connective remainder")
        arg2 = set(fallback_arg2(doc, conn))
    else:
        arg2 = set(project_span(doc, h2, conn.span, ARG2))
    arg2 -= in_conn

    if h1 is None:
        diags.append("empty Arg1 candidate set; Arg1 falls back to the previous sentence")
        arg1 = set(fallback_arg1(doc, conn))
    else:
        arg1 = set(project_span(doc, h1, conn.span, ARG1, other=arg2))
    arg1 -= arg2 | in_conn
    if not arg1 and h1 is not None:
        diags.append("Arg1 head absorbed by Arg2; Arg1 falls back to the previous sentence")
        arg1 = set(fallback_arg1(doc, conn)) - arg2 - in_conn
    if not arg1:
        diags.append("no material left for Arg1")
    if not arg2:
        diags.append("no material left for Arg2")
    return ArgumentResult(
        TokenSpan.of(arg1) if arg1 else None,
        TokenSpan.of(arg2) if arg2 else None,
        h1,
        h2,
        diags,
    )


def argument_instances(
    doc: Document,
    conn: ConnectiveCandidate,
    gold: DiscourseRelation,
    bound: int = STEP_BOUND,
) -> tuple[list[maxent.LabeledInstance], list[maxent.LabeledInstance]]:
    out = []
    for span, cands in ((gold.arg1, arg1_candidates(doc, conn, bound)), (gold.arg2, arg2_candidates(doc, conn))):
        head = span_head(doc, span)
        if head not in cands:
            log.debug("%s: gold head %d not among candidates for connective %s", doc.id, head, conn.span)
        out.append([
            maxent.LabeledInstance(argument_features(doc, conn, t), HEAD if t == head else NOT_HEAD)
            for t in cands
        ])
    return out[0], out[1]


def train_argument_stage(
    corpus: Sequence[tuple[Document, Sequence[DiscourseRelation]]],
    lexicon: Sequence[ConnectiveLexiconEntry],
    config: maxent.TrainConfig = maxent.TrainConfig(),
    bound: int = STEP_BOUND,
) -> tuple[maxent.MaxentModel, maxent.MaxentModel]:
    data1: list[maxent.LabeledInstance] = []
    data2: list[maxent.LabeledInstance] = []
    for doc, gold in corpus:
        for rel in gold:
            if not rel.is_explicit:
                continue
            conn = candidate_for_span(doc, rel.connective, lexicon)
            if doc.tokens[rel.connective.last].sentence_index != conn.sentence_index:
                log.debug("%s: skipping cross-sentence connective %s", doc.id, rel.connective)
                continue
            try:
                i1, i2 = argument_instances(doc, conn, rel, bound)
            except SpanError:
                continue
            data1.extend(i1)
            data2.extend(i2)
    log.info("argument stage: %d Arg1 / %d Arg2 instances", len(data1), len(data2))
    return maxent.train(data1, config), maxent.train(data2, config)
