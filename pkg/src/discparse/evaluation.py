"""Precision/recall/F1 scoring over relations, and the frequency baseline."""
from __future__ import annotations

import json
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .connective import scan_candidates
from .corpus import ConnectiveLexiconEntry, DiscourseRelation, Document, TokenSpan
from .pipeline import Corpus, relation_order
from .sense import ENTREL, NO_RELATION, NONEXPLICIT_TYPES, nonexplicit_pairs, nonexplicit_relation

ROWS = ("Connective", "Arg1", "Arg2", "Sense")
PARTIAL_OVERLAP = 0.7
EVAL_REPORT = "eval_report.json"


class EvalError(ValueError):
    pass


@dataclass
class RowScore:
    tp: int = 0
    fp: int = 0
    fn: int = 0

    @property
    def precision(self) -> float:
        return self.tp / (self.tp + self.fp) if self.tp + self.fp else 0.0

    @property
    def recall(self) -> float:
        return self.tp / (self.tp + self.fn) if self.tp + self.fn else 0.0

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r else 0.0

    def add(self, other: "RowScore") -> None:
        self.tp += other.tp
        self.fp += other.fp
        self.fn += other.fn

    def as_dict(self) -> dict:
        return {
            "tp": self.tp,
            "fp": self.fp,
            "fn": self.fn,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
        }


def _empty_rows(names=ROWS) -> dict[str, RowScore]:
    return {name: RowScore() for name in names}


@dataclass
class EvalReport:
    rows: dict[str, RowScore] = field(default_factory=_empty_rows)
    # per relation family: "Explicit" and "NonExplicit"
    breakdown: dict[str, dict[str, RowScore]] = field(default_factory=dict)

    def to_text(self) -> str:
        lines = [f"{'':<12}{'Precision':>10}{'Recall':>10}{'F1':>10}{'tp':>8}{'fp':>8}{'fn':>8}"]

        def emit(prefix: str, rows: Mapping[str, RowScore]) -> None:
            for name, row in rows.items():
                lines.append(
                    f"{prefix + name:<12}{row.precision:>10.3f}{row.recall:>10.3f}{row.f1:>10.3f}"
                    f"{row.tp:>8}{row.fp:>8}{row.fn:>8}"
                )

        emit("", self.rows)
        for family, rows in self.breakdown.items():
            lines.append(f"-- {family}")
            emit("  ", rows)
        return "\n".join(lines)

    def to_json(self) -> str:
        return json.dumps(
            {
                "rows": {name: row.as_dict() for name, row in self.rows.items()},
                "breakdown": {
                    fam: {name: row.as_dict() for name, row in rows.items()}
                    for fam, rows in self.breakdown.items()
                },
            },
            indent=2,
        )


def _sense_key(rel: DiscourseRelation) -> str | None:
    return ENTREL if rel.relation_type == ENTREL else rel.sense_class


def _span_match(pred: TokenSpan, gold: TokenSpan, partial: bool) -> bool:
    if not partial:
        return pred == gold
    shared = len(set(pred) & set(gold))
    return shared >= PARTIAL_OVERLAP * len(pred) and shared >= PARTIAL_OVERLAP * len(gold)


def _match(pred: list[DiscourseRelation], gold: list[DiscourseRelation], same) -> list[tuple]:
    """Greedy one-to-one alignment in canonical order."""
    used: set[int] = set()
    pairs = []
    for p in pred:
        for gi, g in enumerate(gold):
            if gi not in used and same(p, g):
                used.add(gi)
                pairs.append((p, g))
                break
    return pairs


def _score_family(pred, gold, matched, partial: bool) -> dict[str, RowScore]:
    rows = {}
    for name in ("Arg1", "Arg2", "Sense"):
        if name == "Arg1":
            tp = sum(_span_match(p.arg1, g.arg1, partial) for p, g in matched)
        elif name == "Arg2":
            tp = sum(_span_match(p.arg2, g.arg2, partial) for p, g in matched)
        else:
            tp = sum(_sense_key(p) == _sense_key(g) for p, g in matched)
        rows[name] = RowScore(tp, len(pred) - tp, len(gold) - tp)
    return rows


def evaluate(
    predicted: Mapping[str, Sequence[DiscourseRelation]],
    gold: Mapping[str, Sequence[DiscourseRelation]],
    partial: bool = False,
) -> EvalReport:
    if set(predicted) != set(gold):
        missing = sorted(set(gold) ^ set(predicted))
        raise EvalError(f"document id mismatch between predictions and gold: {missing[:5]}")
    report = EvalReport()
    explicit = _empty_rows()
    nonexplicit = _empty_rows(ROWS[1:])
    for doc_id in sorted(gold):
        preds = sorted(predicted[doc_id], key=relation_order)
        golds = sorted(gold[doc_id], key=relation_order)

        p_exp = [r for r in preds if r.is_explicit]
        g_exp = [r for r in golds if r.is_explicit]
        m_exp = _match(p_exp, g_exp, lambda p, g: p.connective == g.connective)
        explicit["Connective"].add(RowScore(len(m_exp), len(p_exp) - len(m_exp), len(g_exp) - len(m_exp)))
        for name, row in _score_family(p_exp, g_exp, m_exp, partial).items():
            explicit[name].add(row)

        p_ne = [r for r in preds if r.relation_type in NONEXPLICIT_TYPES]
        g_ne = [r for r in golds if r.relation_type in NONEXPLICIT_TYPES]
        # sentence-pair alignment: both arguments must share material
        m_ne = _match(p_ne, g_ne, lambda p, g: p.arg1.overlaps(g.arg1) and p.arg2.overlaps(g.arg2))
        for name, row in _score_family(p_ne, g_ne, m_ne, partial).items():
            nonexplicit[name].add(row)

    report.rows["Connective"].add(explicit["Connective"])
    for name in ROWS[1:]:
        report.rows[name].add(explicit[name])
        report.rows[name].add(nonexplicit[name])
    report.breakdown = {"Explicit": explicit, "NonExplicit": nonexplicit}
    return report


# ------------------------------------------------------------ Baseline_1


def _most_frequent(counter: Counter) -> str | None:
    if not counter:
        return None
    return min(counter.items(), key=lambda kv: (-kv[1], kv[0]))[0]


@dataclass
class Baseline1Stats:
    discourse_fraction: dict[str, float]
    connective_sense: dict[str, str]
    default_sense: str
    nonexplicit_label: str

    def to_json(self) -> str:
        return json.dumps(
            {
                "discourse_fraction": self.discourse_fraction,
                "connective_sense": self.connective_sense,
                "default_sense": self.default_sense,
                "nonexplicit_label": self.nonexplicit_label,
            },
            indent=1,
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "Baseline1Stats":
        data = json.loads(text)
        return cls(
            data["discourse_fraction"], data["connective_sense"], data["default_sense"], data["nonexplicit_label"]
        )


def baseline1_stats(corpus: Corpus, lexicon: Sequence[ConnectiveLexiconEntry]) -> Baseline1Stats:
    total: Counter[str] = Counter()
    positive: Counter[str] = Counter()
    senses: dict[str, Counter] = defaultdict(Counter)
    all_senses: Counter[str] = Counter()
    ne_labels: Counter[str] = Counter()
    for doc, gold in corpus:
        gold_conn = {r.connective: r for r in gold if r.is_explicit}
        for cand in scan_candidates(doc, lexicon):
            surface = cand.entry.text
            total[surface] += 1
            if cand.span in gold_conn:
                positive[surface] += 1
        for rel in gold:
            if rel.is_explicit:
                surface = " ".join(doc.tokens[p].text.lower() for p in rel.connective)
                senses[surface][rel.sense_class] += 1
                all_senses[rel.sense_class] += 1
            elif rel.relation_type in NONEXPLICIT_TYPES:
                label = ENTREL if rel.relation_type == ENTREL else rel.sense_class
                if label is not None:
                    ne_labels[label] += 1
    return Baseline1Stats(
        {s: positive[s] / total[s] for s in sorted(total)},
        {s: _most_frequent(c) for s, c in sorted(senses.items())},
        _most_frequent(all_senses) or "Expansion",
        _most_frequent(ne_labels) or NO_RELATION,
    )


def baseline1_parse(
    doc: Document, stats: Baseline1Stats, lexicon: Sequence[ConnectiveLexiconEntry]
) -> list[DiscourseRelation]:
    relations: list[DiscourseRelation] = []
    for cand in scan_candidates(doc, lexicon):
        surface = cand.entry.text
        if stats.discourse_fraction.get(surface, 0.0) <= 0.5:
            continue
        sent = doc.sentences[cand.sentence_index]
        if sent.index > 0:
            arg1 = list(doc.sentences[sent.index - 1].token_range)
        else:
            arg1 = list(range(sent.start, cand.span.first))
        arg2 = list(range(cand.span.last + 1, sent.end + 1))
        if not arg1 or not arg2:
            continue
        sense = stats.connective_sense.get(surface, stats.default_sense)
        relations.append(
            DiscourseRelation("Explicit", TokenSpan.of(arg1), TokenSpan.of(arg2), cand.span, sense)
        )
    for pair in nonexplicit_pairs(doc, relations):
        rel = nonexplicit_relation(doc, pair, stats.nonexplicit_label)
        if rel is not None:
            relations.append(rel)
    relations.sort(key=relation_order)
    return relations
