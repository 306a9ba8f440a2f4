"""Four-stage parser orchestration: training of every stage and parsing."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from . import maxent
from .arguments import STEP_BOUND, identify_arguments, train_argument_stage
from .connective import candidate_for_span, identify_connectives, train_connective_stage
from .corpus import (
    ConnectiveLexiconEntry,
    DiscourseRelation,
    Document,
    TokenSpan,
    default_lexicon,
    read_lexicon,
)
from .sense import (
    NONEXPLICIT_TYPES,
    build_indicator_lexicon,
    classify_explicit_sense,
    classify_nonexplicit,
    explicit_sense_features,
    nonexplicit_features,
    nonexplicit_pairs,
    nonexplicit_relation,
    train_nonexplicit_stage,
    train_sense_stage,
)

log = logging.getLogger(__name__)

MODEL_FILES = {
    "connective": "connective.model",
    "arg1": "arg1.model",
    "arg2": "arg2.model",
    "sense": "sense.model",
    "nonexplicit": "nonexplicit.model",
}
INDICATOR_FILE = "indicators.txt"

Corpus = Sequence[tuple[Document, Sequence[DiscourseRelation]]]


class TrainingError(Exception):
    def __init__(self, stage: str, message: str):
        super().__init__(f"{stage} stage: {message}")
        self.stage = stage


@dataclass(frozen=True)
class ParserConfig:
    lexicon_path: str | None = None
    model_dir: str | None = None
    train: maxent.TrainConfig = maxent.TrainConfig()
    step_bound: int = STEP_BOUND
    indicator_k: int = 100
    threshold: float = 0.5

    def __post_init__(self):
        if self.step_bound < 1:
            raise ValueError("step bound must be >= 1")
        if not 0.0 < self.threshold < 1.0:
            raise ValueError("decision threshold must lie in (0, 1)")
        if self.indicator_k < 1:
            raise ValueError("indicator lexicon size must be >= 1")

    def lexicon(self) -> list[ConnectiveLexiconEntry]:
        if self.lexicon_path is None:
            return default_lexicon()
        return read_lexicon(Path(self.lexicon_path).read_text(encoding="utf-8"))


@dataclass
class ModelSet:
    connective: maxent.MaxentModel
    arg1: maxent.MaxentModel
    arg2: maxent.MaxentModel
    sense: maxent.MaxentModel
    nonexplicit: maxent.MaxentModel
    indicators: list[str]

    def save(self, directory: str | Path) -> list[Path]:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        written = []
        for name, filename in MODEL_FILES.items():
            path = directory / filename
            maxent.save(getattr(self, name), path)
            written.append(path)
        path = directory / INDICATOR_FILE
        path.write_text("".join(w + "\n" for w in self.indicators), encoding="utf-8")
        written.append(path)
        return written

    @classmethod
    def load(cls, directory: str | Path) -> "ModelSet":
        directory = Path(directory)
        models = {name: maxent.load(directory / filename) for name, filename in MODEL_FILES.items()}
        indicators = (directory / INDICATOR_FILE).read_text(encoding="utf-8").split()
        return cls(indicators=indicators, **models)


def train_all(corpus: Corpus, config: ParserConfig = ParserConfig(),
              lexicon: Sequence[ConnectiveLexiconEntry] | None = None) -> ModelSet:
    """Train every stage on gold upstream annotations."""
    lexicon = config.lexicon() if lexicon is None else lexicon
    tc = config.train

    def stage(name, fn, *args):
        try:
            return fn(*args)
        except maxent.MaxentError as exc:
            raise TrainingError(name, str(exc)) from exc

    conn_model = stage("connective", train_connective_stage, corpus, lexicon, tc)
    arg1_model, arg2_model = stage("argument", train_argument_stage, corpus, lexicon, tc, config.step_bound)
    sense_model = stage("explicit sense", train_sense_stage, corpus, lexicon, tc)
    # without non-explicit gold every pair is "None"; let the trainer report that
    has_nonexplicit = any(r.relation_type in NONEXPLICIT_TYPES for _, gold in corpus for r in gold)
    indicators = stage("non-explicit", build_indicator_lexicon, corpus, config.indicator_k) if has_nonexplicit else []
    nonexp_model = stage("non-explicit", train_nonexplicit_stage, corpus, indicators, tc)
    return ModelSet(conn_model, arg1_model, arg2_model, sense_model, nonexp_model, indicators)


def parse_document(
    doc: Document,
    models: ModelSet,
    config: ParserConfig = ParserConfig(),
    lexicon: Sequence[ConnectiveLexiconEntry] | None = None,
    connectives: Sequence[TokenSpan] | None = None,
    diagnostics: list[str] | None = None,
) -> list[DiscourseRelation]:
    """Run the four stages over one document.

    ``connectives`` replaces stage 1 with externally supplied (e.g. gold)
    connective spans.  Degraded per-connective cases are appended to
    ``diagnostics`` instead of raising.
    """
    lexicon = config.lexicon() if lexicon is None else lexicon
    diags = diagnostics if diagnostics is not None else []

    if connectives is None:
        found = identify_connectives(doc, models.connective, lexicon, config.threshold)
    else:
        found = [candidate_for_span(doc, span, lexicon) for span in connectives]

    relations: list[DiscourseRelation] = []
    for cand in found:
        args = identify_arguments(doc, cand, models.arg1, models.arg2, config.step_bound)
        for msg in args.diagnostics:
            diags.append(f"{doc.id} connective {list(cand.span)}: {msg}")
        if args.arg1 is None or args.arg2 is None:
            continue
        feats = explicit_sense_features(doc, cand, args.arg1, args.arg2)
        sense = classify_explicit_sense(models.sense, feats)
        relations.append(DiscourseRelation("Explicit", args.arg1, args.arg2, cand.span, sense.path()))

    for pair in nonexplicit_pairs(doc, relations):
        label = classify_nonexplicit(models.nonexplicit, nonexplicit_features(doc, pair, models.indicators))
        rel = nonexplicit_relation(doc, pair, label)
        if rel is not None:
            relations.append(rel)

    relations.sort(key=relation_order)
    return relations


def relation_order(rel: DiscourseRelation):
    """Output order: by Arg2 start, then Arg1 start."""
    conn = rel.connective.positions if rel.connective is not None else ()
    return (rel.arg2.first, rel.arg1.first, conn, rel.relation_type)


def parse_corpus(
    docs: Sequence[Document],
    models: ModelSet,
    config: ParserConfig = ParserConfig(),
    lexicon: Sequence[ConnectiveLexiconEntry] | None = None,
    diagnostics: list[str] | None = None,
) -> dict[str, list[DiscourseRelation]]:
    lexicon = config.lexicon() if lexicon is None else lexicon
    return {
        doc.id: parse_document(doc, models, config, lexicon, diagnostics=diagnostics)
        for doc in sorted(docs, key=lambda d: d.id)
    }
