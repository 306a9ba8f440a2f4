"""Command-line entry point: ``discparse {train,parse,eval,inspect}``.

Documents and gold relation files are paired by file stem
(``docs/wsj_0001.json`` with ``gold/wsj_0001.json``).  Exit codes: 0 on
success, 2 for I/O or input problems, 3 when a training stage cannot be
trained, 4 for model files written by an incompatible format version.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, replace
from pathlib import Path

from . import maxent
from .arguments import HEAD, arg1_candidates, arg2_candidates, argument_features
from .connective import DISCOURSE, connective_features, scan_candidates
from .corpus import Document, DocumentError, read_document, read_relations, write_relations
from .evaluation import EVAL_REPORT, Baseline1Stats, EvalError, baseline1_parse, baseline1_stats, evaluate
from .pipeline import (
    INDICATOR_FILE,
    MODEL_FILES,
    ModelSet,
    ParserConfig,
    TrainingError,
    parse_document,
    train_all,
)
from .sense import explicit_sense_features
from .syntax import SpanError

EXIT_OK, EXIT_IO, EXIT_TRAIN, EXIT_VERSION = 0, 2, 3, 4
MANIFEST_FILE = "manifest.json"
BASELINE_FILE = "baseline1.json"

_TRAIN_KEYS = {"l2_sigma2": float, "max_iters": int, "grad_tol": float}
_PARSER_KEYS = {"step_bound": int, "indicator_k": int, "threshold": float, "lexicon": str}


class InputError(Exception):
    """Bad paths, unreadable or misaligned inputs (exit 2)."""


def load_config(path: str | None, lexicon: str | None = None) -> ParserConfig:
    """Read a ``key=value`` file; ``#`` starts a comment."""
    config = ParserConfig(lexicon_path=lexicon)
    if path is None:
        return config
    train, parser = {}, {}
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc}") from exc
    for n, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = (s.strip() for s in line.partition("="))
        if not sep:
            raise InputError(f"{path}:{n}: expected key=value")
        try:
            if key in _TRAIN_KEYS:
                train[key] = _TRAIN_KEYS[key](value)
            elif key in _PARSER_KEYS:
                parser[key] = _PARSER_KEYS[key](value)
            else:
                raise InputError(f"{path}:{n}: unknown key {key!r}")
        except ValueError as exc:
            raise InputError(f"{path}:{n}: bad value for {key}: {value!r}") from exc
    # --lexicon on the command line wins over the file
    from_file = parser.pop("lexicon", None)
    parser["lexicon_path"] = lexicon or from_file
    try:
        return replace(config, train=replace(config.train, **train), **parser)
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from exc


def _config_echo(config: ParserConfig) -> dict:
    out = asdict(config)
    out.pop("model_dir")
    return out


def _json_files(directory: str | Path, what: str) -> dict[str, Path]:
    directory = Path(directory)
    if not directory.is_dir():
        raise InputError(f"{what} directory not found: {directory}")
    return {p.stem: p for p in sorted(directory.glob("*.json")) if p.name != EVAL_REPORT}


def _read(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _load_doc(path: Path) -> Document:
    try:
        return read_document(_read(path))
    except DocumentError as exc:
        raise InputError(f"{path}: {exc}") from exc


def _load_docs(directory: str | Path) -> dict[str, Document]:
    return {stem: _load_doc(path) for stem, path in _json_files(directory, "documents").items()}


def _load_gold(directory: str | Path, docs: dict[str, Document], what: str = "gold") -> dict[str, list]:
    files = _json_files(directory, what)
    if set(files) != set(docs):
        diff = sorted(set(files) ^ set(docs))
        raise InputError(f"{what} files do not align with documents by stem: {diff[:5]}")
    out = {}
    for stem, path in files.items():
        try:
            out[stem] = read_relations(_read(path), docs[stem])
        except ValueError as exc:
            raise InputError(f"{path}: {exc}") from exc
    return out


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


# ---------------------------------------------------------------- train


def cmd_train(args) -> int:
    config = load_config(args.config, args.lexicon)
    docs = _load_docs(args.docs)
    if not docs:
        raise InputError(f"no documents in {args.docs}")
    gold = _load_gold(args.gold, docs)
    lexicon = _lexicon(config)
    corpus = [(docs[s], gold[s]) for s in sorted(docs)]
    try:
        models = train_all(corpus, config, lexicon)
    except TrainingError as exc:
        print(f"training failed: {exc}", file=sys.stderr)
        return EXIT_TRAIN
    out = Path(args.out)
    try:
        models.save(out)
        (out / BASELINE_FILE).write_text(baseline1_stats(corpus, lexicon).to_json() + "\n", encoding="utf-8")
        inputs = {}
        for kind, directory in (("docs", args.docs), ("gold", args.gold)):
            for stem, path in _json_files(directory, kind).items():
                inputs[f"{kind}/{path.name}"] = _sha256(path)
        manifest = {
            "config": _config_echo(config),
            "inputs": inputs,
            "artifacts": {name: _sha256(out / name) for name in sorted(MODEL_FILES.values()) + [INDICATOR_FILE]},
            "training": {name: getattr(models, name).meta for name in MODEL_FILES},
        }
        (out / MANIFEST_FILE).write_text(json.dumps(manifest, indent=1, sort_keys=True) + "\n", encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot write models to {out}: {exc}") from exc
    print(f"trained {len(MODEL_FILES)} models on {len(corpus)} documents -> {out}")
    return EXIT_OK


def _lexicon(config: ParserConfig):
    try:
        return config.lexicon()
    except OSError as exc:
        raise InputError(f"cannot read lexicon: {exc}") from exc
    except DocumentError as exc:
        raise InputError(f"bad lexicon: {exc}") from exc


# ---------------------------------------------------------------- parse

# state for worker processes, set once per process
_WORKER: dict = {}


def _init_worker(models, config, lexicon, baseline):
    _WORKER.update(models=models, config=config, lexicon=lexicon, baseline=baseline)


def _parse_one(doc: Document) -> str:
    w = _WORKER
    if w["baseline"] is not None:
        rels = baseline1_parse(doc, w["baseline"], w["lexicon"])
    else:
        rels = parse_document(doc, w["models"], w["config"], w["lexicon"])
    return write_relations(rels)


def cmd_parse(args) -> int:
    config = load_config(args.config, args.lexicon)
    lexicon = _lexicon(config)
    model_dir = Path(args.models)
    baseline = models = None
    try:
        if args.baseline1:
            baseline = Baseline1Stats.from_json(_read(model_dir / BASELINE_FILE))
        else:
            models = ModelSet.load(model_dir)
    except maxent.ModelVersionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERSION
    except (OSError, maxent.ModelFormatError, json.JSONDecodeError, KeyError) as exc:
        raise InputError(f"cannot load models from {model_dir}: {exc}") from exc

    docs = _load_docs(args.docs)
    stems = sorted(docs)
    init = (models, config, lexicon, baseline)
    if args.workers > 1:
        with ProcessPoolExecutor(args.workers, initializer=_init_worker, initargs=init) as pool:
            outputs = list(pool.map(_parse_one, [docs[s] for s in stems]))
    else:
        _init_worker(*init)
        outputs = [_parse_one(docs[s]) for s in stems]

    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        for stem, text in zip(stems, outputs):
            (out / f"{stem}.json").write_text(text, encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot write to {out}: {exc}") from exc
    print(f"parsed {len(stems)} documents -> {out}")
    return EXIT_OK


# ----------------------------------------------------------------- eval


def cmd_eval(args) -> int:
    gold_files = _json_files(args.gold, "gold")
    pred_files = _json_files(args.pred, "prediction")
    if not pred_files and gold_files:
        raise InputError(f"no prediction files in {args.pred}")
    if set(pred_files) != set(gold_files):
        diff = sorted(set(pred_files) ^ set(gold_files))
        raise InputError(f"prediction and gold files do not align by stem: {diff[:5]}")
    docs = _load_docs(args.docs) if args.docs else {}
    pred, gold = {}, {}
    for stem in sorted(gold_files):
        doc = docs.get(stem)
        try:
            gold[stem] = read_relations(_read(gold_files[stem]), doc)
            pred[stem] = read_relations(_read(pred_files[stem]), doc)
        except ValueError as exc:
            raise InputError(f"{stem}: {exc}") from exc
    try:
        report = evaluate(pred, gold, partial=args.partial)
    except EvalError as exc:
        raise InputError(str(exc)) from exc
    print(report.to_text())
    path = Path(args.pred) / EVAL_REPORT
    try:
        path.write_text(report.to_json() + "\n", encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc}") from exc
    return EXIT_OK


# -------------------------------------------------------------- inspect


def _print_features(title: str, feats, probs: dict[str, float]) -> None:
    shown = "  ".join(f"P({k})={v:.4f}" for k, v in probs.items())
    print(f"[{title}] {shown}")
    for f in feats:
        print(f"  {f}")


def _distribution(model: maxent.MaxentModel, feats) -> dict[str, float]:
    return dict(zip(model.labels, (float(p) for p in model.predict(feats))))


def cmd_inspect(args) -> int:
    config = load_config(args.config, args.lexicon)
    lexicon = _lexicon(config)
    doc = _load_doc(Path(args.doc))
    cands = scan_candidates(doc, lexicon)
    if not 0 <= args.connective_index < len(cands):
        raise InputError(
            f"connective index {args.connective_index} out of range: document has {len(cands)} candidates"
        )
    try:
        models = ModelSet.load(args.models)
    except maxent.ModelVersionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERSION
    except (OSError, maxent.ModelFormatError) as exc:
        raise InputError(f"cannot load models from {args.models}: {exc}") from exc

    cand = cands[args.connective_index]
    words = " ".join(doc.tokens[p].text for p in cand.span)
    print(f"candidate {args.connective_index}: {words!r} tokens {list(cand.span)} ({cand.category})")
    feats = connective_features(doc, cand)
    _print_features("stage1 connective", feats, {DISCOURSE: models.connective.prob(feats, DISCOURSE)})
    for name, model, tokens in (
        ("stage2 arg1", models.arg1, arg1_candidates(doc, cand, config.step_bound)),
        ("stage2 arg2", models.arg2, arg2_candidates(doc, cand)),
    ):
        for t in tokens:
            feats = argument_features(doc, cand, t)
            _print_features(f"{name} token {t} {doc.tokens[t].text}", feats, {HEAD: model.prob(feats, HEAD)})
    feats = explicit_sense_features(doc, cand)
    _print_features("stage3 sense", feats, _distribution(models.sense, feats))
    return EXIT_OK


# ------------------------------------------------------------------ main


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="discparse", description="Shallow discourse parser over pre-parsed documents.")
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="key=value configuration file")
        p.add_argument("--lexicon", help="connective lexicon (surface<TAB>category per line)")

    p = sub.add_parser("train", help="train all stages from documents and gold relations")
    p.add_argument("--docs", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--out", required=True)
    common(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("parse", help="parse documents with trained models")
    p.add_argument("--docs", required=True)
    p.add_argument("--models", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--baseline1", action="store_true", help="use the frequency baseline instead of the models")
    p.add_argument("--workers", type=int, default=1)
    common(p)
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("eval", help="score predictions against gold")
    p.add_argument("--pred", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--docs", help="documents, to range-check spans")
    p.add_argument("--partial", action="store_true", help="count arguments with >=70%% token overlap as correct")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("inspect", help="print per-stage features for one connective candidate")
    p.add_argument("--doc", required=True)
    p.add_argument("--connective-index", type=int, required=True)
    p.add_argument("--models", required=True)
    common(p)
    p.set_defaults(func=cmd_inspect)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except SpanError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
