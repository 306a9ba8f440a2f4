"""Shared builders for small hand-made documents."""
from __future__ import annotations

import json
from pathlib import Path

from discparse.corpus import Document, read_document, read_relations

FIXTURES = Path(__file__).parent / "fixtures"


def fixture_text(name: str) -> str:
    return (FIXTURES / name).read_text(encoding="utf-8")


def load_doc(name: str) -> Document:
    return read_document(fixture_text(f"{name}.json"))


def load_gold(name: str, doc: Document):
    return read_relations(fixture_text(f"{name}.gold.json"), doc)


def fixture_names() -> list[str]:
    return sorted(p.stem for p in FIXTURES.glob("*.json") if not p.stem.endswith(".gold"))


def doc_dict(doc_id: str, sentences) -> dict:
    """``sentences``: (tagged words "w/POS ...", bracketed tree, [(local head or -1, label)], paragraph)."""
    tokens, out = [], []
    for words, tree, deps, par in sentences:
        start = len(tokens)
        tokens += [{"t": w, "pos": p} for w, p in (x.rsplit("/", 1) for x in words.split())]
        arcs = [[-1 if h < 0 else h + start, start + i, lab] for i, (h, lab) in enumerate(deps)]
        out.append({"start": start, "end": len(tokens) - 1, "paragraph": par, "const": tree, "deps": arcs})
    return {"id": doc_id, "tokens": tokens, "sentences": out}


def make_doc(doc_id: str, sentences) -> Document:
    return read_document(json.dumps(doc_dict(doc_id, sentences)))


def flat_sentence(words: str, par: int = 0):
    """A sentence with a flat S and every token attached to the first one."""
    tagged = [x.rsplit("/", 1) for x in words.split()]
    tree = "(ROOT (S " + " ".join(f"({p} {w})" for w, p in tagged) + "))"
    deps = [(-1, "root")] + [(0, "dep")] * (len(tagged) - 1)
    return (words, tree, deps, par)
