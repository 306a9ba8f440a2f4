"""Documents, discourse relations and connective lexicons.

Documents arrive pre-parsed as JSON (tokens with POS tags, one bracketed
constituent tree and one dependency arc list per sentence).  Token indices
are document-wide everywhere: in sentence boundaries, dependency arcs and
relation spans.

Document file::

    {"id": "wsj_0001",
     "tokens": [{"t": "It", "pos": "PRP"}, ...],
     "sentences": [{"start": 0, "end": 10, "paragraph": 0,
                    "const": "(ROOT (S ...))",
                    "deps": [[1, 0, "nsubj"], [-1, 1, "root"], ...]}]}

``start``/``end`` are inclusive and a head of ``-1`` marks the root.
"""
from __future__ import annotations

import json
import re
import sys
from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Iterator, Sequence

RELATION_TYPES = ("Explicit", "Implicit", "AltLex", "EntRel", "NoRel")
SENSE_CLASSES = ("Comparison", "Contingency", "Expansion", "Temporal")
CATEGORIES = ("Subordinating", "Coordinating", "Adverbial")

PUNCT_TAGS = frozenset({".", ",", ":", "``", "''", "-LRB-", "-RRB-", "#", "$", "PUNCT"})

# key order of serialized relation objects
RELATION_KEYS = ("relation_type", "connective", "arg1", "arg2", "sense")


class DocumentError(ValueError):
    """Raised for input that is malformed or violates a data-model invariant."""


def is_punct(pos: str) -> bool:
    return pos in PUNCT_TAGS


def trim_punct(doc: "Document", tokens: Iterable[int]) -> list[int]:
    """Sorted tokens with punctuation stripped from both edges."""
    ordered = sorted(tokens)
    lo, hi = 0, len(ordered)
    while lo < hi and is_punct(doc.tokens[ordered[lo]].pos):
        lo += 1
    while hi > lo and is_punct(doc.tokens[ordered[hi - 1]].pos):
        hi -= 1
    return ordered[lo:hi]


@dataclass(frozen=True)
class Token:
    index: int
    text: str
    pos: str
    sentence_index: int


class TreeNode:
    """A constituent node.  Preterminals carry the token index of their word."""

    __slots__ = ("label", "children", "parent", "token", "start", "end")

    def __init__(self, label: str, children: Sequence["TreeNode"] = (), token: int | None = None):
        self.label = label
        self.children = list(children)
        self.parent: TreeNode | None = None
        self.token = token
        self.start = -1
        self.end = -1
        for child in self.children:
            child.parent = self

    @property
    def is_preterminal(self) -> bool:
        return self.token is not None

    def covers(self, positions: Iterable[int]) -> bool:
        return all(self.start <= p <= self.end for p in positions)

    def overlaps(self, positions: Iterable[int]) -> bool:
        return any(self.start <= p <= self.end for p in positions)

    def iter_nodes(self) -> Iterator["TreeNode"]:
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def tokens(self) -> range:
        return range(self.start, self.end + 1)

    def __repr__(self) -> str:
        return f"TreeNode({self.label!r}, {self.start}-{self.end})"


_BRACKET_TOKENS = re.compile(r"\(|\)|[^\s()]+")


def _parse_bracketed(text: str) -> TreeNode:
    tokens = _BRACKET_TOKENS.findall(text)
    if not tokens or tokens[0] != "(":
        raise DocumentError("constituent tree must start with '('")
    pos = 0

    def node() -> TreeNode:
        nonlocal pos
        pos += 1  # "("
        label = ""
        if pos < len(tokens) and tokens[pos] not in "()":
            label = tokens[pos]
            pos += 1
        children: list[TreeNode] = []
        words: list[str] = []
        while True:
            if pos >= len(tokens):
                raise DocumentError("unbalanced brackets in constituent tree")
            tok = tokens[pos]
            if tok == ")":
                pos += 1
                break
            if tok == "(":
                children.append(node())
            else:
                words.append(tok)
                pos += 1
        if words:
            if children or len(words) != 1:
                raise DocumentError(f"malformed preterminal under {label!r}")
            return TreeNode(label or "ROOT", token=-1)
        if not children:
            raise DocumentError(f"empty constituent {label!r}")
        return TreeNode(label or "ROOT", children)

    root = node()
    if pos != len(tokens):
        raise DocumentError("trailing material after constituent tree")
    return root


class ConstTree:
    """Constituent tree of one sentence with leaves bound to token indices."""

    def __init__(self, root: TreeNode, first_token: int = 0):
        self.root = root
        self.leaves: list[TreeNode] = []
        self._assign(root, first_token)

    def _assign(self, root: TreeNode, first: int) -> None:
        for node in root.iter_nodes():
            if node.is_preterminal:
                node.token = first + len(self.leaves)
                node.start = node.end = node.token
                self.leaves.append(node)
        # post-order span computation
        order = list(root.iter_nodes())
        for node in reversed(order):
            if node.children:
                node.start = node.children[0].start
                node.end = node.children[-1].end

    @classmethod
    def from_bracketed(cls, text: str, first_token: int = 0) -> "ConstTree":
        return cls(_parse_bracketed(text), first_token)

    @property
    def first(self) -> int:
        return self.root.start

    @property
    def last(self) -> int:
        return self.root.end

    def preterminal(self, token: int) -> TreeNode:
        i = token - self.root.start
        if not 0 <= i < len(self.leaves):
            raise KeyError(token)
        return self.leaves[i]

    def to_bracketed(self, words: Sequence[str] | None = None) -> str:
        def render(node: TreeNode) -> str:
            if node.is_preterminal:
                word = words[node.token - self.first] if words is not None else "_"
                return f"({node.label} {word})"
            return "(" + node.label + " " + " ".join(render(c) for c in node.children) + ")"

        return render(self.root)


class DepGraph:
    """Basic dependency tree of a sentence: one head per token, one root."""

    def __init__(self, arcs: Iterable[tuple[int, int, str]]):
        self.heads: dict[int, tuple[int, str]] = {}
        self.root = -1
        for head, dep, label in arcs:
            if dep in self.heads:
                raise DocumentError(f"multiple dependency heads for token {dep}")
            self.heads[dep] = (head, label)
            if head == -1:
                if self.root != -1:
                    raise DocumentError("sentence has more than one dependency root")
                self.root = dep
        self.children: dict[int, list[tuple[int, str]]] = {t: [] for t in self.heads}
        for dep, (head, label) in sorted(self.heads.items()):
            if head != -1 and head in self.children:
                self.children[head].append((dep, label))

    def __contains__(self, token: int) -> bool:
        return token in self.heads

    def head(self, token: int) -> int:
        return self.heads[token][0]

    def label(self, token: int) -> str:
        return self.heads[token][1]

    def path_to_root(self, token: int) -> list[int]:
        path = [token]
        while self.heads[path[-1]][0] != -1:
            path.append(self.heads[path[-1]][0])
            if len(path) > len(self.heads):
                raise DocumentError("cycle in dependency graph")
        return path

    def depth(self, token: int) -> int:
        return len(self.path_to_root(token)) - 1

    def arcs(self) -> list[tuple[int, int, str]]:
        return [(h, d, lab) for d, (h, lab) in sorted(self.heads.items())]


@dataclass(frozen=True, eq=False)
class Sentence:
    index: int
    start: int
    end: int
    paragraph_index: int
    constituent_tree: ConstTree
    dependency_graph: DepGraph

    @property
    def token_range(self) -> range:
        return range(self.start, self.end + 1)

    def __len__(self) -> int:
        return self.end - self.start + 1


@dataclass(frozen=True, eq=False)
class Document:
    id: str
    tokens: tuple[Token, ...]
    sentences: tuple[Sentence, ...]

    def sentence_of(self, token: int) -> Sentence:
        return self.sentences[self.tokens[token].sentence_index]

    def words(self, positions: Iterable[int]) -> list[str]:
        return [self.tokens[p].text for p in positions]


@dataclass(frozen=True, order=True)
class TokenSpan:
    """Sorted, duplicate-free, non-empty set of token positions."""

    positions: tuple[int, ...]

    def __post_init__(self):
        if not self.positions:
            raise DocumentError("token span must be non-empty")
        if any(b <= a for a, b in zip(self.positions, self.positions[1:])):
            raise DocumentError("token span positions must be strictly increasing")

    @classmethod
    def of(cls, positions: Iterable[int]) -> "TokenSpan":
        return cls(tuple(sorted(set(int(p) for p in positions))))

    @property
    def first(self) -> int:
        return self.positions[0]

    @property
    def last(self) -> int:
        return self.positions[-1]

    def __iter__(self) -> Iterator[int]:
        return iter(self.positions)

    def __len__(self) -> int:
        return len(self.positions)

    def __contains__(self, p: object) -> bool:
        return p in set(self.positions)

    def overlaps(self, other: Iterable[int]) -> bool:
        return not set(self.positions).isdisjoint(other)


def sense_class(sense: str | None) -> str | None:
    if sense is None:
        return None
    return sense.split("/")[0]


@dataclass(frozen=True)
class DiscourseRelation:
    relation_type: str
    arg1: TokenSpan
    arg2: TokenSpan
    connective: TokenSpan | None = None
    sense: str | None = None

    def __post_init__(self):
        rt = self.relation_type
        if rt not in RELATION_TYPES:
            raise DocumentError(f"unknown relation type {rt!r}")
        if rt in ("Explicit", "AltLex"):
            if self.connective is None:
                raise DocumentError(f"{rt} relation missing connective span")
        elif self.connective is not None:
            raise DocumentError(f"{rt} relation carries no connective span")
        if rt == "Explicit" and self.sense is None:
            raise DocumentError("Explicit relation missing sense")
        if rt in ("EntRel", "NoRel") and self.sense is not None:
            raise DocumentError(f"{rt} carries no sense")
        if self.sense is not None and sense_class(self.sense) not in SENSE_CLASSES:
            raise DocumentError(f"unknown sense class in {self.sense!r}")
        if self.arg1.overlaps(self.arg2):
            raise DocumentError("overlapping arg1/arg2")
        if self.connective is not None and (
            self.connective.overlaps(self.arg1) or self.connective.overlaps(self.arg2)
        ):
            raise DocumentError("argument overlaps connective span")
        if rt != "Explicit" and self.arg1.last >= self.arg2.first:
            raise DocumentError("Arg1 must precede Arg2 for non-explicit")

    @property
    def is_explicit(self) -> bool:
        return self.relation_type == "Explicit"

    @property
    def sense_class(self) -> str | None:
        return sense_class(self.sense)


@dataclass(frozen=True)
class ConnectiveLexiconEntry:
    surface: tuple[str, ...]
    category: str

    @property
    def text(self) -> str:
        return " ".join(self.surface)


# ---------------------------------------------------------------- readers


def _load_json(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"malformed JSON: {exc}") from None


def _require(obj: dict, key: str, kind, where: str):
    if not isinstance(obj, dict) or key not in obj:
        raise DocumentError(f"{where}: missing field {key!r}")
    value = obj[key]
    if kind is int:
        ok = isinstance(value, int) and not isinstance(value, bool)
    else:
        ok = isinstance(value, kind)
    if not ok:
        raise DocumentError(f"{where}: field {key!r} has wrong type")
    return value


def read_document(json_text: str) -> Document:
    data = _load_json(json_text)
    if not isinstance(data, dict):
        raise DocumentError("document must be a JSON object")
    doc_id = _require(data, "id", str, "document")
    raw_tokens = _require(data, "tokens", list, "document")
    raw_sents = _require(data, "sentences", list, "document")
    if not raw_sents:
        raise DocumentError("document has no sentences")

    texts, tags = [], []
    for i, tok in enumerate(raw_tokens):
        texts.append(_require(tok, "t", str, f"token {i}"))
        tags.append(_require(tok, "pos", str, f"token {i}"))

    tokens: list[Token] = []
    sentences: list[Sentence] = []
    expected_start = 0
    prev_par = None
    for si, raw in enumerate(raw_sents):
        where = f"sentence {si}"
        start = _require(raw, "start", int, where)
        end = _require(raw, "end", int, where)
        par = _require(raw, "paragraph", int, where)
        const = _require(raw, "const", str, where)
        deps = _require(raw, "deps", list, where)
        if start != expected_start:
            raise DocumentError(f"{where}: sentences must be adjacent (start {start}, expected {expected_start})")
        if end < start or end >= len(texts):
            raise DocumentError(f"{where}: dangling token index in range [{start}, {end}]")
        if prev_par is None:
            if par != 0:
                raise DocumentError("first paragraph index must be 0")
        elif par not in (prev_par, prev_par + 1):
            raise DocumentError(f"{where}: paragraph indices must be non-decreasing ordinals")
        prev_par = par

        tree = ConstTree.from_bracketed(const, start)
        if len(tree.leaves) != end - start + 1:
            raise DocumentError(
                f"{where}: leaf/token mismatch ({len(tree.leaves)} leaves, {end - start + 1} tokens)"
            )

        arcs = []
        for arc in deps:
            if (
                not isinstance(arc, list)
                or len(arc) != 3
                or not all(isinstance(x, int) and not isinstance(x, bool) for x in arc[:2])
                or not isinstance(arc[2], str)
            ):
                raise DocumentError(f"{where}: malformed dependency arc {arc!r}")
            head, dep, label = arc
            if not start <= dep <= end or not (head == -1 or start <= head <= end):
                raise DocumentError(f"{where}: dangling token index in arc {arc!r}")
            arcs.append((head, dep, label))
        graph = DepGraph(arcs)
        if len(graph.heads) != end - start + 1:
            raise DocumentError(f"{where}: every token needs exactly one head arc")
        if graph.root == -1:
            raise DocumentError(f"{where}: sentence has no dependency root")
        for t in graph.heads:
            graph.path_to_root(t)  # raises on cycles

        for t in range(start, end + 1):
            tokens.append(Token(t, texts[t], tags[t], si))
        sentences.append(Sentence(si, start, end, par, tree, graph))
        expected_start = end + 1

    if expected_start != len(texts):
        raise DocumentError("sentences do not cover all tokens")
    return Document(doc_id, tuple(tokens), tuple(sentences))


def document_to_json(doc: Document) -> str:
    """Inverse of :func:`read_document` (trees re-rendered from tokens)."""
    words = [t.text for t in doc.tokens]
    sents = []
    for s in doc.sentences:
        sents.append({
            "start": s.start,
            "end": s.end,
            "paragraph": s.paragraph_index,
            "const": s.constituent_tree.to_bracketed(words[s.start:s.end + 1]),
            "deps": [list(a) for a in s.dependency_graph.arcs()],
        })
    return json.dumps({
        "id": doc.id,
        "tokens": [{"t": t.text, "pos": t.pos} for t in doc.tokens],
        "sentences": sents,
    })


def _read_span(value, n_tokens: int, where: str) -> TokenSpan:
    if not isinstance(value, list) or not value:
        raise DocumentError(f"{where}: span must be a non-empty array")
    for p in value:
        if not isinstance(p, int) or isinstance(p, bool):
            raise DocumentError(f"{where}: span positions must be integers")
        if not 0 <= p < n_tokens:
            raise DocumentError(f"{where}: span out of range ({p})")
    return TokenSpan.of(value)


def relation_from_dict(obj: dict, n_tokens: int, where: str = "relation") -> DiscourseRelation:
    if not isinstance(obj, dict):
        raise DocumentError(f"{where}: relation must be an object")
    rtype = _require(obj, "relation_type", str, where)
    conn = obj.get("connective")
    sense = obj.get("sense")
    if sense is not None:
        if not isinstance(sense, str) or not sense:
            raise DocumentError(f"{where}: sense must be a string")
        sense = sense.replace(".", "/")
    return DiscourseRelation(
        relation_type=rtype,
        arg1=_read_span(obj.get("arg1"), n_tokens, f"{where} arg1"),
        arg2=_read_span(obj.get("arg2"), n_tokens, f"{where} arg2"),
        connective=None if conn is None else _read_span(conn, n_tokens, f"{where} connective"),
        sense=sense,
    )


def read_relations(json_text: str, doc: Document | None = None) -> list[DiscourseRelation]:
    """Relations of one document; without ``doc`` only the upper span bound goes unchecked."""
    data = _load_json(json_text)
    if not isinstance(data, list):
        raise DocumentError("relation file must be a JSON array")
    n_tokens = sys.maxsize if doc is None else len(doc.tokens)
    return [relation_from_dict(obj, n_tokens, f"relation {i}") for i, obj in enumerate(data)]


def relation_to_dict(rel: DiscourseRelation) -> dict:
    return {
        "relation_type": rel.relation_type,
        "connective": None if rel.connective is None else list(rel.connective),
        "arg1": list(rel.arg1),
        "arg2": list(rel.arg2),
        "sense": rel.sense,
    }


def write_relations(relations: Sequence[DiscourseRelation]) -> str:
    """Serialize one relation per line, keys in ``RELATION_KEYS`` order."""
    if not relations:
        return "[]"
    lines = [json.dumps(relation_to_dict(r)) for r in relations]
    return "[\n" + ",\n".join(lines) + "\n]"


def read_lexicon(text: str) -> list[ConnectiveLexiconEntry]:
    entries: list[ConnectiveLexiconEntry] = []
    seen: set[tuple[str, ...]] = set()
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        surface, sep, category = line.rstrip("\r\n").partition("\t")
        if not sep:
            raise DocumentError(f"lexicon line {lineno}: expected '<surface>\\t<category>'")
        category = category.strip()
        if category not in CATEGORIES:
            raise DocumentError(f"lexicon line {lineno}: unknown category tag {category!r}")
        words = tuple(w.lower() for w in surface.split())
        if not words:
            raise DocumentError(f"lexicon line {lineno}: empty surface")
        if words in seen:
            raise DocumentError(f"lexicon line {lineno}: duplicate surface {' '.join(words)!r}")
        seen.add(words)
        entries.append(ConnectiveLexiconEntry(words, category))
    return entries


def default_lexicon() -> list[ConnectiveLexiconEntry]:
    """The bundled list of explicit PDTB connectives."""
    text = resources.files("discparse").joinpath("data/connectives.tsv").read_text("utf-8")
    return read_lexicon(text)
