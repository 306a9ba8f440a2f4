"""Constituent and dependency utilities shared by the feature extractors."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .corpus import ConstTree, DepGraph, Document, TreeNode

NONE = "NONE"
UP, DOWN = "up", "down"


class SpanError(ValueError):
    """A token span does not lie inside the tree it is looked up in."""


def base_label(label: str) -> str:
    # strip function tags and indices (NP-SBJ-1 -> NP); keep -LRB- and friends
    if label.startswith("-"):
        return label
    return label.split("-")[0].split("=")[0]


def self_category_node(tree: ConstTree, span: Iterable[int]) -> TreeNode:
    positions = sorted(span)
    if not positions:
        raise SpanError("empty span")
    if positions[0] < tree.first or positions[-1] > tree.last:
        raise SpanError(f"span {positions} crosses the sentence boundary")
    node = tree.preterminal(positions[0])
    if len(positions) == 1:
        return node
    while not node.covers(positions):
        node = node.parent
    return node


def self_category(tree: ConstTree, span: Iterable[int]) -> str:
    return self_category_node(tree, span).label


def parent_category(tree: ConstTree, span: Iterable[int]) -> str:
    parent = self_category_node(tree, span).parent
    return parent.label if parent is not None else NONE


def _sibling(node: TreeNode, offset: int) -> TreeNode | None:
    if node.parent is None:
        return None
    siblings = node.parent.children
    i = siblings.index(node) + offset
    return siblings[i] if 0 <= i < len(siblings) else None


def left_sibling_category(tree: ConstTree, span: Iterable[int]) -> str:
    sib = _sibling(self_category_node(tree, span), -1)
    return sib.label if sib is not None else NONE


def right_sibling_category(tree: ConstTree, span: Iterable[int]) -> str:
    sib = _sibling(self_category_node(tree, span), +1)
    return sib.label if sib is not None else NONE


def right_sibling_contains_vp(tree: ConstTree, span: Iterable[int]) -> bool:
    sib = _sibling(self_category_node(tree, span), +1)
    if sib is None:
        return False
    return any(base_label(n.label) == "VP" for n in sib.iter_nodes())


@dataclass(frozen=True)
class ConstPath:
    """Node labels from a source node to a target node via their lowest common ancestor.

    ``directions[i]`` is the hop from ``labels[i]`` to ``labels[i + 1]``.
    """

    labels: tuple[str, ...]
    directions: tuple[str, ...]
    preterminal: tuple[bool, ...]

    @property
    def hops(self) -> int:
        return len(self.directions)

    def reversed(self) -> "ConstPath":
        flip = {UP: DOWN, DOWN: UP}
        return ConstPath(
            self.labels[::-1],
            tuple(flip[d] for d in reversed(self.directions)),
            self.preterminal[::-1],
        )

    def render(self) -> str:
        return _render(self.labels, self.directions)


def _render(labels, directions) -> str:
    out = [labels[0]] if labels else []
    for label, d in zip(labels[1:], directions):
        out.append("/" if d == UP else "\\")
        out.append(label)
    return "".join(out)


def _ancestors(node: TreeNode) -> list[TreeNode]:
    chain = [node]
    while chain[-1].parent is not None:
        chain.append(chain[-1].parent)
    return chain


def const_path(tree: ConstTree, from_token: int, to_span: Iterable[int]) -> ConstPath:
    source = tree.preterminal(from_token)
    target = self_category_node(tree, to_span)
    up = _ancestors(source)
    down = _ancestors(target)
    down_ids = {id(n) for n in down}
    lca_i = next(i for i, n in enumerate(up) if id(n) in down_ids)
    lca = up[lca_i]
    down_part = list(reversed(down[: down.index(lca)]))
    nodes = up[: lca_i + 1] + down_part
    directions = (UP,) * lca_i + (DOWN,) * len(down_part)
    return ConstPath(
        tuple(n.label for n in nodes),
        directions,
        tuple(n.is_preterminal for n in nodes),
    )


def collapsed_path(path: ConstPath) -> str:
    """Path rendering without preterminals, adjacent repeated labels merged."""
    labels: list[str] = []
    dirs: list[str] = []
    pending = None
    for i, label in enumerate(path.labels):
        if not path.preterminal[i]:
            if labels:
                dirs.append(pending)
            labels.append(label)
        if i < len(path.directions):
            pending = path.directions[i]
    merged_labels = labels[:1]
    merged_dirs: list[str] = []
    for label, d in zip(labels[1:], dirs):
        if label == merged_labels[-1]:
            continue
        merged_labels.append(label)
        merged_dirs.append(d)
    return _render(merged_labels, merged_dirs)


@dataclass(frozen=True)
class DepPath:
    """Arc labels with direction; ``up`` moves from a dependent to its head."""

    hops: tuple[tuple[str, str], ...]

    def __len__(self) -> int:
        return len(self.hops)

    def render(self) -> str:
        return "|".join(f"{d}:{label}" for label, d in self.hops)


def dep_path(graph: DepGraph, from_token: int, to_token: int) -> DepPath | str:
    if from_token not in graph or to_token not in graph:
        return NONE
    up = graph.path_to_root(from_token)
    down = graph.path_to_root(to_token)
    down_pos = {t: i for i, t in enumerate(down)}
    i = next(i for i, t in enumerate(up) if t in down_pos)
    j = down_pos[up[i]]
    hops = [(graph.label(t), UP) for t in up[:i]]
    hops += [(graph.label(t), DOWN) for t in reversed(down[:j])]
    return DepPath(tuple(hops))


def step_distance(doc: Document, token_a: int, token_b: int) -> int:
    """Dependency links plus sentence boundaries between two tokens.

    Across sentences the route goes through each sentence's dependency root.
    """
    sa = doc.sentence_of(token_a)
    sb = doc.sentence_of(token_b)
    if sa.index == sb.index:
        return len(dep_path(sa.dependency_graph, token_a, token_b))
    return (
        sa.dependency_graph.depth(token_a)
        + abs(sa.index - sb.index)
        + sb.dependency_graph.depth(token_b)
    )
