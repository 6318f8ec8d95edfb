"""Label reduction, canonical forms and isomorphism classes of rooted trees.

Isomorphism between reduced trees is decided by comparing canonical
encodings built bottom-up (AHU style): a node encodes as its label followed by
the sorted list of ``(edge label, child encoding)`` pairs.  Two trees are
isomorphic as rooted labelled directed trees exactly when their encodings are
equal, so large tree sets can be compared by hashing instead of pairwise
matching.  :func:`brute_force_isomorphic` is an independent exhaustive check
for small trees.
"""

from __future__ import annotations

import enum
import hashlib
import json
from dataclasses import dataclass
from typing import Iterable, Sequence

from .conllu import DepTree

BRUTE_FORCE_MAX_NODES = 8


class LabelMode(enum.Enum):
    NONE = "none"
    EDGES = "edges"
    NODES_EDGES = "nodes_edges"
    # node labels only; not part of the default report set
    NODES = "nodes"

    @property
    def keeps_nodes(self) -> bool:
        return self in (LabelMode.NODES, LabelMode.NODES_EDGES)

    @property
    def keeps_edges(self) -> bool:
        return self in (LabelMode.EDGES, LabelMode.NODES_EDGES)

    @classmethod
    def parse(cls, value: "str | LabelMode") -> "LabelMode":
        if isinstance(value, LabelMode):
            return value
        v = value.strip().lower().replace("+", "_").replace("-", "_")
        for m in cls:
            if m.value == v or m.name.lower() == v:
                return m
        raise ValueError(f"unknown label mode {value!r}")


DEFAULT_MODES = (LabelMode.NONE, LabelMode.EDGES, LabelMode.NODES_EDGES)


@dataclass(frozen=True)
class ReducedTree(DepTree):
    mode: LabelMode = LabelMode.NODES_EDGES


@dataclass(frozen=True, order=True)
class CanonicalForm:
    fingerprint: bytes

    def digest(self) -> bytes:
        """128-bit digest, for compact storage only."""
        return hashlib.blake2b(self.fingerprint, digest_size=16).digest()

    def __str__(self) -> str:
        return self.fingerprint.decode("utf-8")


def reduce(t: DepTree, mode: LabelMode | str) -> ReducedTree:
    mode = LabelMode.parse(mode)
    if isinstance(t, ReducedTree) and t.mode == mode:
        return t
    if mode.keeps_nodes:
        nodes = t.nodes
    else:
        nodes = tuple((i, "") for i, _ in t.nodes)
    if mode.keeps_edges:
        edges = t.edges
    else:
        edges = tuple((h, d, "") for h, d, _ in t.edges)
    return ReducedTree(nodes, edges, t.root_index, mode)


def _enc(label: str) -> str:
    return json.dumps(label, ensure_ascii=False)


def canonical_form(t: DepTree) -> CanonicalForm:
    """Order-independent encoding of ``t``'s labels and shape.

    Labels are taken as they stand, so reduce the tree first.  Runs
    iteratively; deep chains do not hit the recursion limit.
    """
    labels = t.labels
    children = t.children
    enc: dict[int, str] = {}
    stack = [(t.root_index, False)]
    while stack:
        node, expanded = stack.pop()
        kids = children[node]
        if not kids:
            enc[node] = "[" + _enc(labels[node]) + "]"
            continue
        if not expanded:
            stack.append((node, True))
            stack.extend((c, False) for _, c in kids)
            continue
        pairs = sorted((lab, enc.pop(c)) for lab, c in kids)
        body = ",".join("[" + _enc(lab) + "," + e + "]" for lab, e in pairs)
        enc[node] = "[" + _enc(labels[node]) + ",[" + body + "]]"
    return CanonicalForm(enc[t.root_index].encode("utf-8"))


def tree_form(t: DepTree, mode: LabelMode | str) -> CanonicalForm:
    return canonical_form(reduce(t, mode))


def brute_force_isomorphic(a: DepTree, b: DepTree, mode: LabelMode | str) -> bool:
    """Search for a label- and edge-preserving bijection from ``a`` onto ``b``.

    Enumerates node assignments with backtracking; only usable for trees of
    at most :data:`BRUTE_FORCE_MAX_NODES` nodes.
    """
    mode = LabelMode.parse(mode)
    if max(len(a.nodes), len(b.nodes)) > BRUTE_FORCE_MAX_NODES:
        raise ValueError(f"brute force limited to {BRUTE_FORCE_MAX_NODES} nodes")
    if len(a.nodes) != len(b.nodes) or len(a.edges) != len(b.edges):
        return False

    def node_label(t, i):
        return t.labels[i] if mode.keeps_nodes else ""

    def edge_map(t):
        return {(h, d): (lab if mode.keeps_edges else "") for h, d, lab in t.edges}

    ea, eb = edge_map(a), edge_map(b)
    order = [i for i, _ in a.nodes]
    b_nodes = [i for i, _ in b.nodes]
    mapping: dict[int, int] = {}
    used: set[int] = set()

    def consistent(x: int, y: int) -> bool:
        if node_label(a, x) != node_label(b, y):
            return False
        for u, v in mapping.items():
            if ((x, u) in ea) != ((y, v) in eb) or ((u, x) in ea) != ((v, y) in eb):
                return False
            if (x, u) in ea and ea[(x, u)] != eb[(y, v)]:
                return False
            if (u, x) in ea and ea[(u, x)] != eb[(v, y)]:
                return False
        return True

    def search(k: int) -> bool:
        if k == len(order):
            return True
        x = order[k]
        for y in b_nodes:
            if y in used or not consistent(x, y):
                continue
            mapping[x] = y
            used.add(y)
            if search(k + 1):
                return True
            del mapping[x]
            used.discard(y)
        return False

    return search(0)


def equivalence_classes(
    trees: Sequence[DepTree], mode: LabelMode | str
) -> dict[CanonicalForm, list[int]]:
    """Group tree indices by canonical form; classes keyed in first-seen order."""
    classes: dict[CanonicalForm, list[int]] = {}
    for i, form in enumerate(forms(trees, mode)):
        classes.setdefault(form, []).append(i)
    return classes


def forms(trees: Iterable[DepTree], mode: LabelMode | str) -> list[CanonicalForm]:
    from .parallel import parallel_map

    mode = LabelMode.parse(mode)
    return parallel_map(_FormOf(mode), list(trees))


class _FormOf:
    # picklable callable for process pools
    def __init__(self, mode: LabelMode):
        self.mode = mode

    def __call__(self, t: DepTree) -> CanonicalForm:
        return canonical_form(reduce(t, self.mode))
