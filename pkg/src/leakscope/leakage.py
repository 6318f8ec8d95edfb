"""Whole-tree and subtree leakage between training and test trees."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from itertools import chain
from typing import Iterable, Sequence

from .conllu import DepTree
from .graphcore import CanonicalForm, LabelMode, forms


class Level(enum.Enum):
    TREE = "tree"
    SUBTREE = "subtree"


class Weighting(enum.Enum):
    INSTANCE = "instance"
    TYPE = "type"


class SubtreeStyle(enum.Enum):
    # parent + focus + all children, for every token
    TEXT = "text"
    # as TEXT, except the root token's unit is the bare root edge
    FIGURE = "figure"


@dataclass(frozen=True)
class SubtreeUnit:
    """Local fragment around one token.

    ``tree`` is re-indexed: the parent is node 0, the focus token node 1 and
    its children follow in surface order.  ``focus`` is the token id in the
    source sentence.
    """

    focus: int
    tree: DepTree


@dataclass(frozen=True)
class LeakageReport:
    level: Level
    mode: LabelMode
    leaked_count: int
    total_count: int
    weighting: Weighting = Weighting.INSTANCE
    # set when total_count == 0 and the fraction was defined as 0
    empty: bool = False

    @property
    def leaked_fraction(self) -> float:
        if self.total_count == 0:
            return 0.0
        return self.leaked_count / self.total_count

    def as_dict(self) -> dict:
        return {
            "level": self.level.value,
            "mode": self.mode.value,
            "weighting": self.weighting.value,
            "leaked_count": self.leaked_count,
            "total_count": self.total_count,
            "leaked_fraction": self.leaked_fraction,
            "empty": self.empty,
        }


def decompose_subtrees(t: DepTree, style: SubtreeStyle | str = SubtreeStyle.TEXT) -> list[SubtreeUnit]:
    """One unit per token: its parent edge plus the edges to all its children."""
    style = SubtreeStyle(style)
    labels = t.labels
    children = t.children
    parent = t.parent
    units = []
    for idx, _ in t.nodes:
        if idx == t.root_index:
            continue
        p, plab = parent[idx]
        nodes = [(0, labels[p]), (1, labels[idx])]
        edges = [(0, 1, plab)]
        if not (style is SubtreeStyle.FIGURE and p == t.root_index):
            for k, (lab, c) in enumerate(sorted(children[idx], key=lambda x: x[1]), start=2):
                nodes.append((k, labels[c]))
                edges.append((1, k, lab))
        units.append(SubtreeUnit(idx, DepTree(tuple(nodes), tuple(edges), 0)))
    return units


def _subtree_forms(trees: Iterable[DepTree], mode: LabelMode, style: SubtreeStyle) -> list[CanonicalForm]:
    units = [u.tree for t in trees for u in decompose_subtrees(t, style)]
    return forms(units, mode)


def _report(test_forms: Sequence[CanonicalForm], train_set: set, level, mode, weighting) -> LeakageReport:
    if weighting is Weighting.TYPE:
        pool: Sequence[CanonicalForm] = list(dict.fromkeys(test_forms))
    else:
        pool = test_forms
    leaked = sum(1 for f in pool if f in train_set)
    return LeakageReport(level, mode, leaked, len(pool), weighting, empty=len(pool) == 0)


def tree_leakage(
    train: Sequence[DepTree],
    test: Sequence[DepTree],
    mode: LabelMode | str,
    weighting: Weighting | str = Weighting.INSTANCE,
) -> LeakageReport:
    """Fraction of test trees with an isomorphic counterpart in ``train``."""
    mode = LabelMode.parse(mode)
    train_set = set(forms(train, mode))
    return _report(forms(test, mode), train_set, Level.TREE, mode, Weighting(weighting))


def subtree_leakage(
    train: Sequence[DepTree],
    test: Sequence[DepTree],
    mode: LabelMode | str,
    weighting: Weighting | str = Weighting.INSTANCE,
    style: SubtreeStyle | str = SubtreeStyle.TEXT,
) -> LeakageReport:
    mode = LabelMode.parse(mode)
    style = SubtreeStyle(style)
    train_set = set(_subtree_forms(train, mode, style))
    return _report(_subtree_forms(test, mode, style), train_set, Level.SUBTREE, mode, Weighting(weighting))


def multi_train_leakage(
    train_sets: Sequence[Sequence[DepTree]],
    test: Sequence[DepTree],
    level: Level | str,
    mode: LabelMode | str,
    weighting: Weighting | str = Weighting.INSTANCE,
    style: SubtreeStyle | str = SubtreeStyle.TEXT,
) -> LeakageReport:
    """Leakage against the union of several training sets."""
    pooled = list(chain.from_iterable(train_sets))
    if Level(level) is Level.TREE:
        return tree_leakage(pooled, test, mode, weighting)
    return subtree_leakage(pooled, test, mode, weighting, style)
