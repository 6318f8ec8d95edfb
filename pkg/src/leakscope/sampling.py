"""Leakage-aware train/test splits, controlled samples and treebank statistics."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .conllu import Sentence, Treebank, to_dep_trees
from .graphcore import LabelMode, equivalence_classes, forms

AUTO = "auto"


@dataclass(frozen=True)
class SplitSpec:
    mode: LabelMode = LabelMode.NONE
    sample_size: int | str = AUTO
    seed: int = 0

    def __post_init__(self):
        if self.sample_size != AUTO and (not isinstance(self.sample_size, int) or self.sample_size < 1):
            raise ValueError(f"sample_size must be a positive integer or 'auto', got {self.sample_size!r}")


@dataclass(frozen=True)
class LeakageSplit:
    train_leaky: Treebank
    train_nonleaky: Treebank
    test_leaky: Treebank
    test_nonleaky: Treebank

    def __iter__(self):
        return iter((self.train_leaky, self.train_nonleaky, self.test_leaky, self.test_nonleaky))


@dataclass(frozen=True)
class TreebankStats:
    sentence_count: int
    diversity: float
    avg_length: float
    avg_depth: float
    avg_dep_length: float
    # no token attaches to anything but the root; avg_dep_length reported as 0
    dep_length_undefined: bool = False

    def as_dict(self) -> dict:
        return asdict(self)


class InfeasibleSampleError(ValueError):
    def __init__(self, message: str, feasible_max: int):
        self.feasible_max = feasible_max
        super().__init__(message)


def _rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def split_by_leakage(train: Treebank, test: Treebank, mode: LabelMode | str = LabelMode.NONE) -> LeakageSplit:
    """Partition both sides by whether a tree's class occurs on the other side."""
    train_forms = forms(to_dep_trees(train), mode)
    test_forms = forms(to_dep_trees(test), mode)
    train_set, test_set = set(train_forms), set(test_forms)
    tr_leak = [i for i, f in enumerate(train_forms) if f in test_set]
    tr_non = [i for i, f in enumerate(train_forms) if f not in test_set]
    te_leak = [i for i, f in enumerate(test_forms) if f in train_set]
    te_non = [i for i, f in enumerate(test_forms) if f not in train_set]
    return LeakageSplit(
        train.subset(tr_leak, f"{train.source_id}.leaky"),
        train.subset(tr_non, f"{train.source_id}.nonleaky"),
        test.subset(te_leak, f"{test.source_id}.leaky"),
        test.subset(te_non, f"{test.source_id}.nonleaky"),
    )


def sample_random(tb: Treebank, n: int, seed=0, allow_empty: bool = False) -> Treebank:
    """Uniform sample without replacement; corpus order is kept."""
    if n > len(tb):
        raise InfeasibleSampleError(f"cannot sample {n} sentences from {len(tb)}", len(tb))
    if n < 0 or (n == 0 and not allow_empty):
        raise ValueError("sample size must be positive (pass allow_empty for n=0)")
    idx = np.sort(_rng(seed).choice(len(tb), size=n, replace=False))
    return tb.subset(idx.tolist(), f"{tb.source_id}.random")


def sample_diverse(tb: Treebank, n: int | None = None, mode: LabelMode | str = LabelMode.NONE, seed=0) -> Treebank:
    """One random representative per isomorphism class.

    With ``n`` smaller than the class count, ``n`` classes are chosen
    uniformly.  ``n=None`` keeps every class.
    """
    rng = _rng(seed)
    classes = list(equivalence_classes(to_dep_trees(tb), mode).values())
    if n is None:
        n = len(classes)
    if n > len(classes):
        raise InfeasibleSampleError(f"only {len(classes)} equivalence classes", len(classes))
    if n < 1:
        raise ValueError("sample size must be positive")
    reps = [members[int(rng.integers(len(members)))] for members in classes]
    if n < len(classes):
        keep = rng.choice(len(classes), size=n, replace=False)
        reps = [reps[i] for i in keep]
    return tb.subset(sorted(reps), f"{tb.source_id}.diverse")


def size_control(samples: Sequence[Treebank], seed=0) -> list[Treebank]:
    """Subsample every treebank down to the smallest size."""
    if any(len(s) == 0 for s in samples):
        raise ValueError("size_control needs nonempty treebanks")
    if not samples:
        return []
    rng = _rng(seed)
    target = min(len(s) for s in samples)
    out = []
    for s in samples:
        if len(s) == target:
            out.append(s)
            continue
        idx = np.sort(rng.choice(len(s), size=target, replace=False))
        out.append(s.subset(idx.tolist()))
    return out


def sentence_depth(s: Sentence) -> int:
    """Tokens on the longest path from the root token down to a leaf."""
    head = {t.id: t.head for t in s.tokens}
    depth: dict[int, int] = {0: 0}

    def resolve(i: int) -> int:
        path = []
        while i not in depth:
            path.append(i)
            i = head[i]
        d = depth[i]
        for j in reversed(path):
            d += 1
            depth[j] = d
        return d

    return max((resolve(t.id) for t in s.tokens), default=0)


def treebank_stats(tb: Treebank, mode: LabelMode | str = LabelMode.NONE) -> TreebankStats:
    if len(tb) == 0:
        raise ValueError("treebank_stats needs a nonempty treebank")
    trees = to_dep_trees(tb)
    n_classes = len(set(forms(trees, mode)))
    lengths = [len(s) for s in tb]
    depths = [sentence_depth(s) for s in tb]
    dep_lengths = [abs(t.head - t.id) for s in tb for t in s.tokens if t.head != 0]
    return TreebankStats(
        sentence_count=len(tb),
        diversity=n_classes / len(tb),
        avg_length=float(np.mean(lengths)),
        avg_depth=float(np.mean(depths)),
        avg_dep_length=float(np.mean(dep_lengths)) if dep_lengths else 0.0,
        dep_length_undefined=not dep_lengths,
    )
