"""Shared builders and independent oracles for the test suite."""

from __future__ import annotations

import random
from fractions import Fraction

import numpy as np
from hypothesis import strategies as st

from leakscope.conllu import DepTree, Sentence, Token, Treebank, parse_conllu, to_dep_tree

UPOS = ("NOUN", "VERB", "ADJ", "DET", "PRON", "ADP", "ADV", "PROPN")
DEPRELS = ("nsubj", "obj", "amod", "det", "case", "obl", "advmod", "nmod", "conj")


def sentence(rows, comments=()) -> Sentence:
    """Build a sentence from ``(form, upos, head, deprel)`` rows."""
    toks = tuple(
        Token(i, form, form.lower(), upos, "_", "_", head, deprel)
        for i, (form, upos, head, deprel) in enumerate(rows, 1)
    )
    return Sentence(toks, tuple(comments))


def tree(rows) -> DepTree:
    return to_dep_tree(sentence(rows))


def treebank(*sents, source_id="tb") -> Treebank:
    return Treebank(tuple(sents), source_id)


SHE_SAW_IT = [("She", "PRON", 2, "nsubj"), ("saw", "VERB", 0, "root"), ("it", "PRON", 2, "dobj")]
THE_BIG_BOAT = [("The", "DET", 3, "det"), ("big", "ADJ", 3, "amod"), ("boat", "NOUN", 0, "root")]
MORNING_FLIGHT = [
    ("I", "PRON", 2, "nsubj"),
    ("prefer", "VERB", 0, "root"),
    ("a", "DET", 5, "det"),
    ("morning", "NOUN", 5, "nmod"),
    ("flight", "NOUN", 2, "dobj"),
]
FLIGHT = [
    ("I", "PRON", 2, "nsubj"),
    ("prefer", "VERB", 0, "root"),
    ("a", "DET", 4, "det"),
    ("flight", "NOUN", 2, "dobj"),
]

MORNING_FLIGHT_CONLLU = (
    "# sent_id = fig2\n"
    "# text = I prefer a morning flight\n"
    "1\tI\tI\tPRON\tPRP\t_\t2\tnsubj\t_\t_\n"
    "2\tprefer\tprefer\tVERB\tVBP\t_\t0\troot\t_\t_\n"
    "3\ta\ta\tDET\tDT\t_\t5\tdet\t_\t_\n"
    "4\tmorning\tmorning\tNOUN\tNN\t_\t5\tnmod\t_\t_\n"
    "5\tflight\tflight\tNOUN\tNN\t_\t2\tdobj\t_\t_\n"
)


def random_parents(rng: random.Random, n: int) -> list[int]:
    """Random rooted tree on tokens 1..n as a head list (one head is 0)."""
    order = list(range(1, n + 1))
    rng.shuffle(order)
    heads = [0] * (n + 1)
    for k, tok in enumerate(order):
        heads[tok] = 0 if k == 0 else order[rng.randrange(k)]
    return heads[1:]


def random_sentence(rng: random.Random, n: int) -> Sentence:
    heads = random_parents(rng, n)
    rows = [
        (f"w{i}", rng.choice(UPOS), h, "root" if h == 0 else rng.choice(DEPRELS))
        for i, h in enumerate(heads, 1)
    ]
    return sentence(rows)


@st.composite
def sentences(draw, min_tokens=1, max_tokens=12, upos=UPOS, deprels=DEPRELS):
    n = draw(st.integers(min_tokens, max_tokens))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = random.Random(seed)
    heads = random_parents(rng, n)
    rows = []
    for i, h in enumerate(heads, 1):
        rows.append((
            draw(st.text("abcxyzé", min_size=1, max_size=4)),
            draw(st.sampled_from(upos)),
            h,
            "root" if h == 0 else draw(st.sampled_from(deprels)),
        ))
    return sentence(rows)


def trees_from_conllu(text: str) -> list[DepTree]:
    return [to_dep_tree(s) for s in parse_conllu(text)]


# -- regression oracles (exact rational arithmetic) ---------------------------

def normal_equations(rows):
    """Solve (X^T X) b = X^T y exactly; rows are (size, leakage, score)."""
    X = [[Fraction(s), Fraction(p), Fraction(1)] for s, p, _ in rows]
    y = [Fraction(v) for _, _, v in rows]
    A = [[sum(X[r][i] * X[r][j] for r in range(len(X))) for j in range(3)] for i in range(3)]
    b = [sum(X[r][i] * y[r] for r in range(len(X))) for i in range(3)]
    # Gauss-Jordan elimination
    M = [A[i] + [b[i]] for i in range(3)]
    for c in range(3):
        piv = next(r for r in range(c, 3) if M[r][c] != 0)
        M[c], M[piv] = M[piv], M[c]
        M[c] = [v / M[c][c] for v in M[c]]
        for r in range(3):
            if r != c and M[r][c] != 0:
                M[r] = [a - M[r][c] * b_ for a, b_ in zip(M[r], M[c])]
    return [M[i][3] for i in range(3)]


def fold_by_fold(entries, k, seed):
    """Scripted k-fold CV: same fold rule, exact fits, exact metrics."""
    n = len(entries)
    canonical = sorted(range(n), key=lambda i: (entries[i].treebank_id, i))
    perm = np.random.default_rng(seed).permutation(n)
    shuffled = [canonical[p] for p in perm]
    base, extra = divmod(n, k)
    folds, start = [], 0
    for f in range(k):
        size = base + (1 if f < extra else 0)
        folds.append(shuffled[start:start + size])
        start += size
    preds = {}
    for held in folds:
        rest = [entries[i] for i in range(n) if i not in held]
        a, b, g = normal_equations([(e.size_ts, e.leakage_phi, e.performance) for e in rest])
        for i in held:
            e = entries[i]
            preds[i] = a * Fraction(e.size_ts) + b * Fraction(e.leakage_phi) + g
    ys = [Fraction(e.performance) for e in entries]
    res = [ys[i] - preds[i] for i in range(n)]

    def var(v):
        m = sum(v) / len(v)
        return sum((x - m) ** 2 for x in v) / len(v)

    ev = 1 - var(res) / var(ys)
    mae = sum(abs(r) for r in res) / n
    return float(ev), float(mae)


def rank_oracle(xs):
    """Average rank by counting: 1 + #smaller + (#equal - 1) / 2."""
    return [
        Fraction(1) + sum(1 for y in xs if y < x) + Fraction(sum(1 for y in xs if y == x) - 1, 2)
        for x in xs
    ]


def spearman_oracle(xs, ys) -> Fraction | float:
    rx, ry = rank_oracle(xs), rank_oracle(ys)
    n = len(xs)
    mx, my = sum(rx) / n, sum(ry) / n
    cov = sum((a - mx) * (b - my) for a, b in zip(rx, ry))
    vx = sum((a - mx) ** 2 for a in rx)
    vy = sum((b - my) ** 2 for b in ry)
    if vx == vy:
        return cov / vx
    return float(cov) / (float(vx) * float(vy)) ** 0.5
