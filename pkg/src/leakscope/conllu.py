"""CoNLL-U reading, writing, validation and conversion to dependency trees."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

ROOT_LABEL = "rt"
ROOT_EDGE = "root"


class ConlluError(ValueError):
    """Malformed CoNLL-U input. ``lineno`` is 1-based."""

    def __init__(self, message: str, lineno: int | None = None, source: str | None = None):
        self.message = message
        self.lineno = lineno
        self.source = source
        super().__init__(str(self))

    def __str__(self) -> str:
        where = ""
        if self.source is not None:
            where = f"{self.source}:"
        if self.lineno is not None:
            where += f"{self.lineno}:"
        return f"{where} {self.message}" if where else self.message


class InvalidTreeError(ValueError):
    """Raised when a sentence that fails validation is converted to a tree."""

    def __init__(self, report: "ValidationReport"):
        self.report = report
        super().__init__("invalid dependency tree: " + "; ".join(report.problems))


@dataclass(frozen=True)
class Token:
    id: int
    form: str
    lemma: str
    upos: str
    xpos: str
    feats: str
    head: int
    deprel: str
    deps: str = "_"
    misc: str = "_"

    def to_line(self) -> str:
        return "\t".join([
            str(self.id), self.form, self.lemma, self.upos, self.xpos,
            self.feats, str(self.head), self.deprel, self.deps, self.misc,
        ])


@dataclass(frozen=True)
class MultiwordRange:
    """A ``3-4`` style surface token, kept verbatim."""

    start: int
    end: int
    form: str
    rest: tuple[str, ...] = ("_",) * 8

    def to_line(self) -> str:
        return "\t".join([f"{self.start}-{self.end}", self.form, *self.rest])


@dataclass(frozen=True)
class Sentence:
    tokens: tuple[Token, ...]
    comments: tuple[str, ...] = ()
    multiword_ranges: tuple[MultiwordRange, ...] = ()
    # number of enhanced-UD empty nodes dropped while parsing
    dropped_empty_nodes: int = 0
    lineno: int | None = field(default=None, compare=False)

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def text(self) -> str | None:
        for c in self.comments:
            key, sep, value = c.lstrip("#").partition("=")
            if sep and key.strip() == "text":
                return value.strip()
        return None

    @property
    def sent_id(self) -> str | None:
        for c in self.comments:
            key, sep, value = c.lstrip("#").partition("=")
            if sep and key.strip() == "sent_id":
                return value.strip()
        return None


@dataclass(frozen=True)
class Treebank:
    sentences: tuple[Sentence, ...]
    source_id: str = ""

    def __len__(self) -> int:
        return len(self.sentences)

    def __iter__(self):
        return iter(self.sentences)

    def __getitem__(self, i):
        return self.sentences[i]

    @property
    def token_count(self) -> int:
        return sum(len(s) for s in self.sentences)

    def subset(self, indices: Iterable[int], source_id: str | None = None) -> "Treebank":
        return Treebank(
            tuple(self.sentences[i] for i in indices),
            self.source_id if source_id is None else source_id,
        )


@dataclass(frozen=True)
class DepTree:
    """Rooted tree with labelled nodes and labelled edges.

    ``nodes`` holds ``(index, label)`` pairs and ``edges`` holds
    ``(head, dependent, label)`` triples.  Trees built by :func:`to_dep_tree`
    additionally carry an artificial root at index 0 labelled ``"rt"``.
    """

    nodes: tuple[tuple[int, str], ...]
    edges: tuple[tuple[int, int, str], ...]
    root_index: int = 0

    def __len__(self) -> int:
        return len(self.nodes)

    @cached_property
    def labels(self) -> dict[int, str]:
        return dict(self.nodes)

    @cached_property
    def children(self) -> dict[int, list[tuple[str, int]]]:
        out: dict[int, list[tuple[str, int]]] = {i: [] for i, _ in self.nodes}
        for h, d, lab in self.edges:
            out[h].append((lab, d))
        return out

    @cached_property
    def parent(self) -> dict[int, tuple[int, str]]:
        return {d: (h, lab) for h, d, lab in self.edges}

    def is_tree(self) -> bool:
        idx = [i for i, _ in self.nodes]
        if len(set(idx)) != len(idx) or self.root_index not in self.labels:
            return False
        if len(self.edges) != len(idx) - 1:
            return False
        incoming = [d for _, d, _ in self.edges]
        if len(set(incoming)) != len(incoming) or self.root_index in incoming:
            return False
        if any(h not in self.labels or d not in self.labels for h, d, _ in self.edges):
            return False
        seen = {self.root_index}
        stack = [self.root_index]
        while stack:
            for _, c in self.children[stack.pop()]:
                if c not in seen:
                    seen.add(c)
                    stack.append(c)
        return len(seen) == len(idx)


@dataclass(frozen=True)
class ValidationReport:
    single_root: bool
    acyclic: bool
    heads_in_range: bool
    ids_contiguous: bool
    problems: tuple[str, ...] = ()

    @property
    def valid(self) -> bool:
        return self.single_root and self.acyclic and self.heads_in_range and self.ids_contiguous

    def __bool__(self) -> bool:
        return self.valid


def _parse_int(value: str, what: str, lineno: int) -> int:
    try:
        n = int(value)
    except ValueError:
        raise ConlluError(f"non-numeric {what} {value!r}", lineno) from None
    if n < 0:
        raise ConlluError(f"negative {what} {value!r}", lineno)
    return n


def _build_sentence(comments, tokens, ranges, empties, lineno) -> Sentence:
    return Sentence(tuple(tokens), tuple(comments), tuple(ranges), empties, lineno)


def parse_conllu(text: str, source_id: str = "") -> Treebank:
    """Parse CoNLL-U text into a :class:`Treebank`.

    Comments and multiword ranges are preserved; empty nodes (``3.1``) are
    dropped and counted in ``Sentence.dropped_empty_nodes``.  Head values are
    not range-checked here, see :func:`validate_tree`.
    """
    sentences: list[Sentence] = []
    comments: list[str] = []
    tokens: list[Token] = []
    ranges: list[MultiwordRange] = []
    empties = 0
    start: int | None = None

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.rstrip("\r")
        if not line.strip():
            if tokens or comments or ranges:
                if not tokens:
                    raise ConlluError("sentence without tokens", start)
                sentences.append(_build_sentence(comments, tokens, ranges, empties, start))
            comments, tokens, ranges, empties, start = [], [], [], 0, None
            continue
        if start is None:
            start = lineno
        if line.startswith("#"):
            comments.append(line)
            continue
        cols = line.split("\t")
        if len(cols) != 10:
            raise ConlluError(f"expected 10 tab-separated fields, got {len(cols)}", lineno)
        tid = cols[0]
        if "." in tid:
            empties += 1
            continue
        if "-" in tid:
            a, _, b = tid.partition("-")
            ranges.append(MultiwordRange(
                _parse_int(a, "range start", lineno), _parse_int(b, "range end", lineno),
                cols[1], tuple(cols[2:]),
            ))
            continue
        i = _parse_int(tid, "id", lineno)
        if i < 1:
            raise ConlluError(f"token id must be >= 1, got {i}", lineno)
        head = _parse_int(cols[6], "head", lineno)
        if not cols[3] or not cols[7]:
            raise ConlluError("empty UPOS or DEPREL field", lineno)
        tokens.append(Token(i, cols[1], cols[2], cols[3], cols[4], cols[5], head, cols[7], cols[8], cols[9]))

    if tokens or comments or ranges:
        if not tokens:
            raise ConlluError("sentence without tokens", start)
        sentences.append(_build_sentence(comments, tokens, ranges, empties, start))
    return Treebank(tuple(sentences), source_id)


def serialize_sentence(s: Sentence) -> str:
    lines = list(s.comments)
    by_start: dict[int, list[MultiwordRange]] = {}
    for r in s.multiword_ranges:
        by_start.setdefault(r.start, []).append(r)
    for tok in s.tokens:
        lines.extend(r.to_line() for r in by_start.pop(tok.id, ()))
        lines.append(tok.to_line())
    for leftover in by_start.values():
        lines.extend(r.to_line() for r in leftover)
    return "\n".join(lines) + "\n"


def serialize_conllu(tb: Treebank, check: bool = False) -> str:
    """Serialize a treebank; each sentence is followed by one blank line.

    With ``check=True`` every sentence must pass :func:`validate_tree`.
    """
    out = []
    for s in tb.sentences:
        if check:
            report = validate_tree(s)
            if not report.valid:
                raise InvalidTreeError(report)
        out.append(serialize_sentence(s) + "\n")
    return "".join(out)


def validate_tree(s: Sentence) -> ValidationReport:
    problems = []
    n = len(s.tokens)

    ids_ok = [t.id for t in s.tokens] == list(range(1, n + 1))
    if not ids_ok:
        problems.append("token ids are not 1..n in order")

    roots = [t.id for t in s.tokens if t.head == 0]
    single_root = len(roots) == 1
    if not single_root:
        problems.append(f"expected exactly one root, found {len(roots)}")

    bad_heads = [t.id for t in s.tokens if t.head > n]
    in_range = not bad_heads
    if not in_range:
        problems.append(f"head out of range for tokens {bad_heads}")

    head_of = {t.id: t.head for t in s.tokens}
    acyclic = True
    state: dict[int, int] = {}  # 1 = on current path, 2 = finished
    for t in s.tokens:
        path = []
        cur = t.id
        while cur in head_of and cur not in state:
            state[cur] = 1
            path.append(cur)
            cur = head_of[cur]
        if cur in state and state[cur] == 1:
            acyclic = False
        for p in path:
            state[p] = 2
        if not acyclic:
            break
    if not acyclic:
        problems.append("cycle in head relation")

    return ValidationReport(single_root, acyclic, in_range, ids_ok, tuple(problems))


def to_dep_tree(s: Sentence) -> DepTree:
    """Materialize the artificial root and build the labelled tree."""
    report = validate_tree(s)
    if not report.valid:
        raise InvalidTreeError(report)
    nodes = ((0, ROOT_LABEL),) + tuple((t.id, t.upos) for t in s.tokens)
    edges = tuple((t.head, t.id, t.deprel) for t in s.tokens)
    return DepTree(nodes, edges, 0)


def to_dep_trees(tb: Treebank | Sequence[Sentence]) -> list[DepTree]:
    return [to_dep_tree(s) for s in tb]


def strip_subtypes(tb: Treebank) -> Treebank:
    """Truncate every deprel at ``:`` (``nsubj:pass`` -> ``nsubj``)."""
    sents = []
    for s in tb.sentences:
        toks = tuple(dataclasses.replace(t, deprel=t.deprel.split(":", 1)[0]) for t in s.tokens)
        sents.append(dataclasses.replace(s, tokens=toks))
    return Treebank(tuple(sents), tb.source_id)


def read_treebank(path: str | Path, strip_deprel_subtypes: bool = False) -> Treebank:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    try:
        tb = parse_conllu(text, source_id=path.stem)
    except ConlluError as e:
        e.source = str(path)
        raise
    return strip_subtypes(tb) if strip_deprel_subtypes else tb


def write_treebank(tb: Treebank, path: str | Path) -> None:
    Path(path).write_text(serialize_conllu(tb), encoding="utf-8")
