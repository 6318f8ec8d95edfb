"""Counterfactual removal of modifier subtrees, and construction counts."""

from __future__ import annotations

import dataclasses
from collections import Counter
from dataclasses import dataclass, field

from .conllu import MultiwordRange, Sentence, Token, Treebank

EDITED_MARKER = "# text_edited = true"
_OBJ_SYNONYMS = frozenset({"obj", "dobj"})


@dataclass(frozen=True)
class SurgerySpec:
    target_rel: str
    modifier_rel: str = "amod"
    # compare only the part before ':' (nsubj:pass counts as nsubj)
    match_prefix: bool = False
    # treat obj and dobj as the same relation
    obj_synonyms: bool = False

    def __post_init__(self):
        if self.target_rel == self.modifier_rel:
            raise ValueError("target_rel and modifier_rel must differ")

    def _matches(self, deprel: str, wanted: str) -> bool:
        if self.match_prefix:
            deprel = deprel.split(":", 1)[0]
            wanted = wanted.split(":", 1)[0]
        if deprel == wanted:
            return True
        return self.obj_synonyms and deprel in _OBJ_SYNONYMS and wanted in _OBJ_SYNONYMS

    def is_construction(self, tok: Token, by_id: dict[int, Token]) -> bool:
        if tok.head == 0 or not self._matches(tok.deprel, self.modifier_rel):
            return False
        head = by_id.get(tok.head)
        return head is not None and self._matches(head.deprel, self.target_rel)


@dataclass
class SurgeryReport:
    removal_count: int = 0
    removed_token_count: int = 0
    dropped_sentence_count: int = 0
    edited_sentence_count: int = 0
    removed_deprels: Counter = field(default_factory=Counter)

    def as_dict(self) -> dict:
        return {
            "removal_count": self.removal_count,
            "removed_token_count": self.removed_token_count,
            "dropped_sentence_count": self.dropped_sentence_count,
            "edited_sentence_count": self.edited_sentence_count,
            "removed_deprels": dict(sorted(self.removed_deprels.items())),
        }


def _constructions(s: Sentence, spec: SurgerySpec) -> list[Token]:
    by_id = {t.id: t for t in s.tokens}
    return [t for t in s.tokens if spec.is_construction(t, by_id)]


def count_constructions(tb: Treebank, spec: SurgerySpec) -> int:
    """Tokens labelled ``modifier_rel`` whose head is labelled ``target_rel``."""
    return sum(len(_constructions(s, spec)) for s in tb)


def _descendants(s: Sentence, roots: set[int]) -> set[int]:
    kids: dict[int, list[int]] = {}
    for t in s.tokens:
        kids.setdefault(t.head, []).append(t.id)
    out = set()
    stack = list(roots)
    while stack:
        i = stack.pop()
        if i in out:
            continue
        out.add(i)
        stack.extend(kids.get(i, ()))
    return out


def _edit_sentence(s: Sentence, spec: SurgerySpec, report: SurgeryReport) -> Sentence | None:
    hits = _constructions(s, spec)
    if not hits:
        return s
    removed = _descendants(s, {t.id for t in hits})
    report.removal_count += len(hits)
    report.removed_token_count += len(removed)
    report.removed_deprels.update(t.deprel for t in s.tokens if t.id in removed)
    kept = [t for t in s.tokens if t.id not in removed]
    if not kept:
        report.dropped_sentence_count += 1
        return None

    new_id = {t.id: k for k, t in enumerate(kept, 1)}
    new_id[0] = 0
    tokens = tuple(dataclasses.replace(t, id=new_id[t.id], head=new_id[t.head]) for t in kept)
    ranges = []
    for r in s.multiword_ranges:
        span = range(r.start, r.end + 1)
        if any(i in removed for i in span):
            continue
        ranges.append(MultiwordRange(new_id[r.start], new_id[r.end], r.form, r.rest))
    comments = s.comments
    if EDITED_MARKER not in comments:
        comments = comments + (EDITED_MARKER,)
    report.edited_sentence_count += 1
    return dataclasses.replace(s, tokens=tokens, comments=comments, multiword_ranges=tuple(ranges))


def remove_modifiers(tb: Treebank, spec: SurgerySpec) -> tuple[Treebank, SurgeryReport]:
    """Delete every matching modifier together with its whole subtree.

    Remaining tokens are renumbered 1..n and heads remapped.  Edited
    sentences keep their comments verbatim and gain ``# text_edited = true``.
    """
    report = SurgeryReport()
    out = []
    for s in tb:
        edited = _edit_sentence(s, spec, report)
        if edited is not None:
            out.append(edited)
    return Treebank(tuple(out), tb.source_id), report
