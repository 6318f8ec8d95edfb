import random

import pytest
from hypothesis import given, settings

from leakscope.conllu import (
    ConlluError,
    InvalidTreeError,
    MultiwordRange,
    Treebank,
    parse_conllu,
    serialize_conllu,
    strip_subtypes,
    to_dep_tree,
    validate_tree,
)

from helpers import MORNING_FLIGHT_CONLLU, SHE_SAW_IT, random_sentence, sentence, sentences


def test_parse_fig2_sentence():
    tb = parse_conllu(MORNING_FLIGHT_CONLLU)
    assert len(tb) == 1
    s = tb[0]
    assert [t.form for t in s.tokens] == ["I", "prefer", "a", "morning", "flight"]
    assert [t.upos for t in s.tokens] == ["PRON", "VERB", "DET", "NOUN", "NOUN"]
    assert [t.head for t in s.tokens] == [2, 0, 5, 5, 2]
    assert [t.deprel for t in s.tokens] == ["nsubj", "root", "det", "nmod", "dobj"]
    assert s.sent_id == "fig2"
    assert s.text == "I prefer a morning flight"


def test_parse_empty():
    assert len(parse_conllu("")) == 0
    assert len(parse_conllu("\n\n")) == 0


def test_wrong_field_count_names_line():
    bad = "# c\n1\ta\ta\tNOUN\t_\t_\t0\troot\t_\n"
    with pytest.raises(ConlluError) as exc:
        parse_conllu(bad)
    assert exc.value.lineno == 2
    assert "2:" in str(exc.value)


@pytest.mark.parametrize("line", [
    "x\ta\ta\tNOUN\t_\t_\t0\troot\t_\t_",
    "1\ta\ta\tNOUN\t_\t_\tH\troot\t_\t_",
    "0\ta\ta\tNOUN\t_\t_\t1\troot\t_\t_",
    "1\ta\ta\tNOUN\t_\t_\t-1\troot\t_\t_",
])
def test_non_numeric_or_bad_ids(line):
    with pytest.raises(ConlluError) as exc:
        parse_conllu("1\tb\tb\tNOUN\t_\t_\t0\troot\t_\t_\n" + line + "\n")
    assert exc.value.lineno == 2


def test_head_out_of_range_is_deferred():
    tb = parse_conllu("1\ta\ta\tNOUN\t_\t_\t7\troot\t_\t_\n")
    report = validate_tree(tb[0])
    assert not report.heads_in_range
    assert not report.valid


def test_multiword_and_empty_nodes():
    text = (
        "# text = vámonos al mar\n"
        "1-2\tvámonos\t_\t_\t_\t_\t_\t_\t_\t_\n"
        "1\tvamos\tir\tVERB\t_\t_\t0\troot\t_\t_\n"
        "2\tnos\tnosotros\tPRON\t_\t_\t1\tobj\t_\t_\n"
        "2.1\tfoo\tfoo\tVERB\t_\t_\t_\t_\t0:root\t_\n"
        "3-4\tal\t_\t_\t_\t_\t_\t_\t_\tSpaceAfter=No\n"
        "3\ta\ta\tADP\t_\t_\t5\tcase\t_\t_\n"
        "4\tel\tel\tDET\t_\t_\t5\tdet\t_\t_\n"
        "5\tmar\tmar\tNOUN\t_\t_\t1\tobl\t_\t_\n"
    )
    s = parse_conllu(text)[0]
    assert [t.id for t in s.tokens] == [1, 2, 3, 4, 5]
    assert s.dropped_empty_nodes == 1
    assert s.multiword_ranges[0] == MultiwordRange(1, 2, "vámonos", ("_",) * 8)
    assert s.multiword_ranges[1].rest[-1] == "SpaceAfter=No"
    assert validate_tree(s).valid
    # the empty node is gone; everything else survives verbatim
    out = serialize_conllu(parse_conllu(text))
    assert out == text.replace("2.1\tfoo\tfoo\tVERB\t_\t_\t_\t_\t0:root\t_\n", "") + "\n"


def test_roundtrip_fig2_bytes():
    out = serialize_conllu(parse_conllu(MORNING_FLIGHT_CONLLU))
    assert out == MORNING_FLIGHT_CONLLU + "\n"


def test_serialize_empty():
    assert serialize_conllu(Treebank(())) == ""


def test_comments_before_their_sentence():
    text = "# a\n1\tx\tx\tX\t_\t_\t0\troot\t_\t_\n\n# b\n# c\n1\ty\ty\tX\t_\t_\t0\troot\t_\t_\n\n"
    tb = parse_conllu(text)
    assert tb[0].comments == ("# a",)
    assert tb[1].comments == ("# b", "# c")
    assert serialize_conllu(tb) == text


def test_serialize_check_rejects_invalid():
    tb = Treebank((sentence([("a", "X", 0, "root"), ("b", "X", 0, "root")]),))
    serialize_conllu(tb)
    with pytest.raises(InvalidTreeError):
        serialize_conllu(tb, check=True)


def test_validate_fig2():
    assert validate_tree(parse_conllu(MORNING_FLIGHT_CONLLU)[0]).valid


def test_validate_multiple_roots():
    r = validate_tree(sentence([("a", "X", 0, "root"), ("b", "X", 0, "root")]))
    assert not r.single_root and not r.valid


def test_validate_cycle():
    r = validate_tree(sentence([("a", "X", 0, "root"), ("b", "X", 3, "dep"), ("c", "X", 2, "dep")]))
    assert not r.acyclic and r.single_root and not r.valid
    selfloop = validate_tree(sentence([("a", "X", 0, "root"), ("b", "X", 2, "dep")]))
    assert not selfloop.acyclic


def test_validate_id_contiguity():
    s = parse_conllu("1\ta\ta\tX\t_\t_\t0\troot\t_\t_\n3\tb\tb\tX\t_\t_\t1\tdep\t_\t_\n")[0]
    r = validate_tree(s)
    assert not r.ids_contiguous


def test_to_dep_tree_she_saw_it():
    t = to_dep_tree(sentence(SHE_SAW_IT))
    assert t.nodes == ((0, "rt"), (1, "PRON"), (2, "VERB"), (3, "PRON"))
    assert set(t.edges) == {(0, 2, "root"), (2, 1, "nsubj"), (2, 3, "dobj")}
    assert t.is_tree()


def test_to_dep_tree_single_token():
    t = to_dep_tree(sentence([("Hi", "INTJ", 0, "root")]))
    assert len(t.nodes) == 2
    assert t.edges == ((0, 1, "root"),)


def test_to_dep_tree_fig2():
    t = to_dep_tree(parse_conllu(MORNING_FLIGHT_CONLLU)[0])
    assert len(t.nodes) == 6
    assert sorted(lab for _, _, lab in t.edges) == sorted(["root", "nsubj", "dobj", "det", "nmod"])


def test_to_dep_tree_invalid_carries_report():
    with pytest.raises(InvalidTreeError) as exc:
        to_dep_tree(sentence([("a", "X", 0, "root"), ("b", "X", 0, "root")]))
    assert not exc.value.report.single_root


def test_root_edge_keeps_treebank_deprel():
    t = to_dep_tree(sentence([("a", "X", 0, "ROOT")]))
    assert t.nodes[0] == (0, "rt")
    assert t.edges == ((0, 1, "ROOT"),)


def test_strip_subtypes():
    tb = Treebank((sentence([("a", "X", 2, "nsubj:pass"), ("b", "V", 0, "root")]),))
    assert [t.deprel for t in strip_subtypes(tb)[0].tokens] == ["nsubj", "root"]


@settings(max_examples=200)
@given(sentences())
def test_dep_tree_invariants(s):
    t = to_dep_tree(s)
    assert t.is_tree()
    assert len(t.nodes) == len(s) + 1
    assert len(t.edges) == len(s)
    root_edges = [e for e in t.edges if e[0] == 0]
    assert len(root_edges) == 1 and t.labels[0] == "rt"


@settings(max_examples=200)
@given(sentences(max_tokens=8))
def test_roundtrip_property(s):
    tb = Treebank((s, s))
    assert parse_conllu(serialize_conllu(tb)) == tb


def test_random_sentences_validate():
    rng = random.Random(3)
    for _ in range(100):
        assert validate_tree(random_sentence(rng, rng.randint(1, 30))).valid
