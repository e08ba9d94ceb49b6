"""Tree reading/writing, binarization round trips, span conventions."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chartprune import (
    DataError,
    Tree,
    binarize,
    debinarize,
    read_trees,
    tree,
    write_tree,
)
from chartprune.trees import (
    constituent_spans,
    max_arity,
    pos_sequence,
    spans,
    strip_word_layer,
)

# ---------------------------------------------------------------------------
# random tree strategy: leaves are words, internal labels uppercase
# ---------------------------------------------------------------------------

labels = st.sampled_from(["S", "NP", "VP", "PP", "N", "V", "P", "D"])
words = st.sampled_from(["the", "cat", "saw", "a", "dog", "on", "mat"])


def trees_strategy(max_leaves=8):
    leaf = st.builds(Tree, words)
    return st.recursive(
        st.builds(lambda lbl, w: tree(lbl, Tree(w)), labels, words),
        lambda children: st.builds(
            lambda lbl, kids: Tree(lbl, tuple(kids)),
            labels,
            st.lists(children, min_size=1, max_size=4),
        ),
        max_leaves=max_leaves,
    )


# ---------------------------------------------------------------------------
# reading and writing
# ---------------------------------------------------------------------------


def test_read_single_tree():
    (t,) = read_trees("(S (NP (D the) (N cat)) (VP (V sleeps)))")
    assert t.label == "S"
    assert t.leaves() == ["the", "cat", "sleeps"]
    assert len(t) == 3


def test_read_skips_blank_lines():
    ts = read_trees("(X (A a))\n\n(Y (B b))\n")
    assert [t.label for t in ts] == ["X", "Y"]


@pytest.mark.parametrize(
    "text",
    [
        "(S (NP",  # unbalanced
        "(S (NP a)) junk",  # trailing garbage
        "()",  # empty brackets
        "( (S a) (S b) )",  # wrapper with several children
        "(@X (A a))",  # reserved label prefix in input
    ],
)
def test_read_rejects_malformed(text):
    with pytest.raises(DataError):
        read_trees(text)


def test_read_strips_file_wrapper():
    (t,) = read_trees("( (S (N cats)) )")
    assert t.label == "S"


@given(trees_strategy())
@settings(max_examples=100)
def test_write_read_round_trip(t):
    (back,) = read_trees(write_tree(t))
    assert back == t


# ---------------------------------------------------------------------------
# spans
# ---------------------------------------------------------------------------


def test_spans_include_leaves_and_root():
    t = read_trees("(S (NP (D the) (N cat)) (VP (V sleeps)))")[0]
    got = {(node.label, i, k) for node, i, k in spans(t)}
    assert ("S", 0, 3) in got
    assert ("NP", 0, 2) in got
    assert ("the", 0, 1) in got  # word leaves carry width-1 spans


def test_constituent_spans_min_width():
    t = read_trees("(S (NP (D the) (N cat)) (VP (V sleeps)))")[0]
    wide = constituent_spans(t, min_width=2)
    assert ("NP", 0, 2) in wide
    assert all(k - i >= 2 for _, i, k in wide)


@given(trees_strategy())
@settings(max_examples=100)
def test_spans_partition_consistently(t):
    n = len(t)
    for node, i, k in spans(t):
        assert 0 <= i < k <= n
        assert node.leaves() == t.leaves()[i:k]


# ---------------------------------------------------------------------------
# binarization
# ---------------------------------------------------------------------------


def test_binarize_is_left_factored():
    t = read_trees("(X (A a) (B b) (C c) (D d))")[0]
    b = binarize(t, h=2)
    assert max_arity(b) <= 2
    # intermediates chain down the left branch, sharing X's left edge
    assert b.children[1].label == "D"
    mid = b.children[0]
    assert mid.is_new and mid.label == "@X[B,C]"
    assert mid.children[0].label == "@X[A,B]"
    for node, i, _ in spans(b):
        if node.is_new:
            assert i == 0  # every intermediate keeps the parent's left edge


def test_binarize_markov_horizon():
    t = read_trees("(X (A a) (B b) (C c) (D d) (E e))")[0]
    b1 = binarize(t, h=1)
    b2 = binarize(t, h=2)
    assert b1.children[0].label == "@X[D]"
    assert b2.children[0].label == "@X[C,D]"


def test_binarize_leaves_binary_nodes_alone():
    t = read_trees("(S (NP (N cats)) (VP (V sleep)))")[0]
    assert binarize(t) == t


@given(trees_strategy(max_leaves=10), st.integers(min_value=1, max_value=3))
@settings(max_examples=150)
def test_binarize_debinarize_identity(t, h):
    b = binarize(t, h=h)
    assert max_arity(b) <= 2
    assert b.leaves() == t.leaves()
    assert debinarize(b) == t


@given(trees_strategy())
@settings(max_examples=50)
def test_binarize_intermediates_flagged_new(t):
    for node, _, _ in spans(binarize(t, h=2)):
        assert node.is_new == node.label.startswith("@")


def test_debinarize_ignores_plain_trees():
    t = read_trees("(S (NP (N cats)) (VP (V sleep)))")[0]
    assert debinarize(t) == t


# ---------------------------------------------------------------------------
# word layer helpers
# ---------------------------------------------------------------------------


def test_strip_word_layer():
    t = read_trees("(S (NP (D the) (N cat)) (VP (V sleeps)))")[0]
    s = strip_word_layer(t)
    assert s.leaves() == ["D", "N", "V"]
    assert pos_sequence(t) == ["D", "N", "V"]


def test_pos_sequence_rejects_bare_leaf():
    t = tree("S", tree("NP", Tree("word")), Tree("stray"))
    with pytest.raises(DataError):
        pos_sequence(t)
