"""Constraint construction, allowability truth tables, file round trips."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chartprune import (
    BeginEndConstraints,
    DataError,
    PcfgItem,
    TagItem,
    allow_all,
    binarize,
    conjoin,
    constraints_from_file,
    constraints_to_file,
    empty_constraints,
    from_probs,
    gold_constraints,
    pcfg_allowable,
    pcfg_filter,
    read_trees,
    tag_allowable_be,
    tag_allowable_cc,
    tag_filter,
)
from chartprune.constraints import format_constraints
from chartprune.trees import spans

# (D the) (N cat) (V saw) (D a) (N dog): NP spans (0,2) and (3,5), VP (2,5)
TREE = read_trees(
    "(S (NP (D the) (N cat)) (VP (V saw) (NP (D a) (N dog))))"
)[0]


# ---------------------------------------------------------------------------
# construction and validation
# ---------------------------------------------------------------------------


def test_gold_constraints_hand_case():
    c = gold_constraints(TREE)
    assert c.n == 5
    # wide constituents begin at {0, 2, 3} and end at {2, 5}
    assert c.begin_banned == {1}
    assert c.end_banned == {3, 4}


def test_empty_constraints_allow_everything():
    c = empty_constraints(6)
    assert c.empty
    assert pcfg_filter(c) is allow_all
    assert tag_filter(c) is allow_all


@pytest.mark.parametrize("begin,end", [({5}, set()), (set(), {1}), (set(), {7})])
def test_out_of_range_positions_rejected(begin, end):
    with pytest.raises(DataError):
        BeginEndConstraints(6, frozenset(begin), frozenset(end))


def test_from_probs_thresholds_below_one_minus_theta():
    p_begin = [0.9, 0.05, 0.2, 0.0, 0.0]
    p_end = [0.0, 0.0, 0.5, 0.04, 0.9]
    c = from_probs(5, p_begin, p_end, theta=0.9)
    assert c.begin_banned == {1, 3}  # positions 0..3, prob < 0.1
    assert c.end_banned == {3}  # positions 2..4; 5 is never banned


def test_from_probs_never_bans_final_end():
    c = from_probs(4, [1, 1, 1], {2: 0.0, 3: 0.0, 4: 0.0}, theta=0.5)
    assert 4 not in c.end_banned
    assert c.end_banned == {2, 3}


@pytest.mark.parametrize("theta", [0.49, 1.0, 1.5, -0.1])
def test_from_probs_rejects_bad_theta(theta):
    with pytest.raises(DataError):
        from_probs(5, [0.5] * 5, [0.5] * 5, theta)


@given(
    st.integers(min_value=2, max_value=12),
    st.floats(min_value=0.5, max_value=0.99),
    st.floats(min_value=0.5, max_value=0.99),
    st.data(),
)
@settings(max_examples=200)
def test_from_probs_banned_sets_shrink_with_theta(n, t1, t2, data):
    lo, hi = min(t1, t2), max(t1, t2)
    probs = st.floats(min_value=0.0, max_value=1.0)
    p_begin = data.draw(st.lists(probs, min_size=n, max_size=n))
    p_end = data.draw(st.lists(probs, min_size=n + 1, max_size=n + 1))
    c_lo = from_probs(n, p_begin, p_end, lo)
    c_hi = from_probs(n, p_begin, p_end, hi)
    assert c_hi.begin_banned <= c_lo.begin_banned
    assert c_hi.end_banned <= c_lo.end_banned


# ---------------------------------------------------------------------------
# PCFG allowability
# ---------------------------------------------------------------------------

C = BeginEndConstraints(5, frozenset({1}), frozenset({3, 4}))


def test_pcfg_width_one_always_allowed():
    assert pcfg_allowable(PcfgItem("X", 1, 2), C)
    assert pcfg_allowable(PcfgItem("X", 3, 4), C)


def test_pcfg_banned_begin_blocks_wide_items():
    assert not pcfg_allowable(PcfgItem("X", 1, 3), C)
    assert pcfg_allowable(PcfgItem("X", 0, 2), C)


def test_pcfg_new_symbols_exempt_from_end_ban_only():
    assert not pcfg_allowable(PcfgItem("X", 2, 4), C)
    assert pcfg_allowable(PcfgItem("@X[A]", 2, 4, is_new=True), C)
    # a banned begin still blocks new symbols
    assert not pcfg_allowable(PcfgItem("@X[A]", 1, 4, is_new=True), C)


def test_gold_constraints_admit_every_binarized_gold_item():
    c = gold_constraints(TREE)
    pred = pcfg_filter(c)
    for node, i, k in spans(binarize(TREE, h=2)):
        if not node.is_leaf:
            assert pred(PcfgItem(node.label, i, k, node.is_new))


# ---------------------------------------------------------------------------
# TAG allowability: cc checks outer span and gap, be only the outer span
# ---------------------------------------------------------------------------


def test_tag_outer_span_checked_by_both():
    bad = TagItem("X", 1, 4)
    assert not tag_allowable_cc(bad, C)
    assert not tag_allowable_be(bad, C)
    assert tag_allowable_cc(TagItem("X", 3, 4), C)  # width-1 outer exempt


def test_tag_gap_checked_only_by_cc():
    item = TagItem("X", 0, 5, 1, 3)  # gap starts at banned 1, ends at banned 3
    assert tag_allowable_be(item, C)
    assert not tag_allowable_cc(item, C)


def test_tag_unit_gap_exemption_flag():
    item = TagItem("X", 0, 5, 1, 2)  # unit gap at banned begin 1
    assert tag_allowable_cc(item, C, exempt_unit_gaps=True)
    assert not tag_allowable_cc(item, C, exempt_unit_gaps=False)


@given(
    st.integers(min_value=0, max_value=4),
    st.integers(min_value=1, max_value=8),
    st.data(),
)
@settings(max_examples=300)
def test_tag_cc_implies_be(i, width, data):
    l = i + width
    n = 8
    gap = data.draw(st.booleans())
    j = k = None
    if gap and width >= 1:
        j = data.draw(st.integers(min_value=i, max_value=l - 1))
        k = data.draw(st.integers(min_value=j + 1, max_value=l))
    item = TagItem("X", i, l, j, k)
    begins = data.draw(st.frozensets(st.integers(0, n - 2), max_size=4))
    ends = data.draw(st.frozensets(st.integers(2, n), max_size=4))
    c = BeginEndConstraints(n, begins, ends)
    if tag_allowable_cc(item, c):
        assert tag_allowable_be(item, c)


def test_tag_filter_rejects_unknown_strategy():
    with pytest.raises(DataError):
        tag_filter(C, strategy="zz")


def test_conjoin_requires_all():
    no_wide = lambda it: it.k - it.i < 3
    no_late = lambda it: it.i < 2
    both = conjoin(no_wide, no_late, allow_all)
    assert both(PcfgItem("X", 0, 2))
    assert not both(PcfgItem("X", 0, 4))
    assert not both(PcfgItem("X", 2, 3))
    assert conjoin(allow_all, allow_all) is allow_all


# ---------------------------------------------------------------------------
# file format
# ---------------------------------------------------------------------------


def test_format_is_tab_separated():
    line = format_constraints(7, C)
    assert line == "7\t5\tB: 1\tE: 3 4"


def test_constraints_file_round_trip_bit_exact(tmp_path):
    path = str(tmp_path / "c.tsv")
    items = [
        (0, BeginEndConstraints(5, frozenset({1}), frozenset({3, 4}))),
        (1, empty_constraints(2)),
        (5, BeginEndConstraints(4, frozenset({0, 2}), frozenset())),
    ]
    constraints_to_file(items, path)
    first = open(path, "rb").read()
    back = constraints_from_file(path)
    assert back == dict(items)
    constraints_to_file(sorted(back.items()), path)
    assert open(path, "rb").read() == first


@pytest.mark.parametrize(
    "line",
    [
        "0\t5\tB: 1",  # missing E field
        "0\t5\tB: x\tE:",  # non-integer position
        "0\t5\tE:\tB:",  # swapped prefixes
        "a\t5\tB:\tE:",  # bad id
        "0\t5\tB: 9\tE:",  # out of range for n
    ],
)
def test_constraints_file_rejects_malformed(tmp_path, line):
    path = tmp_path / "bad.tsv"
    path.write_text(line + "\n")
    with pytest.raises(DataError):
        constraints_from_file(str(path))
