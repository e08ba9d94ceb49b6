"""Grammar extraction and the rule-file format."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chartprune import (
    DataError,
    Pcfg,
    Rule,
    binarize,
    extract_pcfg,
    read_pcfg,
    read_trees,
    write_pcfg,
)

TREES = read_trees(
    """
(S (NP (D the) (N cat)) (VP (V sleeps)))
(S (NP (N dogs)) (VP (V see) (NP (D the) (N cat))))
(S (NP (N dogs)) (VP (V sleep)))
"""
)


def test_extract_counts_relative_frequencies():
    g = extract_pcfg(TREES)
    by_key = {(r.lhs, r.rhs): r.logprob for r in g.rules}
    # NP -> D N twice, NP -> N twice, out of four NP nodes
    assert by_key[("NP", ("D", "N"))] == pytest.approx(math.log(0.5))
    assert by_key[("NP", ("N",))] == pytest.approx(math.log(0.5))
    assert by_key[("S", ("NP", "VP"))] == pytest.approx(0.0)
    g.check_normalized()


def test_extract_start_is_most_common_root():
    assert extract_pcfg(TREES).start == "S"


def test_extract_pos_as_terminals_drops_words():
    g = extract_pcfg(TREES, pos_as_terminals=True)
    symbols = {s for r in g.rules for s in (r.lhs, *r.rhs)}
    assert "the" not in symbols and "cat" not in symbols
    assert ("D", "N") in {r.rhs for r in g.rules}
    # preterminals become terminals: no rule rewrites D
    assert "D" not in {r.lhs for r in g.rules}


def test_extract_records_new_symbols():
    flat = read_trees("(S (NP (D the) (A big) (N cat)) (VP (V sleeps)))")
    g = extract_pcfg([binarize(t, h=2) for t in flat])
    assert g.new_symbols == {"@NP[D,A]"}
    assert g.is_new("@NP[D,A]") and not g.is_new("NP")


def test_extract_rejects_empty_corpus():
    with pytest.raises(DataError):
        extract_pcfg([])


def test_check_normalized_catches_leaks():
    g = Pcfg("S", (Rule("S", ("A", "B"), math.log(0.5)),))
    with pytest.raises(DataError):
        g.check_normalized()


# ---------------------------------------------------------------------------
# file format
# ---------------------------------------------------------------------------


def test_file_round_trip_bit_exact():
    flat = read_trees("(S (NP (D the) (A big) (N cat)) (VP (V sleeps)))")
    g = extract_pcfg(
        [binarize(t, h=2) for t in TREES + flat], pos_as_terminals=True
    )
    assert g.new_symbols  # the round trip must carry the is_new metadata
    text = write_pcfg(g)
    back = read_pcfg(text)
    assert back == g  # includes start, rule order, exact logprobs
    assert write_pcfg(back) == text


@given(st.lists(st.floats(min_value=-30.0, max_value=0.0), min_size=1, max_size=8))
@settings(max_examples=100)
def test_round_trip_preserves_float_bits(logprobs):
    rules = tuple(
        Rule("S", (f"A{i}", f"B{i}"), lp) for i, lp in enumerate(logprobs)
    )
    g = Pcfg("S", rules)
    back = read_pcfg(write_pcfg(g))
    assert [r.logprob for r in back.rules] == list(logprobs)


def test_read_marks_new_symbols_by_prefix():
    g = read_pcfg("start: S\nS -> @S[NP] VP\t-0.5\n@S[NP] -> NP NP\t0.0\n")
    assert g.new_symbols == {"@S[NP]"}


@pytest.mark.parametrize(
    "text",
    [
        "S -> NP VP\t-0.1\n",  # missing header
        "start: S\nS -> NP VP\n",  # missing logprob column
        "start: S\nS ->\t-0.1\n",  # empty rhs
        "start: S\nS -> NP VP\tabc\n",  # non-numeric logprob
    ],
)
def test_read_rejects_malformed(text):
    with pytest.raises(DataError):
        read_pcfg(text)
