"""TAG chart parser against a brute-force derivation enumerator.

The enumerator in oracles.py builds every derivation bottom-up from the
elementary trees (one optional adjunction per internal node, substitution
at marked sites) and reports the best score per derivable string.  The
parser must accept exactly those strings, at exactly those scores.
"""

import itertools
import math
import random

import pytest

from chartprune import (
    BeginEndConstraints,
    DataError,
    TagItem,
    best_derivation,
    read_tag_grammar,
    tag_chart_stats,
    tag_filter,
    tag_parse,
    tree,
)
from chartprune.tag_grammar import (
    ElementaryTree,
    parse_tag_node,
    tag_grammar,
    write_tag_grammar,
    write_tag_node,
)
from oracles import enumerate_tag_language, random_tag, random_tag_sentence

# ---------------------------------------------------------------------------
# the grammar suite
# ---------------------------------------------------------------------------

G_SUBST = read_tag_grammar(
    "a_s\t-0.1\t(S (NP! ) (VP (V @) (NP! )))\tsaw\n"
    "a_n1\t-0.2\t(NP (N @))\tcat\n"
    "a_n2\t-0.7\t(NP (N @))\tdog\n"
)

G_ADJ = read_tag_grammar(
    "a_go\t-0.5\t(S (V @))\tgo\n"
    "b_again\t-1.0\t(S (S* ) (X @))\tagain\n"
)

G_WRAP = read_tag_grammar(
    "a_i\t-0.1\t(S (A @))\ta\n"
    "b_w\t-0.2\t(S (B! ) (S* ) (C @))\tc\n"
    "a_b\t-0.3\t(B (X @))\tb\n"
)

G_AMBIG = read_tag_grammar(
    "a_lo\t-3.0\t(S (A @) (B! ))\tx\n"
    "a_hi\t-1.0\t(S (A @) (B! ))\tx\n"
    "b_b\t-0.5\t(B (C @))\ty\n"
)

G_UNLEX = read_tag_grammar(
    "a_any\t-0.2\t(S (W @))\t@\n"
    "b_m\t-0.9\t(S (S* ) (M @))\tm\n"
)

G_GAPADJ = read_tag_grammar(
    "i_a\t-0.1\t(S (A @))\ta\n"
    "b_1\t-0.4\t(S (T (S* ) (B @)))\tb\n"
    "c_1\t-0.6\t(T (T* ) (C @))\tc\n"
)

SUITE = {
    "substitution": (G_SUBST, ["saw", "cat", "dog"]),
    "adjunction": (G_ADJ, ["go", "again"]),
    "wrapping": (G_WRAP, ["a", "b", "c"]),
    "ambiguity": (G_AMBIG, ["x", "y"]),
    "wildcard_anchor": (G_UNLEX, ["m", "q"]),
    "adjoin_into_aux": (G_GAPADJ, ["a", "b", "c"]),
}

MAX_LEN = 6


def recompute_score(deriv, grammar) -> float:
    by_name = {}
    for t in grammar.trees:
        by_name.setdefault(t.name, t.logprob)
    return sum(by_name[inst.tree_name] for inst in deriv.instances())


@pytest.mark.parametrize("name", sorted(SUITE))
def test_language_and_scores_match_enumerator(name):
    grammar, alphabet = SUITE[name]
    want = enumerate_tag_language(grammar, alphabet, MAX_LEN)
    assert want, "suite grammar derives nothing; the test would be vacuous"
    seen = set()
    for length in range(1, MAX_LEN + 1):
        for string in itertools.product(alphabet, repeat=length):
            chart = tag_parse(grammar, list(string))
            got = chart.goal_score()
            if string in want:
                seen.add(string)
                assert got == pytest.approx(want[string], abs=1e-9)
                derived, deriv, score = best_derivation(chart)
                assert tuple(derived.leaves()) == string
                assert score == got
                assert recompute_score(deriv, grammar) == pytest.approx(
                    score, abs=1e-9
                )
            else:
                assert got is None, f"{string} parsed but is not derivable"
    assert seen == set(want)


def test_wrapping_language_is_the_expected_one():
    want = enumerate_tag_language(G_WRAP, ["a", "b", "c"], MAX_LEN)
    strings = {" ".join(y) for y in want}
    assert strings == {"a", "b a c", "b b a c c"}
    assert want[("b", "a", "c")] == pytest.approx(-0.1 - 0.2 - 0.3)


def test_adjunction_stacks_once_per_node():
    want = enumerate_tag_language(G_ADJ, ["go", "again"], MAX_LEN)
    strings = {" ".join(y) for y in want}
    # each auxiliary root hosts at most one further adjunction, so the
    # spine still licenses every pumping depth
    assert strings == {"go" + " again" * k for k in range(MAX_LEN)}


def test_viterbi_picks_the_better_ambiguous_tree():
    chart = tag_parse(G_AMBIG, ["x", "y"])
    derived, deriv, score = best_derivation(chart)
    assert score == pytest.approx(-1.5)
    assert deriv.tree_name == "a_hi"


def test_adjunction_index_pattern_is_audited():
    chart = tag_parse(G_GAPADJ, ["a", "b", "c"])
    _, deriv, _ = best_derivation(chart)
    patterns = [
        idx for inst in deriv.instances() for idx in inst.adjunction_indices
    ]
    assert patterns, "expected at least one adjunction"
    for (ai, aj, ak, al), (hi, hj, hk, hl), (ri, rj, rk, rl) in patterns:
        assert (aj, ak) == (hi, hl)  # the aux gap wraps the host span
        assert (ri, rl) == (ai, al)
        assert (rj, rk) == (hj, hk)  # the host's own gap survives


def test_unknown_token_fails_fast():
    chart = tag_parse(G_SUBST, ["saw", "unknown"])
    assert chart.n_items == 0
    assert best_derivation(chart) is None


def test_empty_sentence_yields_empty_chart():
    chart = tag_parse(G_SUBST, [])
    assert chart.n_items == 0 and not chart.goals


# ---------------------------------------------------------------------------
# pruning
# ---------------------------------------------------------------------------


def random_constraints(rng, n):
    return BeginEndConstraints(
        n,
        frozenset(i for i in range(max(0, n - 1)) if rng.random() < 0.3),
        frozenset(k for k in range(2, n + 1) if rng.random() < 0.3),
    )


def test_pruned_tag_charts_are_subsets():
    rng = random.Random(7)
    checked = 0
    for _ in range(60):
        grammar = random_tag(rng)
        tokens = random_tag_sentence(rng)
        if len(tokens) < 2:
            continue
        c = random_constraints(rng, len(tokens))
        full = tag_parse(grammar, tokens).item_set()
        cc = tag_parse(grammar, tokens, tag_filter(c, "cc")).item_set()
        be = tag_parse(grammar, tokens, tag_filter(c, "be")).item_set()
        assert cc <= be <= full
        checked += 1
    assert checked >= 40


def test_cc_checks_the_gap_where_be_does_not():
    # in "b a c" the auxiliary tree's gap is the unit span (1, 2); only the
    # cc strategy looks at gaps at all, and only with the exemption off
    tokens = ["b", "a", "c"]
    c = BeginEndConstraints(3, frozenset({1}), frozenset())
    be = tag_parse(G_WRAP, tokens, tag_filter(c, "be"))
    cc_exempt = tag_parse(G_WRAP, tokens, tag_filter(c, "cc"))
    cc_strict = tag_parse(
        G_WRAP, tokens, tag_filter(c, "cc", exempt_unit_gaps=False)
    )
    assert be.goal_score() == pytest.approx(-0.6)
    assert cc_exempt.goal_score() == pytest.approx(-0.6)
    assert cc_strict.goal_score() is None
    assert cc_strict.item_set() < cc_exempt.item_set() <= be.item_set()


def test_dotted_prefix_items_are_filtered_too():
    # the traversal of the auxiliary tree passes through a dotted item over
    # [0, 2); banning end 2 therefore kills the only derivation even though
    # no derived-tree constituent ends there
    tokens = ["b", "a", "c"]
    assert tag_parse(G_WRAP, tokens).goal_score() == pytest.approx(-0.6)
    c = BeginEndConstraints(3, frozenset(), frozenset({2}))
    assert tag_parse(G_WRAP, tokens, tag_filter(c, "cc")).goal_score() is None


def test_harmless_ban_keeps_score_and_shrinks_chart():
    tokens = ["b", "a", "c"]
    unpruned = tag_parse(G_WRAP, tokens)
    c = BeginEndConstraints(3, frozenset({1}), frozenset())
    pruned = tag_parse(G_WRAP, tokens, tag_filter(c, "cc"))
    assert pruned.goal_score() == pytest.approx(unpruned.goal_score())
    assert pruned.item_set() <= unpruned.item_set()


# ---------------------------------------------------------------------------
# chart statistics
# ---------------------------------------------------------------------------


def test_tag_chart_stats_span_membership():
    chart = tag_parse(G_SUBST, ["cat", "saw", "dog"])
    gold = tree(
        "S",
        tree("NP", tree("N", "cat")),
        tree("VP", tree("V", "saw"), tree("NP", tree("N", "dog"))),
    )
    n_items, frac = tag_chart_stats(chart, gold)
    assert n_items == chart.n_items > 0
    assert 0.0 < frac <= 1.0


def test_tag_chart_stats_rejects_length_mismatch():
    chart = tag_parse(G_SUBST, ["cat", "saw", "dog"])
    with pytest.raises(DataError):
        tag_chart_stats(chart, tree("S", tree("N", "cat")))


def test_tag_chart_stats_empty_chart():
    chart = tag_parse(G_SUBST, ["nope"])
    assert tag_chart_stats(chart, tree("S", tree("N", "x"))) == (0, 0.0)


# ---------------------------------------------------------------------------
# grammar file format
# ---------------------------------------------------------------------------


def test_tag_grammar_file_round_trip():
    for grammar, _ in SUITE.values():
        text = write_tag_grammar(grammar)
        back = read_tag_grammar(text, start=grammar.start)
        assert back == grammar
        assert write_tag_grammar(back) == text


def test_node_text_round_trip():
    text = "(S (NP! ) (VP (V @) (S* )))"
    node = parse_tag_node(text)
    assert write_tag_node(node) == text


@pytest.mark.parametrize(
    "line",
    [
        "t\t-1.0\t(S (V x))",  # frontier token that is not @, X! or X*
        "t\t-1.0\t(S (V @) (W @))",  # two anchors
        "t\t-1.0\t(S (A* ) (V @) (B* ))",  # two feet
        "t\t-1.0\t(X (S* ) (V @))",  # foot label differs from root
        "t\tnan?\t(S (V @))",  # junk logprob
        "t\t-1.0",  # missing tree column
    ],
)
def test_grammar_reader_rejects_malformed(line):
    with pytest.raises(DataError):
        read_tag_grammar(line + "\n")


def test_elementary_tree_metadata():
    (aux,) = [t for t in G_ADJ.trees if t.name == "b_again"]
    assert aux.is_auxiliary and aux.kind == "auxiliary"
    assert aux.foot_addr == (0,)
    assert aux.anchor_addr == (1, 0)
    (init,) = [t for t in G_ADJ.trees if t.name == "a_go"]
    assert not init.is_auxiliary and init.foot_addr is None


def test_tag_grammar_requires_initial_tree_for_default_start():
    aux = ElementaryTree(
        "b", parse_tag_node("(S (S* ) (V @))"), -1.0, "w"
    )
    with pytest.raises(DataError):
        tag_grammar([aux])
    assert tag_grammar([aux], start="S").start == "S"
