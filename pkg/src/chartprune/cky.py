"""Viterbi CKY for binarized PCFGs with pluggable item filtering.

The parser works in log space (max-product).  Every derived item of width
two or more, unary or binary, is offered to an allowability predicate before
it enters the chart; items the predicate rejects are never stored, so
nothing can later be built on top of them.  Width-1 items (and the terminal
self-entry axioms) bypass the predicate: the boundary-constraint filters
exempt them anyway, so skipping the call is equivalent and cheaper.

Ties are broken toward the lower split point and, within a split, toward the
earlier rule in grammar order (updates require a strict score improvement).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .constraints import AllowabilityPredicate, allow_all
from .errors import DataError
from .items import PcfgItem
from .pcfg import Pcfg, Rule
from .trees import Tree, binarize, spans


@dataclass(frozen=True)
class ChartEntry:
    score: float
    # back is None for terminal self-entries, (rule,) for unary derivations
    # and (rule, split) for binary derivations.
    back: tuple | None


class Chart:
    def __init__(self, grammar: Pcfg, tokens: list[str]):
        self.grammar = grammar
        self.tokens = tokens
        self.n = len(tokens)
        self.cells: dict[tuple[int, int], dict[str, ChartEntry]] = {
            (i, k): {}
            for w in range(1, self.n + 1)
            for i in range(self.n - w + 1)
            for k in (i + w,)
        }

    @property
    def n_items(self) -> int:
        """Derived items; terminal self-entry axioms are not counted."""
        return sum(
            1
            for cell in self.cells.values()
            for entry in cell.values()
            if entry.back is not None
        )

    def iter_items(self) -> Iterator[tuple[PcfgItem, float]]:
        new = self.grammar.new_symbols
        for (i, k), cell in self.cells.items():
            for label, entry in cell.items():
                if entry.back is not None:
                    yield PcfgItem(label, i, k, label in new), entry.score

    def goal(self) -> ChartEntry | None:
        return self.cells[(0, self.n)].get(self.grammar.start)

    def goal_score(self) -> float | None:
        entry = self.goal()
        return None if entry is None else entry.score

    def viterbi_tree(self) -> Tree | None:
        """Best parse, still binarized; returns None on parse failure."""
        if self.goal() is None:
            return None
        new = self.grammar.new_symbols

        def build(label: str, i: int, k: int) -> Tree:
            entry = self.cells[(i, k)][label]
            if entry.back is None:
                return Tree(label)
            is_new = label in new
            if len(entry.back) == 1:
                (rule,) = entry.back
                return Tree(label, (build(rule.rhs[0], i, k),), is_new)
            rule, j = entry.back
            kids = (build(rule.rhs[0], i, j), build(rule.rhs[1], j, k))
            return Tree(label, kids, is_new)

        return build(self.grammar.start, 0, self.n)


def _split_rules(grammar: Pcfg) -> tuple[list[Rule], list[Rule]]:
    """(unary, binary) rules, each in grammar order."""
    unary: list[Rule] = []
    binary: list[Rule] = []
    for rule in grammar.rules:
        if len(rule.rhs) == 1:
            unary.append(rule)
        elif len(rule.rhs) == 2:
            binary.append(rule)
        else:
            raise DataError(f"rule {rule.lhs} -> {' '.join(rule.rhs)} is not binarized")
    return unary, binary


def parse(
    grammar: Pcfg,
    tokens: list[str],
    predicate: AllowabilityPredicate = allow_all,
) -> Chart:
    if not tokens:
        raise DataError("cannot parse an empty sentence")
    unary, binary = _split_rules(grammar)
    n_nonterminals = len({r.lhs for r in grammar.rules})
    new = grammar.new_symbols
    chart = Chart(grammar, tokens)
    cells = chart.cells

    # The predicate's verdict only depends on (label, i, k), so it is asked
    # once per label per cell; verdicts maps label -> bool for the open cell.
    def close_unary(cell, verdicts, i: int, k: int) -> None:
        unit = k - i == 1
        for _ in range(n_nonterminals):
            changed = False
            for rule in unary:
                child = cell.get(rule.rhs[0])
                if child is None:
                    continue
                cand = rule.logprob + child.score
                cur = cell.get(rule.lhs)
                if cur is not None and cur.score >= cand:
                    continue
                if not unit:
                    allowed = verdicts.get(rule.lhs)
                    if allowed is None:
                        allowed = predicate(
                            PcfgItem(rule.lhs, i, k, rule.lhs in new)
                        )
                        verdicts[rule.lhs] = allowed
                    if not allowed:
                        continue
                cell[rule.lhs] = ChartEntry(cand, (rule,))
                changed = True
            if not changed:
                break

    n = chart.n
    for i, token in enumerate(tokens):
        cell = cells[(i, i + 1)]
        cell[token] = ChartEntry(0.0, None)
        close_unary(cell, {}, i, i + 1)

    for width in range(2, n + 1):
        for i in range(n - width + 1):
            k = i + width
            cell = cells[(i, k)]
            verdicts: dict[str, bool] = {}
            # splits ascending, rules in grammar order within a split
            for j in range(i + 1, k):
                left = cells[(i, j)]
                right = cells[(j, k)]
                if not left or not right:
                    continue
                for rule in binary:
                    b_entry = left.get(rule.rhs[0])
                    if b_entry is None:
                        continue
                    c_entry = right.get(rule.rhs[1])
                    if c_entry is None:
                        continue
                    cand = rule.logprob + b_entry.score + c_entry.score
                    cur = cell.get(rule.lhs)
                    if cur is not None and cur.score >= cand:
                        continue
                    allowed = verdicts.get(rule.lhs)
                    if allowed is None:
                        allowed = predicate(
                            PcfgItem(rule.lhs, i, k, rule.lhs in new)
                        )
                        verdicts[rule.lhs] = allowed
                    if not allowed:
                        continue
                    cell[rule.lhs] = ChartEntry(cand, (rule, j))
            close_unary(cell, verdicts, i, k)
    return chart


def chart_stats(chart: Chart, gold: Tree) -> tuple[int, float]:
    """(derived item count, fraction of items whose span is a gold span).

    Gold spans include binarization intermediates; intermediate spans do not
    depend on the markov order, so the default binarize() suffices.  An
    empty chart reports (0, 0.0).
    """
    if len(gold.leaves()) != chart.n:
        raise DataError(
            f"gold tree has {len(gold.leaves())} tokens, chart has {chart.n}"
        )
    gold_spans = {(i, k) for _, i, k in spans(binarize(gold))}
    n_items = hits = 0
    for item, _ in chart.iter_items():
        n_items += 1
        hits += (item.i, item.k) in gold_spans
    return n_items, hits / n_items if n_items else 0.0
