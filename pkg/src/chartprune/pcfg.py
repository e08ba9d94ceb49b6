"""PCFG extraction from binarized treebanks, plus the rule-file format.

Rule probabilities are stored as natural-log values; per-LHS probabilities
sum to one.  Nonterminals introduced by binarization keep their ``@`` prefix
in the file format, which is how the new-symbol metadata round-trips.
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field

from .errors import DataError
from .trees import NEW_LABEL_PREFIX, Tree, strip_word_layer


@dataclass(frozen=True)
class Rule:
    lhs: str
    rhs: tuple[str, ...]
    logprob: float

    def __str__(self) -> str:
        return "%s -> %s\t%r" % (self.lhs, " ".join(self.rhs), self.logprob)


@dataclass(frozen=True)
class Pcfg:
    start: str
    rules: tuple[Rule, ...]
    new_symbols: frozenset[str] = frozenset()

    @property
    def nonterminals(self) -> frozenset[str]:
        return frozenset(r.lhs for r in self.rules)

    def is_new(self, symbol: str) -> bool:
        return symbol in self.new_symbols

    def check_normalized(self, tol: float = 1e-9) -> None:
        totals: dict[str, float] = defaultdict(float)
        for r in self.rules:
            totals[r.lhs] += math.exp(r.logprob)
        for lhs, total in totals.items():
            if abs(total - 1.0) > tol:
                raise DataError(f"rules for {lhs} sum to {total}, not 1")


def extract_pcfg(trees: list[Tree], pos_as_terminals: bool = False) -> Pcfg:
    """Maximum-likelihood PCFG from binarized trees.

    With pos_as_terminals, the preterminal layer is the terminal yield and
    word leaves are dropped before counting.
    """
    if not trees:
        raise DataError("cannot extract a grammar from an empty corpus")
    if pos_as_terminals:
        trees = [strip_word_layer(t) for t in trees]
    rule_counts: Counter[tuple[str, tuple[str, ...]]] = Counter()
    lhs_counts: Counter[str] = Counter()
    roots: Counter[str] = Counter()
    new_symbols: set[str] = set()

    def visit(node: Tree) -> None:
        if node.is_leaf:
            return
        if node.is_new:
            new_symbols.add(node.label)
        rhs = tuple(c.label for c in node.children)
        rule_counts[(node.label, rhs)] += 1
        lhs_counts[node.label] += 1
        for c in node.children:
            visit(c)

    for t in trees:
        roots[t.label] += 1
        visit(t)

    rules = tuple(
        Rule(lhs, rhs, math.log(count) - math.log(lhs_counts[lhs]))
        for (lhs, rhs), count in rule_counts.items()
    )
    start = roots.most_common(1)[0][0]
    return Pcfg(start, rules, frozenset(new_symbols))


# ---------------------------------------------------------------------------
# File format: "start: S" header, then one "LHS -> RHS [RHS2]\tlogprob" per line
# ---------------------------------------------------------------------------


def write_pcfg(g: Pcfg) -> str:
    lines = [f"start: {g.start}\n"]
    for r in g.rules:
        lines.append("%s -> %s\t%r\n" % (r.lhs, " ".join(r.rhs), r.logprob))
    return "".join(lines)


def write_pcfg_file(g: Pcfg, path: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(write_pcfg(g))


def read_pcfg(text: str) -> Pcfg:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("start:"):
        raise DataError("missing 'start:' header line")
    start = lines[0].split(":", 1)[1].strip()
    rules = []
    new_symbols = set()
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            body, prob_str = line.rsplit("\t", 1)
            lhs, rhs_str = body.split("->")
            rhs = tuple(rhs_str.split())
            if not rhs:
                raise ValueError("empty rhs")
            rule = Rule(lhs.strip(), rhs, float(prob_str))
        except ValueError as exc:
            raise DataError(f"bad rule at line {lineno}: {line!r}") from exc
        rules.append(rule)
        for sym in (rule.lhs, *rule.rhs):
            if sym.startswith(NEW_LABEL_PREFIX):
                new_symbols.add(sym)
    return Pcfg(start, tuple(rules), frozenset(new_symbols))


def read_pcfg_file(path: str) -> Pcfg:
    with open(path, encoding="utf-8") as f:
        return read_pcfg(f.read())
