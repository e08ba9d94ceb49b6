"""Coarse-to-fine pruning for CKY: parse with a projected grammar first,
then admit fine items whose coarse posterior clears a threshold.

Single coarse level.  The resulting predicate has the same signature as the
boundary-constraint filters, so the two compose with conjoin().
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass

from .errors import DataError
from .items import PcfgItem
from .pcfg import Pcfg, Rule
from .trees import NEW_LABEL_PREFIX

LOG_ZERO = float("-inf")


def base_label(label: str) -> str:
    """Undo binarization decoration: "@A[B,C]" -> "A"."""
    if label.startswith(NEW_LABEL_PREFIX) and label.endswith("]"):
        cut = label.find("[")
        if cut > 1:
            return label[1:cut]
    return label


def default_coarse_symbol(label: str) -> str:
    """Base label truncated at its first non-alphanumeric character."""
    base = base_label(label)
    for i, ch in enumerate(base):
        if not ch.isalnum():
            return base[:i] if i else base
    return base


@dataclass(frozen=True)
class CoarseMap:
    """Total map from fine nonterminals to coarse symbols.

    Labels missing from the mapping fall back to their base label's entry,
    so map files need not list binarization symbols.
    """

    mapping: dict

    def apply(self, label: str) -> str:
        got = self.mapping.get(label)
        if got is not None:
            return got
        got = self.mapping.get(base_label(label))
        if got is None:
            raise DataError(f"no coarse symbol for {label!r}")
        return got


def default_coarse_map(g: Pcfg) -> CoarseMap:
    return CoarseMap({nt: default_coarse_symbol(nt) for nt in g.nonterminals})


def read_coarse_map(text: str) -> CoarseMap:
    mapping = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise DataError(f"line {lineno}: expected 'fine<TAB>coarse'")
        mapping[parts[0]] = parts[1]
    return CoarseMap(mapping)


def read_coarse_map_file(path: str) -> CoarseMap:
    with open(path, encoding="utf-8") as f:
        return read_coarse_map(f.read())


def write_coarse_map(m: CoarseMap) -> str:
    return "".join(f"{fine}\t{coarse}\n" for fine, coarse in sorted(m.mapping.items()))


def project(g: Pcfg, m: CoarseMap) -> Pcfg:
    """Symbol-wise projection; collided rules sum, then renormalize per LHS."""
    nts = g.nonterminals

    def image(symbol: str) -> str:
        return m.apply(symbol) if symbol in nts else symbol

    merged: dict[tuple[str, tuple[str, ...]], float] = defaultdict(float)
    for r in g.rules:
        key = (image(r.lhs), tuple(image(s) for s in r.rhs))
        merged[key] += math.exp(r.logprob)
    totals: dict[str, float] = defaultdict(float)
    for (lhs, _), p in merged.items():
        totals[lhs] += p
    rules = tuple(
        Rule(lhs, rhs, math.log(p / totals[lhs]))
        for (lhs, rhs), p in merged.items()
    )
    survives = {image(s) for s in g.new_symbols}
    survives -= {image(s) for s in nts - g.new_symbols}
    return Pcfg(m.apply(g.start), rules, frozenset(survives))


@dataclass
class InsideOutsideTable:
    """Sum-semiring log scores per coarse item [A,i,k]."""

    n: int
    start: str
    inside: dict
    outside: dict

    @property
    def goal(self) -> float:
        return self.inside.get((self.start, 0, self.n), LOG_ZERO)

    def posterior(self, label: str, i: int, k: int) -> float:
        ins = self.inside.get((label, i, k))
        if ins is None:
            return LOG_ZERO
        return ins + self.outside.get((label, i, k), LOG_ZERO) - self.goal


def _rule_index(g: Pcfg):
    unary = [r for r in g.rules if len(r.rhs) == 1]
    binary = [r for r in g.rules if len(r.rhs) == 2]
    if len(unary) + len(binary) != len(g.rules):
        bad = next(r for r in g.rules if len(r.rhs) not in (1, 2))
        raise DataError(f"rule {bad} is not unary or binary")
    return unary, binary


def _logadd(table: dict, key, value: float) -> None:
    old = table.get(key)
    if old is None:
        table[key] = value
    else:
        table[key] = max(old, value) + math.log1p(math.exp(-abs(old - value)))


def inside_outside(g: Pcfg, tokens: list[str]) -> InsideOutsideTable:
    """Inside and outside sums over the CKY chart of g on tokens.

    Unary rules are closed by fixpoint iteration, capped at the nonterminal
    count per cell; exact whenever the unary graph is acyclic.
    """
    n = len(tokens)
    unary, binary = _rule_index(g)
    by_rhs: dict[tuple[str, str], list[Rule]] = defaultdict(list)
    for r in binary:
        by_rhs[(r.rhs[0], r.rhs[1])].append(r)
    cap = max(1, len(g.nonterminals))

    inside: dict = {}
    cells: dict[tuple[int, int], dict] = defaultdict(dict)

    def close_unary_inside(i: int, k: int) -> None:
        # fixpoint of x = base (+) U x, recomputed from base each pass so
        # nothing is counted twice; exact when the unary graph is acyclic
        cell = cells[(i, k)]
        if not unary or not cell:
            return
        base = dict(cell)
        cur = base
        for _ in range(cap):
            nxt = dict(base)
            for r in unary:
                got = cur.get(r.rhs[0])
                if got is not None:
                    _logadd(nxt, r.lhs, r.logprob + got)
            if nxt == cur:
                break
            cur = nxt
        cell.clear()
        cell.update(cur)

    for i, word in enumerate(tokens):
        cells[(i, i + 1)][word] = 0.0
        close_unary_inside(i, i + 1)
    for width in range(2, n + 1):
        for i in range(n - width + 1):
            k = i + width
            cell = cells[(i, k)]
            for j in range(i + 1, k):
                left, right = cells[(i, j)], cells[(j, k)]
                for (b, c), rs in by_rhs.items():
                    sb, sc = left.get(b), right.get(c)
                    if sb is None or sc is None:
                        continue
                    for r in rs:
                        _logadd(cell, r.lhs, r.logprob + sb + sc)
            close_unary_inside(i, k)
    for (i, k), cell in cells.items():
        for label, score in cell.items():
            inside[(label, i, k)] = score

    outside: dict = {}
    if (g.start, 0, n) in inside:
        outside[(g.start, 0, n)] = 0.0
        for width in range(n, 0, -1):
            for i in range(n - width + 1):
                k = i + width
                cell = cells[(i, k)]
                # unary mass flows parent -> child within the cell; same
                # from-base fixpoint as the inside closure
                if unary:
                    base = {
                        a: outside[(a, i, k)]
                        for a in cell
                        if (a, i, k) in outside
                    }
                    cur = base
                    for _ in range(cap):
                        nxt = dict(base)
                        for r in unary:
                            out = cur.get(r.lhs)
                            if out is not None and r.rhs[0] in cell:
                                _logadd(nxt, r.rhs[0], r.logprob + out)
                        if nxt == cur:
                            break
                        cur = nxt
                    for a, score in cur.items():
                        outside[(a, i, k)] = score
                if width == 1:
                    continue
                for j in range(i + 1, k):
                    left, right = cells[(i, j)], cells[(j, k)]
                    for (b, c), rs in by_rhs.items():
                        sb, sc = left.get(b), right.get(c)
                        if sb is None or sc is None:
                            continue
                        for r in rs:
                            out = outside.get((r.lhs, i, k))
                            if out is None:
                                continue
                            _logadd(outside, (b, i, j), out + r.logprob + sc)
                            _logadd(outside, (c, j, k), out + r.logprob + sb)
    return InsideOutsideTable(n, g.start, inside, outside)


def ctf_predicate(
    g_coarse: Pcfg,
    tokens: list[str],
    tau: float = 1e-5,
    m: CoarseMap | None = None,
):
    """Allow fine items whose coarse posterior is at least tau.

    Fail-open: if the coarse grammar cannot parse the sentence, the
    returned predicate allows everything.
    """
    if tau < 0:
        raise DataError(f"threshold must be nonnegative, got {tau}")
    table = inside_outside(g_coarse, tokens)
    if table.goal == LOG_ZERO:
        return lambda item: True
    log_tau = math.log(tau) if tau > 0 else LOG_ZERO
    coarse = m.apply if m is not None else (lambda label: label)

    def allow(item: PcfgItem) -> bool:
        label = coarse(item.label)
        if (label, item.i, item.k) not in table.inside:
            return False
        return table.posterior(label, item.i, item.k) >= log_tau

    return allow
