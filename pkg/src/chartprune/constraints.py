"""Begin/end pruning constraints and the allowability predicates they induce.

A constraint pair for an n-token sentence is two position sets:
``begin_banned`` (positions where no constituent of width two or more may
start, valid range 0..n-2) and ``end_banned`` (positions where none may end,
valid range 2..n).  Predicates decide whether a single chart item may be
derived; parsers call them on every consequent item.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

from .errors import DataError
from .items import PcfgItem, TagItem
from .trees import Tree, spans

AllowabilityPredicate = Callable[[object], bool]


def allow_all(_item: object) -> bool:
    return True


def conjoin(*preds: AllowabilityPredicate) -> AllowabilityPredicate:
    """Conjunction of predicates; an item must pass all of them."""
    active = [p for p in preds if p is not allow_all]
    if not active:
        return allow_all
    if len(active) == 1:
        return active[0]

    def allowed(item: object) -> bool:
        return all(p(item) for p in active)

    return allowed


@dataclass(frozen=True)
class BeginEndConstraints:
    n: int
    begin_banned: frozenset[int] = frozenset()
    end_banned: frozenset[int] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "begin_banned", frozenset(self.begin_banned))
        object.__setattr__(self, "end_banned", frozenset(self.end_banned))
        for i in self.begin_banned:
            if not 0 <= i <= self.n - 2:
                raise DataError(f"begin position {i} outside 0..{self.n - 2}")
        for k in self.end_banned:
            if not 2 <= k <= self.n:
                raise DataError(f"end position {k} outside 2..{self.n}")

    @property
    def empty(self) -> bool:
        return not self.begin_banned and not self.end_banned


def empty_constraints(n: int) -> BeginEndConstraints:
    return BeginEndConstraints(n)


def gold_constraints(t: Tree) -> BeginEndConstraints:
    """Constraints licensed by a gold tree: ban every begin/end position not
    used by a constituent of width two or more."""
    n = len(t)
    begins = set()
    ends = set()
    for node, i, k in spans(t):
        if not node.is_leaf and k - i >= 2:
            begins.add(i)
            ends.add(k)
    return BeginEndConstraints(
        n,
        frozenset(i for i in range(0, n - 1) if i not in begins),
        frozenset(k for k in range(2, n + 1) if k not in ends),
    )


def from_probs(
    n: int,
    p_begin: Sequence[float] | Mapping[int, float],
    p_end: Sequence[float] | Mapping[int, float],
    theta: float,
) -> BeginEndConstraints:
    """Threshold per-position boundary probabilities into banned sets.

    ``p_begin[i]`` is the probability that a wide constituent may begin at
    position i; ``p_end[k]`` likewise for ending at position k.  A position
    is banned when its probability falls below 1 - theta.  Predicted end
    constraints never ban the sentence-final position n.
    """
    if not 0.5 <= theta < 1.0:
        raise DataError(f"theta {theta} outside [0.5, 1)")
    cut = 1.0 - theta
    begin = frozenset(i for i in range(0, n - 1) if p_begin[i] < cut)
    end = frozenset(k for k in range(2, n) if p_end[k] < cut)
    return BeginEndConstraints(n, begin, end)


# ---------------------------------------------------------------------------
# Allowability predicates
# ---------------------------------------------------------------------------


def pcfg_allowable(item: PcfgItem, c: BeginEndConstraints) -> bool:
    """Width-1 items always pass; otherwise the begin must be open, and the
    end must be open unless the label is a binarization-new symbol."""
    if item.k - item.i == 1:
        return True
    if item.i in c.begin_banned:
        return False
    return item.k not in c.end_banned or item.is_new


def tag_allowable_cc(
    item: TagItem, c: BeginEndConstraints, exempt_unit_gaps: bool = True
) -> bool:
    """Full chart-constraint test for TAG items: the outer span (i, l) and,
    when present, the gap (j, k) must both respect the banned sets.  Width-1
    outer spans are exempt; width-1 gaps are exempt when exempt_unit_gaps."""
    if item.l - item.i >= 2 and (
        item.i in c.begin_banned or item.l in c.end_banned
    ):
        return False
    if item.j is not None:
        gap = item.k - item.j
        if gap >= 2 or (gap == 1 and not exempt_unit_gaps):
            if item.j in c.begin_banned or item.k in c.end_banned:
                return False
    return True


def tag_allowable_be(item: TagItem, c: BeginEndConstraints) -> bool:
    """Baseline test: only the outer span is checked, the gap is ignored."""
    if item.l - item.i >= 2 and (
        item.i in c.begin_banned or item.l in c.end_banned
    ):
        return False
    return True


def pcfg_filter(c: BeginEndConstraints) -> AllowabilityPredicate:
    if c.empty:
        return allow_all
    return lambda item: pcfg_allowable(item, c)


def tag_filter(
    c: BeginEndConstraints, strategy: str = "cc", exempt_unit_gaps: bool = True
) -> AllowabilityPredicate:
    if strategy not in ("cc", "be"):
        raise DataError(f"unknown TAG pruning strategy {strategy!r}")
    if c.empty:
        return allow_all
    if strategy == "cc":
        return lambda item: tag_allowable_cc(item, c, exempt_unit_gaps)
    return lambda item: tag_allowable_be(item, c)


# ---------------------------------------------------------------------------
# Constraints file: "sent_id \t n \t B: i1 i2 ... \t E: k1 k2 ..."
# ---------------------------------------------------------------------------


def format_constraints(sent_id: int, c: BeginEndConstraints) -> str:
    b = " ".join(str(i) for i in sorted(c.begin_banned))
    e = " ".join(str(k) for k in sorted(c.end_banned))
    return "%d\t%d\tB:%s\tE:%s" % (sent_id, c.n, " " + b if b else "", " " + e if e else "")


def constraints_to_file(items: Iterable[tuple[int, BeginEndConstraints]], path: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for sent_id, c in items:
            f.write(format_constraints(sent_id, c) + "\n")


def _parse_positions(text: str, prefix: str, lineno: int) -> frozenset[int]:
    if not text.startswith(prefix):
        raise DataError(f"line {lineno}: expected field {prefix!r}, got {text!r}")
    rest = text[len(prefix):].split()
    try:
        return frozenset(int(p) for p in rest)
    except ValueError as exc:
        raise DataError(f"line {lineno}: bad position in {text!r}") from exc


def constraints_from_file(path: str) -> dict[int, BeginEndConstraints]:
    out: dict[int, BeginEndConstraints] = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 4:
                raise DataError(f"line {lineno}: expected 4 tab fields, got {len(fields)}")
            try:
                sent_id = int(fields[0])
                n = int(fields[1])
            except ValueError as exc:
                raise DataError(f"line {lineno}: bad id/length") from exc
            begin = _parse_positions(fields[2], "B:", lineno)
            end = _parse_positions(fields[3], "E:", lineno)
            try:
                out[sent_id] = BeginEndConstraints(n, begin, end)
            except DataError as exc:
                raise DataError(f"line {lineno}: {exc}") from exc
    return out
