"""Constituent trees: bracketed-treebank I/O and binarization transforms.

A Tree is an ordered labeled tree; leaves (no children) are the terminal
symbols.  Binarization introduces intermediate nodes that are flagged with
``is_new`` and labeled ``@PARENT[sib,...]`` so that they can never collide
with treebank labels (labels starting with ``@`` are rejected on input).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

from .errors import DataError

NEW_LABEL_PREFIX = "@"


@dataclass(frozen=True)
class Tree:
    label: str
    children: tuple["Tree", ...] = ()
    is_new: bool = False

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def leaves(self) -> list[str]:
        if self.is_leaf:
            return [self.label]
        out: list[str] = []
        for child in self.children:
            out.extend(child.leaves())
        return out

    def __len__(self) -> int:
        """Number of leaves (token count)."""
        if self.is_leaf:
            return 1
        return sum(len(c) for c in self.children)

    def pretty(self) -> str:
        return write_tree(self)


def tree(label: str, *children: Tree | str, is_new: bool = False) -> Tree:
    """Convenience constructor; string children become leaves."""
    kids = tuple(Tree(c) if isinstance(c, str) else c for c in children)
    return Tree(label, kids, is_new)


def spans(t: Tree, start: int = 0) -> Iterator[tuple[Tree, int, int]]:
    """Yield (node, i, k) for every node, spans end-exclusive, leaves included."""
    if t.is_leaf:
        yield t, start, start + 1
        return
    i = start
    end = start
    for child in t.children:
        for node, ci, ck in spans(child, end):
            yield node, ci, ck
        end = ck  # last yielded is the child itself
    yield t, i, end


def constituent_spans(t: Tree, min_width: int = 1) -> list[tuple[str, int, int]]:
    """(label, i, k) for internal nodes with width >= min_width."""
    out = []
    for node, i, k in spans(t):
        if not node.is_leaf and k - i >= min_width:
            out.append((node.label, i, k))
    return out


# ---------------------------------------------------------------------------
# Penn-Treebank-style bracketing I/O
# ---------------------------------------------------------------------------


def _tokenize(text: str) -> Iterator[tuple[str, int]]:
    """Yield (token, line_number) for '(' ')' and atoms."""
    line = 1
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            i += 1
        elif ch.isspace():
            i += 1
        elif ch in "()":
            yield ch, line
            i += 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in "()":
                j += 1
            yield text[i:j], line
            i = j


def _check_label(label: str, line: int) -> str:
    if label.startswith(NEW_LABEL_PREFIX):
        raise DataError(
            f"label {label!r} at line {line} starts with reserved prefix "
            f"{NEW_LABEL_PREFIX!r}"
        )
    return label


def read_trees(text: str) -> list[Tree]:
    """Parse bracketed-treebank text into trees.

    Whitespace-insensitive; a tree may span several lines.  A wrapping
    ``( ... )`` with an empty label around a single tree is stripped.
    Raises DataError on unbalanced parentheses, with the line number.
    """
    trees: list[Tree] = []
    # stack holds (label, children_so_far, open_line); label None = not yet read
    stack: list[list] = []
    last_line = 1
    for tok, line in _tokenize(text):
        last_line = line
        if tok == "(":
            stack.append([None, [], line])
        elif tok == ")":
            if not stack:
                raise DataError(f"unbalanced at line {line}")
            label, kids, _ = stack.pop()
            if label is None:
                # "( ... )" wrapper with empty label
                if len(kids) == 1:
                    node = kids[0]
                elif not kids:
                    raise DataError(f"empty brackets at line {line}")
                else:
                    raise DataError(
                        f"wrapper with {len(kids)} children at line {line}"
                    )
            else:
                node = Tree(label, tuple(kids))
            if stack:
                stack[-1][1].append(node)
            else:
                trees.append(node)
        else:
            if not stack:
                raise DataError(f"stray token {tok!r} at line {line}")
            if stack[-1][0] is None and not stack[-1][1]:
                stack[-1][0] = _check_label(tok, line)
            else:
                stack[-1][1].append(Tree(_check_label(tok, line)))
    if stack:
        raise DataError(f"unbalanced at line {stack[0][2]}")
    return trees


def read_treebank(path: str) -> list[Tree]:
    with open(path, encoding="utf-8") as f:
        return read_trees(f.read())


def write_tree(t: Tree) -> str:
    if t.is_leaf:
        return t.label
    return "(%s %s)" % (t.label, " ".join(write_tree(c) for c in t.children))


def write_treebank(trees: list[Tree], path: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for t in trees:
            f.write(write_tree(t) + "\n")


# ---------------------------------------------------------------------------
# Binarization
# ---------------------------------------------------------------------------


def _markov_label(parent: str, consumed: list[str], h: int) -> str:
    sigma = consumed[-h:] if h > 0 else []
    return "%s%s[%s]" % (NEW_LABEL_PREFIX, parent, ",".join(sigma))


def binarize(t: Tree, h: int = 2) -> Tree:
    """Left-factored binarization with horizontal markovization of order h.

    A node with children C1..Cm (m > 2) becomes a left-branching chain; the
    intermediate covering C1..Cd is labeled with the parent and the last
    min(h, d) consumed child labels, and carries is_new=True.  Intermediates
    therefore share the parent's left edge, which keeps every one of them
    compatible with begin constraints extracted from the original tree
    (their right edges are covered by the new-label end exemption).
    """
    if t.is_leaf:
        return t
    kids = [binarize(c, h) for c in t.children]
    if len(kids) <= 2:
        return Tree(t.label, tuple(kids), t.is_new)
    consumed = [c.label for c in t.children[:2]]
    node = Tree(_markov_label(t.label, consumed, h), (kids[0], kids[1]), True)
    for idx in range(2, len(kids) - 1):
        consumed.append(t.children[idx].label)
        node = Tree(_markov_label(t.label, consumed, h), (node, kids[idx]), True)
    return Tree(t.label, (node, kids[-1]), t.is_new)


def debinarize(t: Tree) -> Tree:
    """Splice out is_new nodes, re-attaching their children in order."""
    if t.is_leaf:
        return t
    kids: list[Tree] = []
    for child in t.children:
        d = debinarize(child)
        if d.is_new:
            kids.extend(d.children)
        else:
            kids.append(d)
    return Tree(t.label, tuple(kids), t.is_new)


def max_arity(t: Tree) -> int:
    if t.is_leaf:
        return 0
    return max(len(t.children), max(max_arity(c) for c in t.children))


def strip_word_layer(t: Tree) -> Tree:
    """Replace each preterminal (single leaf child) by a leaf with its label.

    Turns a word-level tree into the POS-as-terminals view used for
    grammar extraction and bracket scoring.
    """
    if t.is_leaf:
        return t
    if len(t.children) == 1 and t.children[0].is_leaf:
        return Tree(t.label)
    return Tree(t.label, tuple(strip_word_layer(c) for c in t.children), t.is_new)


def pos_sequence(t: Tree) -> list[str]:
    """Preterminal labels left to right (the POS tags of the tokens)."""
    if len(t.children) == 1 and t.children[0].is_leaf:
        return [t.label]
    if t.is_leaf:
        raise DataError(f"bare leaf {t.label!r} has no preterminal")
    out: list[str] = []
    for c in t.children:
        out.extend(pos_sequence(c))
    return out
