"""Elementary trees and grammar files for tree-adjoining parsing.

File format: one tree per line,

    name <TAB> logprob <TAB> (S (NP! ) (VP (V @) (S* ))) [<TAB> anchor-word]

"!" marks a substitution site, "*" the foot node and "@" the anchor.  Every
frontier node must be one of those three (so each elementary tree contributes
exactly one token to a derivation).  The anchor word defaults to the label of
the anchor's parent node; an explicit fourth column overrides it, and the
placeholder "@" leaves the tree unlexicalized (it then matches any token).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import DataError

ANCHOR = "@"

Addr = tuple[int, ...]


@dataclass(frozen=True)
class TagNode:
    label: str
    kind: str  # "internal" | "anchor" | "subst" | "foot"
    children: tuple["TagNode", ...] = ()

    def __post_init__(self):
        if self.kind != "internal" and self.children:
            raise DataError(f"{self.kind} node {self.label!r} must be a leaf")
        if self.kind == "internal" and not self.children:
            raise DataError(f"internal node {self.label!r} has no children")


@dataclass(frozen=True)
class ElementaryTree:
    name: str
    root: TagNode
    logprob: float
    anchor_word: str
    # derived tables, filled in __post_init__
    nodes: dict = field(default_factory=dict, compare=False, repr=False)
    foot_addr: Addr | None = field(default=None, compare=False, repr=False)
    anchor_addr: Addr = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        nodes: dict[Addr, TagNode] = {}
        feet: list[Addr] = []
        anchors: list[Addr] = []

        def walk(node: TagNode, addr: Addr):
            nodes[addr] = node
            if node.kind == "foot":
                feet.append(addr)
            elif node.kind == "anchor":
                anchors.append(addr)
            for idx, child in enumerate(node.children):
                walk(child, addr + (idx,))

        walk(self.root, ())
        if self.root.kind != "internal":
            raise DataError(f"tree {self.name}: root must be an internal node")
        if len(anchors) != 1:
            raise DataError(
                f"tree {self.name}: expected exactly 1 anchor, found {len(anchors)}"
            )
        if len(feet) > 1:
            raise DataError(f"tree {self.name}: more than one foot node")
        if feet and nodes[feet[0]].label != self.root.label:
            raise DataError(
                f"tree {self.name}: foot label {nodes[feet[0]].label!r} "
                f"differs from root label {self.root.label!r}"
            )
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "foot_addr", feet[0] if feet else None)
        object.__setattr__(self, "anchor_addr", anchors[0])

    @property
    def is_auxiliary(self) -> bool:
        return self.foot_addr is not None

    @property
    def kind(self) -> str:
        return "auxiliary" if self.is_auxiliary else "initial"

    @property
    def lexicalized(self) -> bool:
        return self.anchor_word != ANCHOR

    def unlexicalized_text(self) -> str:
        """Structure string without the anchor word; the supertag identity."""
        return write_tag_node(self.root)

    def lexicalize(self, name: str, word: str, logprob: float) -> "ElementaryTree":
        return ElementaryTree(name, self.root, logprob, word)


@dataclass(frozen=True)
class TagGrammar:
    trees: tuple[ElementaryTree, ...]
    start: str

    def __post_init__(self):
        if not self.trees:
            raise DataError("empty TAG grammar")

    @property
    def lexicon(self) -> dict[str, list[ElementaryTree]]:
        out: dict[str, list[ElementaryTree]] = {}
        for t in self.trees:
            out.setdefault(t.anchor_word, []).append(t)
        return out


def tag_grammar(trees, start: str | None = None) -> TagGrammar:
    trees = tuple(trees)
    if start is None:
        initial = [t for t in trees if not t.is_auxiliary]
        if not initial:
            raise DataError("grammar has no initial tree to take the start label from")
        start = initial[0].root.label
    return TagGrammar(trees, start)


# ---------------------------------------------------------------------------
# Parsing and writing the bracketed tree notation
# ---------------------------------------------------------------------------


def _tokenize(text: str):
    token = ""
    for ch in text:
        if ch in "()" or ch.isspace():
            if token:
                yield token
                token = ""
            if ch == "(":
                yield "("
            elif ch == ")":
                yield ")"
        else:
            token += ch
    if token:
        yield token


def _leaf_node(token: str, lineno: int) -> TagNode:
    if token == ANCHOR:
        return TagNode(ANCHOR, "anchor")
    if token.endswith("!"):
        return TagNode(token[:-1], "subst")
    if token.endswith("*"):
        return TagNode(token[:-1], "foot")
    raise DataError(
        f"line {lineno}: frontier token {token!r} is none of '@', 'X!' or 'X*'"
    )


def parse_tag_node(text: str, lineno: int = 1) -> TagNode:
    tokens = list(_tokenize(text))
    pos = 0

    def parse() -> TagNode:
        nonlocal pos
        if pos >= len(tokens):
            raise DataError(f"line {lineno}: unexpected end of tree")
        tok = tokens[pos]
        if tok != "(":
            pos += 1
            return _leaf_node(tok, lineno)
        pos += 1
        if pos >= len(tokens) or tokens[pos] in "()":
            raise DataError(f"line {lineno}: missing node label")
        label = tokens[pos]
        pos += 1
        children = []
        while pos < len(tokens) and tokens[pos] != ")":
            children.append(parse())
        if pos >= len(tokens):
            raise DataError(f"line {lineno}: unbalanced parentheses")
        pos += 1  # consume ")"
        if not children:
            # "(NP! )" and "(S* )" spell subst/foot sites as childless brackets
            return _leaf_node(label, lineno)
        return TagNode(label, "internal", tuple(children))

    node = parse()
    if pos != len(tokens):
        raise DataError(f"line {lineno}: trailing material after tree")
    return node


def write_tag_node(node: TagNode) -> str:
    if node.kind == "anchor":
        return ANCHOR
    if node.kind == "subst":
        return f"({node.label}! )"
    if node.kind == "foot":
        return f"({node.label}* )"
    inner = " ".join(write_tag_node(c) for c in node.children)
    return f"({node.label} {inner})"


def _default_anchor_word(root: TagNode) -> str:
    def find_parent(node: TagNode) -> str | None:
        for child in node.children:
            if child.kind == "anchor":
                return node.label
            found = find_parent(child)
            if found is not None:
                return found
        return None

    word = find_parent(root)
    if word is None:
        raise DataError("tree has no anchor")
    return word


def elementary_tree_from_line(line: str, lineno: int = 1) -> ElementaryTree:
    fields = line.rstrip("\n").split("\t")
    if len(fields) not in (3, 4):
        raise DataError(
            f"line {lineno}: expected 3 or 4 tab fields, got {len(fields)}"
        )
    name = fields[0]
    try:
        logprob = float(fields[1])
    except ValueError as exc:
        raise DataError(f"line {lineno}: bad logprob {fields[1]!r}") from exc
    root = parse_tag_node(fields[2], lineno)
    anchor_word = fields[3] if len(fields) == 4 else _default_anchor_word(root)
    try:
        return ElementaryTree(name, root, logprob, anchor_word)
    except DataError as exc:
        raise DataError(f"line {lineno}: {exc}") from exc


def read_tag_grammar(text: str, start: str | None = None) -> TagGrammar:
    trees = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        trees.append(elementary_tree_from_line(line, lineno))
    return tag_grammar(trees, start)


def read_tag_grammar_file(path: str, start: str | None = None) -> TagGrammar:
    with open(path, encoding="utf-8") as f:
        return read_tag_grammar(f.read(), start)


def write_tag_grammar(g: TagGrammar) -> str:
    lines = []
    for t in g.trees:
        line = f"{t.name}\t{t.logprob!r}\t{write_tag_node(t.root)}"
        if t.anchor_word != _default_anchor_word(t.root):
            line += f"\t{t.anchor_word}"
        lines.append(line + "\n")
    return "".join(lines)


def write_tag_grammar_file(g: TagGrammar, path: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(write_tag_grammar(g))
