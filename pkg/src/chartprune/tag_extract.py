"""Spinal extraction of a lexicalized TAG from a constituency treebank.

Each token's elementary tree is the spine of nodes it heads, per a head
percolation table.  Non-head children become substitution sites, except when
a node's head child repeats the node label: then the non-head children are
adjuncts and each would wrap the spine as an auxiliary tree with its foot on
the head side.  The parser adjoins at most once per node, so only the last
adjunct (in surface order) at each node is kept; the others' tokens are
dropped, which shortens some sentences.

Tree weights are log relative frequencies of the unlexicalized structure
given the anchor's POS.
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass

from .errors import DataError
from .tag_grammar import ElementaryTree, TagGrammar, TagNode, tag_grammar
from .trees import Tree


@dataclass(frozen=True)
class HeadRules:
    # label -> (search direction "left"|"right", preferred child labels)
    table: dict

    def head_index(self, label: str, child_labels: list[str]) -> int:
        if len(child_labels) == 1:
            return 0
        rule = self.table.get(label)
        if rule is None:
            raise DataError(f"no head rule for label {label!r}")
        direction, prefs = rule
        order = (
            range(len(child_labels))
            if direction == "left"
            else range(len(child_labels) - 1, -1, -1)
        )
        for wanted in prefs:
            for idx in order:
                if child_labels[idx] == wanted:
                    return idx
        return 0 if direction == "left" else len(child_labels) - 1


def read_head_rules(text: str) -> HeadRules:
    table = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 3 or fields[1] not in ("left", "right"):
            raise DataError(
                f"line {lineno}: expected 'LABEL<TAB>left|right<TAB>PREFS'"
            )
        table[fields[0]] = (fields[1], tuple(fields[2].split()))
    return HeadRules(table)


def read_head_rules_file(path: str) -> HeadRules:
    with open(path, encoding="utf-8") as f:
        return read_head_rules(f.read())


def write_head_rules(rules: HeadRules) -> str:
    return "".join(
        f"{label}\t{direction}\t{' '.join(prefs)}\n"
        for label, (direction, prefs) in rules.table.items()
    )


@dataclass(frozen=True)
class TagSentence:
    """One extracted derivation: the retained tokens with their supertags."""

    tokens: tuple[str, ...]
    pos_tags: tuple[str, ...]
    supertags: tuple[str, ...]  # inventory entry names, one per token
    n_dropped: int = 0


@dataclass(frozen=True)
class TagCorpus:
    sentences: tuple[TagSentence, ...]
    # name -> unlexicalized structure; names are assigned in discovery order
    inventory: dict
    counts: Counter  # name -> corpus frequency
    weights: dict  # (anchor POS, name) -> logprob of tree given POS

    def lexicalized_tree(self, name: str, pos: str, word: str) -> ElementaryTree:
        root = self.inventory[name]
        return ElementaryTree(name, root, self.weights[(pos, name)], word)


def _is_preterminal(t: Tree) -> bool:
    return len(t.children) == 1 and t.children[0].is_leaf


class _Extractor:
    def __init__(self, rules: HeadRules):
        self.rules = rules
        self.structures: dict[str, TagNode] = {}
        self.names: dict[str, str] = {}  # structure text -> name
        self.counts: Counter = Counter()
        self.pair_counts: Counter = Counter()  # (pos, name)
        self.pos_counts: Counter = Counter()

    def name_for(self, root: TagNode) -> str:
        from .tag_grammar import write_tag_node

        text = write_tag_node(root)
        name = self.names.get(text)
        if name is None:
            name = f"t{len(self.names)}"
            self.names[text] = name
            self.structures[name] = root
        return name

    def extract_sentence(self, t: Tree) -> list[tuple[str, str, str]]:
        """(token, pos, tree name) per retained token, in surface order."""
        records: list[tuple[int, str, str, TagNode]] = []

        def head_token_pos(node: Tree) -> int:
            while not _is_preterminal(node):
                idx = self.rules.head_index(
                    node.label, [c.label for c in node.children]
                )
                node = node.children[idx]
            return leaf_positions[id(node)]

        leaf_positions = {}
        pos_of = {}
        word_of = {}

        def index_leaves(node: Tree, at: int) -> int:
            if _is_preterminal(node):
                leaf_positions[id(node)] = at
                pos_of[at] = node.label
                word_of[at] = node.children[0].label
                return at + 1
            if node.is_leaf:
                raise DataError(
                    f"token {node.label!r} has no preterminal above it"
                )
            for child in node.children:
                at = index_leaves(child, at)
            return at

        index_leaves(t, 0)

        def spine(node: Tree) -> TagNode:
            """Elementary-tree fragment for the head token of node."""
            if _is_preterminal(node):
                return TagNode(node.label, "internal", (TagNode("@", "anchor"),))
            labels = [c.label for c in node.children]
            head = self.rules.head_index(node.label, labels)
            same_label = node.children[head].label == node.label
            if same_label:
                # Spine re-enters its own category: siblings are adjuncts
                # and this level collapses, so that re-adjoining the kept
                # auxiliary reproduces it.  One adjunction per node, so
                # all but the last adjunct (and their tokens) are dropped.
                adjuncts = [
                    ("left" if idx < head else "right", child)
                    for idx, child in enumerate(node.children)
                    if idx != head
                ]
                if adjuncts:
                    side, kept = adjuncts[-1]
                    emit(kept, auxiliary_for=(node.label, side))
                return spine(node.children[head])
            kids: list[TagNode] = []
            for idx, child in enumerate(node.children):
                if idx == head:
                    kids.append(spine(child))
                else:
                    kids.append(TagNode(child.label, "subst"))
                    emit(child, auxiliary_for=None)
            return TagNode(node.label, "internal", tuple(kids))

        def emit(node: Tree, auxiliary_for: tuple[str, str] | None) -> None:
            material = spine(node)
            if auxiliary_for is not None:
                label, side = auxiliary_for
                foot = TagNode(label, "foot")
                kids = (material, foot) if side == "left" else (foot, material)
                material = TagNode(label, "internal", kids)
            at = head_token_pos(node)
            records.append((at, word_of[at], pos_of[at], material))

        emit(t, None)

        out = []
        for anchor_pos, word, pos, root in sorted(records):
            name = self.name_for(root)
            self.counts[name] += 1
            self.pair_counts[(pos, name)] += 1
            self.pos_counts[pos] += 1
            out.append((word, pos, name))
        return out


def extract_spinal(trees: list[Tree], rules: HeadRules) -> TagCorpus:
    if not trees:
        raise DataError("cannot extract a TAG from an empty treebank")
    ex = _Extractor(rules)
    raw = [ex.extract_sentence(t) for t in trees]
    weights = {
        (pos, name): math.log(count) - math.log(ex.pos_counts[pos])
        for (pos, name), count in ex.pair_counts.items()
    }
    sentences = []
    for t, rows in zip(trees, raw):
        tokens = tuple(word for word, _, _ in rows)
        sentences.append(
            TagSentence(
                tokens,
                tuple(pos for _, pos, _ in rows),
                tuple(name for _, _, name in rows),
                n_dropped=len(t) - len(tokens),
            )
        )
    return TagCorpus(tuple(sentences), ex.structures, ex.counts, weights)


def corpus_grammar(corpus: TagCorpus, start: str | None = None) -> TagGrammar:
    """Inventory as an unlexicalized grammar (for file round-trips)."""
    trees = []
    for name, root in corpus.inventory.items():
        logprob = math.log(
            corpus.counts[name] / sum(corpus.counts.values())
        )
        trees.append(ElementaryTree(name, root, logprob, "@"))
    return tag_grammar(trees, start)
