"""Agenda-based chart parser for lexicalized TAG.

Items live over dotted positions in elementary trees:

    ("d", tid, addr, d, i, j, k, l)   first d children of internal node addr
                                      parsed, spanning [i,l) with gap (j,k)
    ("n", tid, addr, adj, i, j, k, l) subtree at addr complete; adj=0 before
                                      the adjunction decision, adj=1 after

Adjunction follows the index pattern (i,j,k,l) + (j,r,s,k) -> (i,r,s,l): a
finished auxiliary tree whose gap matches a complete node's outer span wraps
that node.  At most one adjunction per node; null adjunction is the free
alternative.  Foot items are predicted on demand, from complete nodes whose
label matches an auxiliary root, and every consequent item is offered to the
allowability predicate before entering the chart.  Scores are max-product
log probabilities; each elementary tree's weight enters once, at its anchor
scan.  Score ties keep the first derivation found (the agenda order is
deterministic).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .constraints import AllowabilityPredicate, allow_all
from .errors import DataError
from .items import TagItem
from .tag_grammar import ElementaryTree, TagGrammar
from .trees import Tree, spans

HOLE = Tree("\x00foot")


@dataclass(frozen=True)
class DerivationNode:
    """One elementary tree instance and what attached to it where."""

    tree_name: str
    tid: int
    # (op, address in this elementary tree, child instance) with op in
    # {"subst", "adjoin"}
    attachments: tuple = ()
    # ((aux i,j,k,l), (host i,j,k,l), (result i,j,k,l)) per adjunction into
    # this instance, for index-pattern audits
    adjunction_indices: tuple = ()
    # derived phrase-structure yield of this instance and everything below
    # it in the derivation; auxiliary instances keep a foot placeholder leaf
    tree: Tree | None = field(default=None, compare=False)

    def instances(self):
        yield self
        for _, _, child in self.attachments:
            yield from child.instances()


@dataclass
class TagChart:
    grammar: TagGrammar
    tokens: list[str]
    scores: dict = field(default_factory=dict)
    back: dict = field(default_factory=dict)
    goals: list = field(default_factory=list)

    @property
    def n(self) -> int:
        return len(self.tokens)

    @property
    def n_items(self) -> int:
        return len(self.scores)

    def item_set(self) -> frozenset:
        return frozenset(self.scores)

    def goal_score(self) -> float | None:
        if not self.goals:
            return None
        return max(self.scores[g] for g in self.goals)


def _signature(grammar: TagGrammar, item) -> TagItem:
    _, tid, addr, _, i, j, k, l = item
    label = grammar.trees[tid].nodes[addr].label
    return TagItem(label, i, l, j, k)


def tag_parse(
    grammar: TagGrammar,
    tokens: list[str],
    predicate: AllowabilityPredicate = allow_all,
) -> TagChart:
    chart = TagChart(grammar, list(tokens))
    n = len(tokens)
    if n == 0:
        return chart
    trees = grammar.trees
    scores = chart.scores
    back = chart.back

    lexicon = grammar.lexicon
    placeholder = lexicon.get("@", [])
    if any(token not in lexicon and not placeholder for token in tokens):
        return chart  # a token no tree can anchor: immediate failure

    aux_by_root: dict[str, list[int]] = {}
    subst_sites: dict[str, list[tuple[int, tuple]]] = {}
    tid_of = {id(t): i for i, t in enumerate(trees)}
    for tid, t in enumerate(trees):
        if t.is_auxiliary:
            aux_by_root.setdefault(t.root.label, []).append(tid)
        for addr, node in t.nodes.items():
            if node.kind == "subst":
                subst_sites.setdefault(node.label, []).append((tid, addr))

    agenda: deque = deque()
    done_child: dict[tuple, list] = {}
    dots_at: dict[tuple, list] = {}
    hosts: dict[tuple, list] = {}
    auxdone: dict[tuple, list] = {}

    def add(item, score: float, backptr) -> None:
        if not predicate(_signature(grammar, item)):
            return
        old = scores.get(item)
        if old is not None and old >= score:
            return
        scores[item] = score
        back[item] = backptr
        agenda.append((item, score))

    def combine(dot, child) -> None:
        _, tid, addr, d, i, j, k, l = dot
        _, _, _, _, ci, cj, ck, cl = child
        if j is not None and cj is not None:
            return  # two gaps cannot merge
        gap = (j, k) if j is not None else (cj, ck)
        add(
            ("d", tid, addr, d + 1, i, gap[0], gap[1], cl),
            scores[dot] + scores[child],
            ("dot", dot, child),
        )

    def adjoin(aux_item, host_item) -> None:
        _, atid, _, _, ai, aj, ak, al = aux_item
        _, htid, haddr, _, hi, hj, hk, hl = host_item
        add(
            ("n", htid, haddr, 1, ai, hj, hk, al),
            scores[aux_item] + scores[host_item],
            ("adjoin", aux_item, host_item),
        )

    for p, token in enumerate(tokens):
        for t in lexicon.get(token, []) + placeholder:
            tid = tid_of[id(t)]
            add(
                ("n", tid, t.anchor_addr, 1, p, None, None, p + 1),
                t.logprob,
                ("scan", p),
            )

    while agenda:
        item, popped_score = agenda.popleft()
        if scores[item] != popped_score:
            continue  # superseded by a better derivation
        kind, tid, addr, flag, i, j, k, l = item
        t = trees[tid]
        if kind == "d":
            arity = len(t.nodes[addr].children)
            if flag == arity:
                add(("n", tid, addr, 0, i, j, k, l), popped_score, ("complete", item))
            else:
                dots_at.setdefault((tid, addr, flag, l), []).append(item)
                for child in done_child.get((tid, addr + (flag,), l), []):
                    combine(item, child)
            continue
        if flag == 0:
            # complete node: decide adjunction
            label = t.nodes[addr].label
            add(("n", tid, addr, 1, i, j, k, l), popped_score, ("nulladj", item))
            hosts.setdefault((label, i, l), []).append(item)
            for aux_item in auxdone.get((label, i, l), []):
                adjoin(aux_item, item)
            for atid in aux_by_root.get(label, []):
                foot = trees[atid].foot_addr
                add(("n", atid, foot, 1, i, i, l, l), 0.0, ("foot",))
            continue
        # node done (adj resolved)
        if addr:
            parent, c = addr[:-1], addr[-1]
            if c == 0:
                add(("d", tid, parent, 1, i, j, k, l), popped_score, ("dot1", item))
            else:
                for dot in dots_at.get((tid, parent, c, i), []):
                    combine(dot, item)
            done_child.setdefault((tid, addr, i), []).append(item)
            continue
        # a finished elementary tree
        label = t.root.label
        if t.is_auxiliary:
            auxdone.setdefault((label, j, k), []).append(item)
            for host in hosts.get((label, j, k), []):
                adjoin(item, host)
        else:
            if label == grammar.start and i == 0 and l == n and j is None:
                if item not in chart.goals:
                    chart.goals.append(item)
            for stid, saddr in subst_sites.get(label, []):
                add(("n", stid, saddr, 1, i, None, None, l), popped_score, ("subst", item))
    return chart


# ---------------------------------------------------------------------------
# Backtrace: derived tree and derivation tree
# ---------------------------------------------------------------------------


def _replace_hole(t: Tree, replacement: Tree) -> Tree:
    if t is HOLE:
        return replacement
    if t.is_leaf:
        return t
    return Tree(
        t.label, tuple(_replace_hole(c, replacement) for c in t.children), t.is_new
    )


def best_derivation(chart: TagChart):
    """(derived Tree, DerivationNode, log score), or None on failure."""
    if not chart.goals:
        return None
    goal = max(chart.goals, key=lambda g: chart.scores[g])
    tokens = chart.tokens
    trees = chart.grammar.trees
    back = chart.back

    def instance(root_done) -> DerivationNode:
        tid = root_done[1]
        tree, attachments, adjunctions = walk_node(root_done)
        return DerivationNode(
            trees[tid].name, tid, tuple(attachments), tuple(adjunctions), tree
        )

    def walk_node(item):
        ptr = back[item]
        tag = ptr[0]
        if tag == "scan":
            return Tree(tokens[ptr[1]]), [], []
        if tag == "foot":
            return HOLE, [], []
        if tag == "subst":
            child = instance(ptr[1])
            return child.tree, [("subst", item[2], child)], []
        if tag == "nulladj":
            return walk_complete(ptr[1])
        if tag == "adjoin":
            aux_item, host_item = ptr[1], ptr[2]
            aux = instance(aux_item)
            host_tree, att, adj = walk_complete(host_item)
            _, _, _, _, ai, aj, ak, al = aux_item
            _, _, _, _, hi, hj, hk, hl = host_item
            indices = ((ai, aj, ak, al), (hi, hj, hk, hl), (item[4], item[5], item[6], item[7]))
            att = att + [("adjoin", item[2], aux)]
            return _replace_hole(aux.tree, host_tree), att, adj + [indices]
        raise AssertionError(f"unknown backpointer {tag}")

    def walk_complete(item):
        dot = back[item][1]
        kids, att, adj = walk_dot(dot)
        tid, addr = item[1], item[2]
        label = trees[tid].nodes[addr].label
        return Tree(label, tuple(kids)), att, adj

    def walk_dot(dot):
        ptr = back[dot]
        if ptr[0] == "dot1":
            tree, att, adj = walk_node(ptr[1])
            return [tree], att, adj
        prev, child = ptr[1], ptr[2]
        kids, att, adj = walk_dot(prev)
        tree, att2, adj2 = walk_node(child)
        return kids + [tree], att + att2, adj + adj2

    deriv = instance(goal)
    return deriv.tree, deriv, chart.scores[goal]


def tag_chart_stats(chart: TagChart, gold: Tree) -> tuple[int, float]:
    """(item count, fraction of items whose outer span is a gold span).

    Counts every recognized item, dotted or complete; the gap indices are
    ignored because gold consistency is about where material begins and
    ends.  An empty chart reports (0, 0.0).
    """
    if len(gold.leaves()) != chart.n:
        raise DataError(
            f"gold tree has {len(gold.leaves())} tokens, chart has {chart.n}"
        )
    gold_spans = {(i, k) for _, i, k in spans(gold)}
    n_items = hits = 0
    for item in chart.scores:
        n_items += 1
        hits += (item[4], item[7]) in gold_spans
    return n_items, hits / n_items if n_items else 0.0
