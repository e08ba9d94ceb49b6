"""Evaluation metrics: labeled bracket scores, boundary tagging scores and
chart quality summaries.

Bracket scoring expects trees whose word layer has already been stripped, so
the leaves are parts of speech.  Every internal node, including the root,
contributes one labeled bracket; duplicates count with multiplicity.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import DataError
from .trees import Tree, spans


def _f1(p: float, r: float) -> float:
    return 0.0 if p + r == 0 else 2 * p * r / (p + r)


def brackets(t: Tree) -> Counter:
    out: Counter = Counter()
    for node, i, k in spans(t):
        if not node.is_leaf:
            out[(node.label, i, k)] += 1
    return out


def bracket_counts(gold: Tree, pred: Tree) -> tuple[int, int, int]:
    """(matched, gold total, predicted total) labeled brackets."""
    if len(gold.leaves()) != len(pred.leaves()):
        raise DataError(
            f"yield mismatch: gold has {len(gold.leaves())} tokens, "
            f"prediction has {len(pred.leaves())}"
        )
    g = brackets(gold)
    p = brackets(pred)
    matched = sum(min(g[key], p[key]) for key in g if key in p)
    return matched, sum(g.values()), sum(p.values())


@dataclass(frozen=True)
class ParsevalScores:
    precision: float
    recall: float
    f1: float
    matched: int
    n_gold: int
    n_pred: int
    n_sentences: int
    n_failed: int

    def __str__(self) -> str:
        return (
            f"P {100 * self.precision:.2f}  R {100 * self.recall:.2f}  "
            f"F1 {100 * self.f1:.2f}  ({self.n_sentences} sentences, "
            f"{self.n_failed} failed)"
        )


def parseval(pairs: Iterable[tuple[Tree, Tree | None]]) -> ParsevalScores:
    """Corpus-level bracket scores over (gold, predicted) pairs.

    A None prediction is a parse failure: its gold brackets still count in
    the recall denominator.
    """
    matched = n_gold = n_pred = n_sent = n_failed = 0
    for gold, pred in pairs:
        n_sent += 1
        if pred is None:
            n_failed += 1
            n_gold += sum(brackets(gold).values())
            continue
        m, g, p = bracket_counts(gold, pred)
        matched += m
        n_gold += g
        n_pred += p
    if n_sent == 0:
        raise DataError("no sentences to score")
    precision = matched / n_pred if n_pred else 0.0
    recall = matched / n_gold if n_gold else 0.0
    return ParsevalScores(
        precision, recall, _f1(precision, recall), matched, n_gold, n_pred,
        n_sent, n_failed,
    )


@dataclass(frozen=True)
class TaggingScores:
    precision: float
    recall: float
    f1: float
    accuracy: float
    n_positions: int


def tagging_scores(
    pairs: Iterable[tuple[Sequence[int], Sequence[int]]]
) -> TaggingScores:
    """Binary-decision scores over (gold, predicted) 0/1 sequences.

    Precision and recall are for the positive class (a banned position);
    accuracy is over all positions.
    """
    tp = fp = fn = correct = total = 0
    for gold, pred in pairs:
        if len(gold) != len(pred):
            raise DataError(
                f"length mismatch: {len(gold)} gold vs {len(pred)} predicted"
            )
        for g, p in zip(gold, pred):
            total += 1
            correct += g == p
            if p and g:
                tp += 1
            elif p:
                fp += 1
            elif g:
                fn += 1
    if total == 0:
        raise DataError("no positions to score")
    # empty prediction (or empty gold) scores a vacuous 1.0 by convention
    precision = tp / (tp + fp) if tp + fp else 1.0
    recall = tp / (tp + fn) if tp + fn else 1.0
    return TaggingScores(
        precision, recall, _f1(precision, recall), correct / total, total
    )


