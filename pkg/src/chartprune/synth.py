"""Synthetic treebank generation from a fixed, hand-written PCFG.

The grammar is small but genuinely ambiguous once re-estimated: PP
attachment (verb vs noun), stacked adjectives inside flat NPs (arity > 2,
so binarization kicks in) and clausal complements.  Number tokens appear
under CD so the tagger's number normalization gets exercised.  Sampling is
rejection-filtered to a length window; everything is driven by one seed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import DataError
from .trees import Tree

# expansion tables: label -> [(weight, rhs)], first rhs is the shortest
GRAMMAR: dict[str, list[tuple[float, tuple[str, ...]]]] = {
    "S": [
        (0.87, ("NP", "VP")),
        (0.09, ("S", "CC", "S")),
    ],
    "NP": [
        (0.04, ("N",)),
        (0.06, ("D", "N")),
        (0.03, ("A", "N")),
        (0.04, ("N", "N")),
        (0.02, ("CD", "N")),
        (0.03, ("N", "PP")),
        (0.02, ("A", "A", "N")),
        (0.03, ("A", "N", "N")),
        (0.02, ("CD", "N", "N")),
        (0.02, ("N", "N", "N")),
        (0.02, ("N", "N", "N", "N")),
        (0.01, ("A", "N", "N", "N")),
        (0.02, ("A", "N", "PP")),
        (0.02, ("N", "N", "PP")),
        (0.06, ("D", "A", "N")),
        (0.06, ("D", "N", "N")),
        (0.03, ("D", "CD", "N")),
        (0.03, ("D", "CD", "N", "N")),
        (0.01, ("CD", "A", "N")),
        (0.05, ("D", "A", "A", "N")),
        (0.06, ("D", "A", "N", "N")),
        (0.02, ("D", "CD", "A", "N")),
        (0.04, ("D", "N", "N", "N")),
        (0.02, ("D", "N", "N", "N", "N")),
        (0.02, ("A", "A", "N", "N")),
        (0.06, ("D", "A", "A", "N", "N")),
        (0.05, ("D", "A", "N", "N", "N")),
        (0.04, ("D", "A", "A", "N", "N", "N")),
        (0.08, ("D", "N", "PP")),
        (0.05, ("D", "A", "N", "PP")),
        (0.03, ("D", "N", "N", "PP")),
        (0.02, ("D", "A", "N", "N", "PP")),
        (0.10, ("NP", "PP")),
        (0.06, ("NP", "CC", "NP")),
        (0.06, ("NP", "SBAR")),
    ],
    "VP": [
        (0.10, ("V",)),
        (0.24, ("V", "NP")),
        (0.11, ("V", "NP", "PP")),
        (0.07, ("V", "PP")),
        (0.06, ("V", "SBAR")),
        (0.05, ("V", "NP", "NP")),
        (0.09, ("VP", "PP")),
        (0.04, ("VP", "RB")),
        (0.03, ("RB", "VP")),
        (0.05, ("V", "RB", "NP")),
        (0.05, ("VP", "CC", "VP")),
        (0.05, ("V", "S")),
    ],
    "PP": [(1.0, ("P", "NP"))],
    "SBAR": [(1.0, ("C", "S"))],
}

LEXICON: dict[str, list[str]] = {
    "N": "cat dog bird fish horse farmer baker child road house garden "
         "river story letter door table winter engine bridge market "
         "teacher island valley signal".split(),
    "V": "saw heard chased found liked followed carried painted crossed "
         "reads sells keeps opened watched built visited".split(),
    "D": "the a this that every some".split(),
    "A": "old young small red quiet bright narrow wooden busy distant".split(),
    "P": "in on near with under behind across beyond".split(),
    "C": "that whether because".split(),
    "CC": "and or".split(),
    "RB": "today quickly again slowly".split(),
}

POS_TAGS = tuple(sorted(LEXICON) + ["CD"])
MAX_DEPTH = 80


@dataclass(frozen=True)
class SynthConfig:
    seed: int = 0
    n_train: int = 2000
    n_dev: int = 250
    n_test: int = 300
    min_len: int = 2
    max_len: int = 40


def _pick(rng: random.Random, weighted: list) -> tuple:
    r = rng.random() * sum(w for w, _ in weighted)
    for w, choice in weighted:
        r -= w
        if r <= 0:
            return choice
    return weighted[-1][1]


def _number_token(rng: random.Random) -> str:
    kind = rng.random()
    if kind < 0.6:
        return str(rng.randint(2, 9999))
    if kind < 0.85:
        return "%d.%d" % (rng.randint(0, 99), rng.randint(0, 99))
    return "%d,%03d" % (rng.randint(1, 99), rng.randint(0, 999))


def _word(rng: random.Random, pos: str) -> str:
    if pos == "CD":
        return _number_token(rng)
    words = LEXICON[pos]
    # Zipf-ish weights so held-out data contains rare and unseen words
    weights = [1.0 / (rank + 1) for rank in range(len(words))]
    return _pick(rng, list(zip(weights, words)))


class _TooDeep(Exception):
    pass


def _expand(rng: random.Random, label: str, depth: int) -> Tree:
    if label == "CD" or label in LEXICON:
        return Tree(label, (Tree(_word(rng, label)),))
    if depth > MAX_DEPTH:
        raise _TooDeep
    rhs = _pick(rng, GRAMMAR[label])
    return Tree(label, tuple(_expand(rng, c, depth + 1) for c in rhs))


def sample_tree(rng: random.Random, min_len: int, max_len: int) -> Tree:
    """One parse tree whose yield length lies in [min_len, max_len]."""
    while True:
        try:
            t = _expand(rng, "S", 0)
        except _TooDeep:
            continue
        if min_len <= len(t.leaves()) <= max_len:
            return t


def generate_corpus(
    config: SynthConfig = SynthConfig(),
) -> tuple[list[Tree], list[Tree], list[Tree]]:
    """(train, dev, test) treebanks, deterministic in config.seed."""
    if config.min_len < 1 or config.max_len < config.min_len:
        raise DataError(
            f"bad length window [{config.min_len}, {config.max_len}]"
        )
    rng = random.Random(config.seed)
    counts = (config.n_train, config.n_dev, config.n_test)
    splits = [
        [sample_tree(rng, config.min_len, config.max_len) for _ in range(n)]
        for n in counts
    ]
    return splits[0], splits[1], splits[2]
