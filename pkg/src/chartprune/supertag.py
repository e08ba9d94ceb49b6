"""Supertagging: rank unlexicalized elementary trees per token and build the
sentence-specific grammar over the artificial string "1 2 ... n".

Using position indices as stand-in tokens keeps the supertags of repeated
words separate; after parsing, relabel() puts the real tokens back.  Two
models satisfy the same interface: a count-based model
P(tree | word, POS) with backoff to P(tree | POS) and P(tree), and a
recurrent model sharing the boundary tagger's encoder with a wider softmax.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .nn import EncoderConfig, SequenceModel, TrainConfig, load_params, save_params, train_model
from .tag_extract import TagCorpus
from .tag_grammar import ElementaryTree, TagGrammar
from .tagger import NUMBER, UNK, build_vocab, preprocess
from .trees import Tree

# per token: ((name, logprob), ...) sorted by descending probability
SupertagAssignment = list[list[tuple[str, float]]]


def inventory_names(corpus: TagCorpus) -> list[str]:
    """Inventory entry names in discovery order (the tie-break order)."""
    return list(corpus.inventory)


class FrequencySupertagModel:
    """P(tree | word, POS), backed off to P(tree | POS), then P(tree)."""

    def __init__(self, corpus: TagCorpus):
        self.names = inventory_names(corpus)
        self.index = {name: i for i, name in enumerate(self.names)}
        self.by_word: Counter = Counter()
        self.by_pos: Counter = Counter()
        self.word_totals: Counter = Counter()
        self.pos_totals: Counter = Counter()
        self.global_counts: Counter = Counter()
        self.total = 0
        for sent in corpus.sentences:
            for word, pos, name in zip(sent.tokens, sent.pos_tags, sent.supertags):
                self.by_word[(word, pos, name)] += 1
                self.by_pos[(pos, name)] += 1
                self.word_totals[(word, pos)] += 1
                self.pos_totals[pos] += 1
                self.global_counts[name] += 1
                self.total += 1

    def predict_tag_probs(self, tokens, pos_tags) -> np.ndarray:
        out = np.zeros((len(tokens), len(self.names)))
        for t, (word, pos) in enumerate(zip(tokens, pos_tags)):
            if self.word_totals[(word, pos)]:
                denom = self.word_totals[(word, pos)]
                for i, name in enumerate(self.names):
                    out[t, i] = self.by_word[(word, pos, name)] / denom
            elif self.pos_totals[pos]:
                denom = self.pos_totals[pos]
                for i, name in enumerate(self.names):
                    out[t, i] = self.by_pos[(pos, name)] / denom
            else:
                for i, name in enumerate(self.names):
                    out[t, i] = self.global_counts[name] / self.total
        return out


class NeuralSupertagModel:
    """The boundary tagger's encoder with a softmax over the inventory."""

    def __init__(self, model: SequenceModel, word_vocab, pos_vocab, names):
        self.model = model
        self.word_vocab = word_vocab
        self.pos_vocab = pos_vocab
        self.names = list(names)

    def predict_tag_probs(self, tokens, pos_tags) -> np.ndarray:
        word_ids = preprocess(list(tokens), self.word_vocab)
        pos_ids = np.array(
            [self.pos_vocab.get(p, self.pos_vocab[UNK]) for p in pos_tags]
        )
        return self.model.predict(word_ids, pos_ids)["tag"]

    def save(self, path: str) -> None:
        save_params(
            path,
            self.model,
            {
                "kind": ["supertag"],
                "word_vocab": _vocab_list(self.word_vocab),
                "pos_vocab": _vocab_list(self.pos_vocab),
                "names": self.names,
            },
        )


def _vocab_list(vocab):
    out = [""] * len(vocab)
    for token, idx in vocab.items():
        out[idx] = token
    return out


def load_supertag_model(path: str) -> NeuralSupertagModel:
    model, extra = load_params(path)
    if extra.get("kind") != ["supertag"]:
        raise DataError(f"{path} is not a supertagger model")
    word_vocab = {t: i for i, t in enumerate(extra["word_vocab"])}
    pos_vocab = {t: i for i, t in enumerate(extra["pos_vocab"])}
    return NeuralSupertagModel(model, word_vocab, pos_vocab, extra["names"])


def train_neural_supertagger(
    corpus: TagCorpus,
    dev: TagCorpus | None = None,
    encoder: EncoderConfig | None = None,
    training: TrainConfig | None = None,
    log=None,
) -> tuple[NeuralSupertagModel, list[dict]]:
    names = inventory_names(corpus)
    index = {name: i for i, name in enumerate(names)}
    vocab = build_vocab([list(s.tokens) for s in corpus.sentences])
    pos_vocab = {UNK: 0}
    for s in corpus.sentences:
        for p in s.pos_tags:
            pos_vocab.setdefault(p, len(pos_vocab))
    training = training or TrainConfig()
    model = SequenceModel(
        len(vocab),
        len(pos_vocab),
        heads=[("tag", len(names))],
        config=encoder,
        seed=training.seed,
        special_rows=(vocab[UNK], vocab[NUMBER]),
    )
    st = NeuralSupertagModel(model, vocab, pos_vocab, names)

    def examples_for(c: TagCorpus):
        examples = []
        for s in c.sentences:
            word_ids = preprocess(list(s.tokens), vocab)
            pos_ids = np.array([pos_vocab.get(p, 0) for p in s.pos_tags])
            labels = {
                "tag": np.array([index.get(n, -1) for n in s.supertags])
            }
            examples.append((word_ids, pos_ids, labels))
        return examples

    dev_examples = examples_for(dev) if dev is not None else None
    history = train_model(model, examples_for(corpus), dev_examples, training, log)
    return st, history


def topk(model, tokens, pos_tags, k: int) -> SupertagAssignment:
    """Per-token k-best supertags; ties broken by inventory order."""
    if k < 1:
        raise DataError(f"k must be at least 1, got {k}")
    probs = model.predict_tag_probs(tokens, pos_tags)
    names = model.names
    out: SupertagAssignment = []
    for t in range(len(tokens)):
        row = probs[t]
        ranked = sorted(range(len(names)), key=lambda i: (-row[i], i))[:k]
        out.append(
            [
                (names[i], math.log(row[i]) if row[i] > 0 else float("-inf"))
                for i in ranked
            ]
        )
    return out


def gold_assignment(sent, corpus: TagCorpus) -> SupertagAssignment:
    """k=1 assignment from the extracted derivation itself."""
    return [
        [(name, corpus.weights[(pos, name)])]
        for pos, name in zip(sent.pos_tags, sent.supertags)
    ]


def sentence_grammar(
    assignment: SupertagAssignment, inventory: dict, start: str
) -> TagGrammar:
    """Grammar over the artificial tokens "1".."n"; not binarized."""
    trees: list[ElementaryTree] = []
    for t, choices in enumerate(assignment):
        word = str(t + 1)
        for name, logprob in choices:
            root = inventory.get(name)
            if root is None:
                raise DataError(f"supertag {name!r} is not in the inventory")
            trees.append(ElementaryTree(f"{name}@{t + 1}", root, logprob, word))
    return TagGrammar(tuple(trees), start)


def artificial_tokens(n: int) -> list[str]:
    return [str(i + 1) for i in range(n)]


def relabel(t: Tree, tokens: list[str]) -> Tree:
    """Replace artificial leaf "i" by tokens[i-1]; structure unchanged."""
    if t.is_leaf:
        try:
            idx = int(t.label)
        except ValueError as exc:
            raise DataError(f"leaf {t.label!r} is not an artificial token") from exc
        if not 1 <= idx <= len(tokens):
            raise DataError(f"leaf index {idx} outside 1..{len(tokens)}")
        return Tree(tokens[idx - 1])
    return Tree(t.label, tuple(relabel(c, tokens) for c in t.children), t.is_new)
