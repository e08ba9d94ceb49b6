"""Boundary tagger: predicts, per position, whether a wide constituent may
begin there (head "B") and whether one may end at the following boundary
(head "E").

Conventions: head B at token i scores begin position i; head E at token t
scores end position t+1.  Class 1 is "may begin/end", class 0 is "banned".
Begin candidates are 0..n-2 and end candidates 2..n; out-of-window positions
are trained to the positive class.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .constraints import BeginEndConstraints, from_probs, gold_constraints
from .errors import DataError
from .evalmetrics import TaggingScores, tagging_scores
from .nn import (
    EncoderConfig,
    SequenceModel,
    TrainConfig,
    load_params,
    save_params,
    train_model,
)
from .trees import Tree, pos_sequence

UNK = "<unk>"
NUMBER = "<number>"
NUMBER_RE = re.compile(r"[+-]?(?:\d[\d,]*(?:\.\d*)?|\.\d+)")


def build_vocab(sentences: list[list[str]]) -> dict[str, int]:
    vocab = {UNK: 0, NUMBER: 1}
    for tokens in sentences:
        for token in tokens:
            if NUMBER_RE.fullmatch(token):
                continue
            vocab.setdefault(token, len(vocab))
    return vocab


def preprocess(tokens: list[str], vocab: dict[str, int]) -> np.ndarray:
    ids = []
    for token in tokens:
        if NUMBER_RE.fullmatch(token):
            ids.append(vocab[NUMBER])
        else:
            ids.append(vocab.get(token, vocab[UNK]))
    return np.array(ids, dtype=np.int64)


def boundary_labels(c: BeginEndConstraints) -> dict[str, np.ndarray]:
    n = c.n
    b = np.ones(n, dtype=np.int64)
    for i in c.begin_banned:
        b[i] = 0
    e = np.ones(n, dtype=np.int64)
    for k in c.end_banned:
        e[k - 1] = 0
    return {"B": b, "E": e}


@dataclass
class BoundaryModel:
    model: SequenceModel
    word_vocab: dict[str, int]
    pos_vocab: dict[str, int]

    def encode(self, tokens: list[str], pos_tags: list[str]):
        if len(tokens) != len(pos_tags):
            raise DataError(
                f"{len(tokens)} tokens but {len(pos_tags)} POS tags"
            )
        word_ids = preprocess(tokens, self.word_vocab)
        pos_ids = np.array(
            [self.pos_vocab.get(p, self.pos_vocab[UNK]) for p in pos_tags],
            dtype=np.int64,
        )
        return word_ids, pos_ids

    def predict_probs(self, tokens, pos_tags):
        """(p_begin indexed by position 0..n-1, p_end indexed by 0..n)."""
        word_ids, pos_ids = self.encode(tokens, pos_tags)
        probs = self.model.predict(word_ids, pos_ids)
        n = len(tokens)
        p_begin = probs["B"][:, 1]
        p_end = np.ones(n + 1)
        p_end[1:] = probs["E"][:, 1]
        return p_begin, p_end

    def predict_constraints(self, tokens, pos_tags, theta: float) -> BeginEndConstraints:
        p_begin, p_end = self.predict_probs(tokens, pos_tags)
        return from_probs(len(tokens), p_begin, p_end, theta)

    def save(self, path: str) -> None:
        save_params(
            path,
            self.model,
            {
                "kind": ["boundary"],
                "word_vocab": _vocab_list(self.word_vocab),
                "pos_vocab": _vocab_list(self.pos_vocab),
            },
        )


def _vocab_list(vocab: dict[str, int]) -> list[str]:
    out = [""] * len(vocab)
    for token, idx in vocab.items():
        out[idx] = token
    return out


def _vocab_dict(tokens: list[str]) -> dict[str, int]:
    return {token: idx for idx, token in enumerate(tokens)}


def load_boundary_model(path: str) -> BoundaryModel:
    model, extra = load_params(path)
    if extra.get("kind") != ["boundary"]:
        raise DataError(f"{path} is not a boundary tagger model")
    return BoundaryModel(
        model, _vocab_dict(extra["word_vocab"]), _vocab_dict(extra["pos_vocab"])
    )


def corpus_from_trees(trees: list[Tree]):
    """(tokens, pos_tags, gold constraints) triples for tagger training."""
    out = []
    for t in trees:
        out.append((t.leaves(), pos_sequence(t), gold_constraints(t)))
    return out


def train_boundary_model(
    train_trees: list[Tree],
    dev_trees: list[Tree] | None = None,
    encoder: EncoderConfig | None = None,
    training: TrainConfig | None = None,
    log=None,
) -> tuple[BoundaryModel, list[dict]]:
    if not train_trees:
        raise DataError("cannot train on an empty corpus")
    training = training or TrainConfig()
    corpus = corpus_from_trees(train_trees)
    vocab = build_vocab([tokens for tokens, _, _ in corpus])
    pos_vocab = {UNK: 0}
    for _, pos_tags, _ in corpus:
        for p in pos_tags:
            pos_vocab.setdefault(p, len(pos_vocab))
    model = SequenceModel(
        len(vocab),
        len(pos_vocab),
        heads=[("B", 2), ("E", 2)],
        config=encoder,
        seed=training.seed,
        special_rows=(vocab[UNK], vocab[NUMBER]),
    )
    bm = BoundaryModel(model, vocab, pos_vocab)

    def examples_for(trees_corpus):
        examples = []
        for tokens, pos_tags, gold in trees_corpus:
            word_ids, pos_ids = bm.encode(tokens, pos_tags)
            examples.append((word_ids, pos_ids, boundary_labels(gold)))
        return examples

    dev = examples_for(corpus_from_trees(dev_trees)) if dev_trees else None
    history = train_model(model, examples_for(corpus), dev, training, log=log)
    return bm, history


def predict_corpus(
    bm: BoundaryModel, sentences: list[tuple[list[str], list[str]]], theta: float
) -> list[BeginEndConstraints]:
    return [
        bm.predict_constraints(tokens, pos_tags, theta)
        for tokens, pos_tags in sentences
    ]


def tagger_prf(
    pred: list[BeginEndConstraints], gold: list[BeginEndConstraints]
) -> dict[str, TaggingScores]:
    """Banned-set precision/recall/accuracy, separately for begins and ends.

    Positions scored are the candidate windows: 0..n-2 for begins, 2..n for
    ends.
    """
    if len(pred) != len(gold):
        raise DataError(f"{len(pred)} predictions for {len(gold)} sentences")
    b_pairs = []
    e_pairs = []
    for p, g in zip(pred, gold):
        if p.n != g.n:
            raise DataError(f"sentence length mismatch: {p.n} vs {g.n}")
        b_pairs.append(
            (
                [int(i in g.begin_banned) for i in range(0, g.n - 1)],
                [int(i in p.begin_banned) for i in range(0, g.n - 1)],
            )
        )
        e_pairs.append(
            (
                [int(k in g.end_banned) for k in range(2, g.n + 1)],
                [int(k in p.end_banned) for k in range(2, g.n + 1)],
            )
        )
    return {"B": tagging_scores(b_pairs), "E": tagging_scores(e_pairs)}


# ---------------------------------------------------------------------------
# Windowed logistic fallback: same predict interface, no recurrence.  Not
# used by the acceptance suite; handy when training time is scarce.
# ---------------------------------------------------------------------------


class LogisticBoundaryModel:
    """Per-position logistic model over a +/-2 window of word and POS ids."""

    WINDOW = 2

    def __init__(self, word_vocab, pos_vocab, seed=0):
        self.word_vocab = word_vocab
        self.pos_vocab = pos_vocab
        slots = 2 * self.WINDOW + 1
        self.n_features = slots * (len(word_vocab) + len(pos_vocab)) + 1
        rng = np.random.default_rng(seed)
        self.weights = {
            "B": rng.uniform(-0.01, 0.01, self.n_features),
            "E": rng.uniform(-0.01, 0.01, self.n_features),
        }

    def _features(self, word_ids, pos_ids, t):
        n = len(word_ids)
        vocab_n = len(self.word_vocab)
        pos_n = len(self.pos_vocab)
        feats = []
        base = 0
        for off in range(-self.WINDOW, self.WINDOW + 1):
            j = t + off
            if 0 <= j < n:
                feats.append(base + word_ids[j])
                feats.append(base + vocab_n + pos_ids[j])
            base += vocab_n + pos_n
        feats.append(self.n_features - 1)  # bias
        return feats

    def predict_probs(self, tokens, pos_tags):
        word_ids = preprocess(tokens, self.word_vocab)
        pos_ids = [self.pos_vocab.get(p, self.pos_vocab[UNK]) for p in pos_tags]
        n = len(tokens)
        p_begin = np.zeros(n)
        p_end = np.ones(n + 1)
        for t in range(n):
            feats = self._features(word_ids, pos_ids, t)
            sb = sum(self.weights["B"][f] for f in feats)
            se = sum(self.weights["E"][f] for f in feats)
            p_begin[t] = 1.0 / (1.0 + np.exp(-sb))
            p_end[t + 1] = 1.0 / (1.0 + np.exp(-se))
        return p_begin, p_end

    def predict_constraints(self, tokens, pos_tags, theta):
        p_begin, p_end = self.predict_probs(tokens, pos_tags)
        return from_probs(len(tokens), p_begin, p_end, theta)

    def fit(self, trees, epochs=8, lr=0.5):
        corpus = corpus_from_trees(trees)
        for _ in range(epochs):
            for tokens, pos_tags, gold in corpus:
                word_ids = preprocess(tokens, self.word_vocab)
                pos_ids = [self.pos_vocab.get(p, 0) for p in pos_tags]
                labels = boundary_labels(gold)
                for t in range(len(tokens)):
                    feats = self._features(word_ids, pos_ids, t)
                    for head in ("B", "E"):
                        w = self.weights[head]
                        s = sum(w[f] for f in feats)
                        p = 1.0 / (1.0 + np.exp(-s))
                        g = p - labels[head][t]
                        for f in feats:
                            w[f] -= lr * g / len(feats)
        return self
