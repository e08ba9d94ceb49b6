"""Minimal recurrent sequence tagger built directly on numpy.

A two-layer bidirectional LSTM encoder reads one sentence at a time (no
batching) and feeds per-position softmax heads.  Everything is float64 and
the backward pass is written out by hand, so analytic gradients can be
checked against finite differences.

Parameters live in a flat name -> array dict; the optimizer and the
serializer both operate on that dict.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DataError


def sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def softmax(x: np.ndarray) -> np.ndarray:
    shifted = x - x.max(axis=-1, keepdims=True)
    ex = np.exp(shifted)
    return ex / ex.sum(axis=-1, keepdims=True)


@dataclass
class EncoderConfig:
    word_dim: int = 32
    pos_dim: int = 8
    hidden: int = 100
    layers: int = 2
    init_scale: float = 0.1
    # rows for UNK/NUMBER are drawn from a normal with this std dev
    special_std: float = 0.5


@dataclass
class TrainConfig:
    epochs: int = 6
    lr0: float = 5e-4
    decay: float = 0.1
    rho: float = 0.9
    eps: float = 1e-8
    seed: int = 0
    shuffle: bool = True


def _lstm_init(rng, params, prefix: str, d_in: int, h: int, scale: float):
    params[prefix + ".W"] = rng.uniform(-scale, scale, (4 * h, d_in))
    params[prefix + ".U"] = rng.uniform(-scale, scale, (4 * h, h))
    params[prefix + ".b"] = rng.uniform(-scale, scale, 4 * h)


def _lstm_forward(params, prefix: str, X: np.ndarray, reverse: bool):
    """Run one LSTM direction over X (T x d_in); returns (H, cache)."""
    W = params[prefix + ".W"]
    U = params[prefix + ".U"]
    b = params[prefix + ".b"]
    h_dim = U.shape[1]
    T = X.shape[0]
    order = range(T - 1, -1, -1) if reverse else range(T)
    # input-to-hidden for the whole sentence in one matmul
    ZX = X @ W.T + b
    H = np.zeros((T, h_dim))
    gates = [None] * T
    cells = np.zeros((T, h_dim))
    h_prev = np.zeros(h_dim)
    c_prev = np.zeros(h_dim)
    for t in order:
        z = ZX[t] + U @ h_prev
        i = sigmoid(z[:h_dim])
        f = sigmoid(z[h_dim : 2 * h_dim])
        o = sigmoid(z[2 * h_dim : 3 * h_dim])
        g = np.tanh(z[3 * h_dim :])
        c = f * c_prev + i * g
        h = o * np.tanh(c)
        gates[t] = (i, f, o, g, c_prev)
        cells[t] = c
        H[t] = h
        h_prev, c_prev = h, c
    return H, (X, H, gates, cells, order)


def _lstm_backward(params, prefix: str, cache, dH: np.ndarray, grads):
    W = params[prefix + ".W"]
    U = params[prefix + ".U"]
    X, H, gates, cells, order = cache
    h_dim = U.shape[1]
    T = X.shape[0]
    DZ = np.zeros((T, 4 * h_dim))
    dU = np.zeros_like(U)
    dh_carry = np.zeros(h_dim)
    dc_carry = np.zeros(h_dim)
    rev = list(order)[::-1]
    for t in rev:
        i, f, o, g, c_prev = gates[t]
        c = cells[t]
        tc = np.tanh(c)
        dh = dH[t] + dh_carry
        do = dh * tc
        dc = dc_carry + dh * o * (1.0 - tc * tc)
        di = dc * g
        df = dc * c_prev
        dg = dc * i
        dz = np.concatenate(
            [di * i * (1 - i), df * f * (1 - f), do * o * (1 - o), dg * (1 - g * g)]
        )
        DZ[t] = dz
        prev_t = _prev_index(order, t)
        h_prev = H[prev_t] if prev_t is not None else np.zeros(h_dim)
        dU += np.outer(dz, h_prev)
        dh_carry = U.T @ dz
        dc_carry = dc * f
    grads[prefix + ".W"] = grads.get(prefix + ".W", 0) + DZ.T @ X
    grads[prefix + ".U"] = grads.get(prefix + ".U", 0) + dU
    grads[prefix + ".b"] = grads.get(prefix + ".b", 0) + DZ.sum(axis=0)
    return DZ @ W


def _prev_index(order, t: int):
    # previous time step in processing order: t-1 forward, t+1 reversed
    if isinstance(order, range) and order.step == 1:
        return t - 1 if t > 0 else None
    last = order.start  # reversed range starts at T-1
    return t + 1 if t < last else None


class SequenceModel:
    """Embeddings + stacked BiLSTM encoder + named softmax heads.

    heads: list of (name, n_classes).  predict() returns per-head arrays of
    shape (T, n_classes) that each sum to 1 per row.
    """

    def __init__(
        self,
        n_words: int,
        n_pos: int,
        heads: list[tuple[str, int]],
        config: EncoderConfig | None = None,
        seed: int = 0,
        special_rows: tuple[int, ...] = (),
    ):
        self.config = cfg = config or EncoderConfig()
        self.heads = list(heads)
        rng = np.random.default_rng(seed)
        s = cfg.init_scale
        p: dict[str, np.ndarray] = {}
        p["emb.word"] = rng.uniform(-s, s, (n_words, cfg.word_dim))
        for row in special_rows:
            p["emb.word"][row] = rng.normal(0.0, cfg.special_std, cfg.word_dim)
        p["emb.pos"] = rng.uniform(-s, s, (n_pos, cfg.pos_dim))
        d_in = cfg.word_dim + cfg.pos_dim
        for layer in range(cfg.layers):
            for direction in ("fwd", "bwd"):
                _lstm_init(rng, p, f"l{layer}.{direction}", d_in, cfg.hidden, s)
            d_in = 2 * cfg.hidden
        for name, n_classes in self.heads:
            p[f"head.{name}.W"] = rng.uniform(-s, s, (n_classes, d_in))
            p[f"head.{name}.b"] = rng.uniform(-s, s, n_classes)
        self.params = p

    # -- forward ----------------------------------------------------------

    def _encode(self, word_ids, pos_ids):
        p = self.params
        X = np.concatenate(
            [p["emb.word"][word_ids], p["emb.pos"][pos_ids]], axis=1
        )
        caches = []
        H = X
        for layer in range(self.config.layers):
            Hf, cf = _lstm_forward(p, f"l{layer}.fwd", H, reverse=False)
            Hb, cb = _lstm_forward(p, f"l{layer}.bwd", H, reverse=True)
            caches.append((cf, cb))
            H = np.concatenate([Hf, Hb], axis=1)
        return X, H, caches

    def predict(self, word_ids, pos_ids) -> dict[str, np.ndarray]:
        if len(word_ids) == 0:
            raise DataError("cannot run the tagger on an empty sentence")
        _, H, _ = self._encode(np.asarray(word_ids), np.asarray(pos_ids))
        return {
            name: softmax(H @ self.params[f"head.{name}.W"].T + self.params[f"head.{name}.b"])
            for name, _ in self.heads
        }

    # -- loss and gradients -----------------------------------------------

    def loss_and_grads(self, word_ids, pos_ids, labels: dict[str, np.ndarray]):
        """Summed cross-entropy over heads and positions, with gradients.

        labels[name][t] is the gold class at position t, or -1 to skip the
        position for that head.
        """
        p = self.params
        word_ids = np.asarray(word_ids)
        pos_ids = np.asarray(pos_ids)
        X, H, caches = self._encode(word_ids, pos_ids)
        T = H.shape[0]
        grads: dict[str, np.ndarray] = {}
        dH = np.zeros_like(H)
        loss = 0.0
        for name, n_classes in self.heads:
            W = p[f"head.{name}.W"]
            b = p[f"head.{name}.b"]
            probs = softmax(H @ W.T + b)
            gold = np.asarray(labels[name])
            mask = gold >= 0
            if not mask.any():
                continue
            rows = np.flatnonzero(mask)
            loss -= np.log(probs[rows, gold[rows]] + 1e-300).sum()
            dlogits = probs.copy()
            dlogits[rows, gold[rows]] -= 1.0
            dlogits[~mask] = 0.0
            grads[f"head.{name}.W"] = dlogits.T @ H
            grads[f"head.{name}.b"] = dlogits.sum(axis=0)
            dH += dlogits @ W
        for layer in range(self.config.layers - 1, -1, -1):
            cf, cb = caches[layer]
            h = self.config.hidden
            dX = _lstm_backward(p, f"l{layer}.fwd", cf, dH[:, :h], grads)
            dX = dX + _lstm_backward(p, f"l{layer}.bwd", cb, dH[:, h:], grads)
            dH = dX
        # dH is now the gradient w.r.t. the embedding concatenation
        wd = self.config.word_dim
        dw = np.zeros_like(p["emb.word"])
        np.add.at(dw, word_ids, dH[:, :wd])
        dp = np.zeros_like(p["emb.pos"])
        np.add.at(dp, pos_ids, dH[:, wd:])
        grads["emb.word"] = dw
        grads["emb.pos"] = dp
        for name in p:
            if name not in grads:
                grads[name] = np.zeros_like(p[name])
        return loss, grads


@dataclass
class RmsProp:
    rho: float = 0.9
    eps: float = 1e-8
    ms: dict = field(default_factory=dict)

    def step(self, params: dict, grads: dict, lr: float) -> None:
        for name, g in grads.items():
            m = self.ms.get(name)
            if m is None:
                m = np.zeros_like(params[name])
                self.ms[name] = m
            m *= self.rho
            m += (1.0 - self.rho) * g * g
            params[name] -= lr * g / (np.sqrt(m) + self.eps)


def train_model(
    model: SequenceModel,
    examples: list[tuple[np.ndarray, np.ndarray, dict]],
    dev_examples: list[tuple[np.ndarray, np.ndarray, dict]] | None,
    config: TrainConfig,
    log=None,
) -> list[dict]:
    """Per-sentence SGD with RMSProp; returns per-epoch summary dicts.

    Keeps the parameters of the epoch with the best dev accuracy (falls back
    to the final epoch when no dev set is given).
    """
    if not examples:
        raise DataError("cannot train on an empty corpus")
    opt = RmsProp(config.rho, config.eps)
    rng = np.random.default_rng(config.seed)
    best_acc = -1.0
    best_params = None
    history = []
    order = np.arange(len(examples))
    for epoch in range(config.epochs):
        lr = config.lr0 * (1.0 - config.decay) ** epoch
        if config.shuffle:
            rng.shuffle(order)
        total_loss = 0.0
        n_positions = 0
        for idx in order:
            words, pos, labels = examples[idx]
            loss, grads = model.loss_and_grads(words, pos, labels)
            opt.step(model.params, grads, lr)
            total_loss += loss
            n_positions += len(words)
        row = {"epoch": epoch, "lr": lr, "train_loss": total_loss / max(1, n_positions)}
        if dev_examples is not None:
            row["dev_acc"] = evaluate_accuracy(model, dev_examples)
            if row["dev_acc"] > best_acc:
                best_acc = row["dev_acc"]
                best_params = {k: v.copy() for k, v in model.params.items()}
        history.append(row)
        if log is not None:
            log(row)
    if best_params is not None:
        model.params = best_params
    return history


def evaluate_accuracy(model: SequenceModel, examples) -> float:
    correct = 0
    total = 0
    for words, pos, labels in examples:
        probs = model.predict(words, pos)
        for name, _ in model.heads:
            gold = np.asarray(labels[name])
            mask = gold >= 0
            if not mask.any():
                continue
            pred = probs[name].argmax(axis=1)
            correct += int((pred[mask] == gold[mask]).sum())
            total += int(mask.sum())
    return correct / total if total else 0.0


# ---------------------------------------------------------------------------
# Serialization: npz with a params tree plus a small header
# ---------------------------------------------------------------------------


def save_params(path: str, model: SequenceModel, extra: dict[str, list[str]]):
    header = {
        "heads": [f"{n}:{c}" for n, c in model.heads],
        "config": [
            str(model.config.word_dim),
            str(model.config.pos_dim),
            str(model.config.hidden),
            str(model.config.layers),
        ],
    }
    header.update(extra)
    arrays = {"param." + k: v for k, v in model.params.items()}
    for key, strings in header.items():
        arrays["meta." + key] = np.array(list(strings), dtype=str)
    # write through a file object so numpy does not append ".npz"
    with open(path, "wb") as f:
        np.savez(f, **arrays)


def load_params(path: str) -> tuple[SequenceModel, dict[str, list[str]]]:
    try:
        data = np.load(path)
    except (OSError, ValueError) as exc:
        raise DataError(f"cannot read model file {path}: {exc}") from exc
    meta = {
        key[len("meta."):]: [str(s) for s in data[key]]
        for key in data.files
        if key.startswith("meta.")
    }
    if "heads" not in meta or "config" not in meta:
        raise DataError(f"model file {path} is missing its header")
    heads = []
    for spec_str in meta["heads"]:
        name, _, count = spec_str.rpartition(":")
        heads.append((name, int(count)))
    wd, pd, hid, layers = (int(x) for x in meta["config"])
    cfg = EncoderConfig(word_dim=wd, pos_dim=pd, hidden=hid, layers=layers)
    params = {
        key[len("param."):]: data[key]
        for key in data.files
        if key.startswith("param.")
    }
    n_words = params["emb.word"].shape[0]
    n_pos = params["emb.pos"].shape[0]
    model = SequenceModel(n_words, n_pos, heads, cfg, seed=0)
    model.params = params
    extra = {k: v for k, v in meta.items() if k not in ("heads", "config")}
    return model, extra
