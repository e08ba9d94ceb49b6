"""Encoder internals: gradients against central differences, persistence."""

import numpy as np
import pytest

from chartprune import DataError, EncoderConfig, SequenceModel, TrainConfig
from chartprune.nn import (
    RmsProp,
    evaluate_accuracy,
    load_params,
    save_params,
    sigmoid,
    softmax,
    train_model,
)
from oracles import central_difference_grads

TINY = EncoderConfig(word_dim=3, pos_dim=2, hidden=4, layers=2)


def tiny_model(seed=0, heads=(("B", 2), ("E", 3))):
    return SequenceModel(5, 3, list(heads), TINY, seed=seed)


def rel_err(a, b):
    denom = max(np.abs(a).max(), np.abs(b).max(), 1e-8)
    return np.abs(a - b).max() / denom


def test_softmax_rows_normalize():
    x = np.array([[1.0, 2.0, 3.0], [-5.0, 0.0, 5.0]])
    p = softmax(x)
    assert np.allclose(p.sum(axis=1), 1.0)
    assert np.all(p > 0)


def test_sigmoid_is_stable_at_extremes():
    x = np.array([-1e4, 0.0, 1e4])
    s = sigmoid(x)
    assert np.all(np.isfinite(s))
    assert s[1] == pytest.approx(0.5)


def test_gradients_match_central_differences():
    rng = np.random.default_rng(3)
    for trial in range(4):
        model = tiny_model(seed=trial)
        word_ids = rng.integers(0, 5, size=2)
        pos_ids = rng.integers(0, 3, size=2)
        labels = {
            "B": rng.integers(0, 2, size=2),
            "E": rng.integers(0, 3, size=2),
        }
        _, grads = model.loss_and_grads(word_ids, pos_ids, labels)
        numeric = central_difference_grads(model, word_ids, pos_ids, labels)
        for name in model.params:
            assert rel_err(grads[name], numeric[name]) < 1e-4, name


def test_masked_positions_get_no_gradient():
    model = tiny_model()
    word_ids = np.array([1, 2])
    pos_ids = np.array([0, 1])
    all_masked = {"B": np.array([-1, -1]), "E": np.array([-1, -1])}
    loss, grads = model.loss_and_grads(word_ids, pos_ids, all_masked)
    assert loss == 0.0
    assert all(np.all(g == 0) for g in grads.values())
    numeric = central_difference_grads(
        model, word_ids, pos_ids, {"B": np.array([0, -1]), "E": np.array([-1, 1])}
    )
    _, partial = model.loss_and_grads(
        word_ids, pos_ids, {"B": np.array([0, -1]), "E": np.array([-1, 1])}
    )
    for name in model.params:
        assert rel_err(partial[name], numeric[name]) < 1e-4, name


def test_predict_rejects_empty_input():
    with pytest.raises(DataError):
        tiny_model().predict([], [])


def test_same_seed_same_params():
    a, b = tiny_model(seed=7), tiny_model(seed=7)
    assert all(np.array_equal(a.params[k], b.params[k]) for k in a.params)
    c = tiny_model(seed=8)
    assert any(not np.array_equal(a.params[k], c.params[k]) for k in a.params)


def test_rmsprop_moves_against_gradient():
    params = {"w": np.array([1.0, -1.0])}
    opt = RmsProp()
    opt.step(params, {"w": np.array([1.0, -2.0])}, lr=0.1)
    assert params["w"][0] < 1.0 and params["w"][1] > -1.0


def test_training_reduces_loss_and_history_is_complete():
    rng = np.random.default_rng(0)
    examples = []
    for _ in range(30):
        n = rng.integers(2, 5)
        w = rng.integers(0, 5, size=n)
        p = rng.integers(0, 3, size=n)
        # learnable rule: B label equals (word id mod 2)
        examples.append((w, p, {"B": w % 2, "E": p % 3}))
    model = tiny_model()
    history = train_model(
        model, examples, examples[:10], TrainConfig(epochs=3, lr0=1e-2, seed=0)
    )
    assert [h["epoch"] for h in history] == [0, 1, 2]
    assert history[-1]["train_loss"] < history[0]["train_loss"]
    assert all(0.0 <= h["dev_acc"] <= 1.0 for h in history)
    # the parameters of the best dev epoch are restored after training
    best = max(h["dev_acc"] for h in history)
    assert evaluate_accuracy(model, examples[:10]) == best


def test_save_load_round_trip(tmp_path):
    model = tiny_model(seed=2)
    path = str(tmp_path / "m.npz")
    save_params(path, model, {"kind": ["test"], "words": ["a", "b"]})
    back, extra = load_params(path)
    assert extra["kind"] == ["test"] and extra["words"] == ["a", "b"]
    assert back.heads == model.heads
    assert back.config == model.config
    for k in model.params:
        assert np.array_equal(back.params[k], model.params[k])
    w = np.array([1, 2])
    p = np.array([0, 1])
    got, want = back.predict(w, p), model.predict(w, p)
    assert all(np.array_equal(got[h], want[h]) for h in got)
