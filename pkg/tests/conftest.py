"""Shared fixtures: bundled corpora and one session-scoped tagger run."""

import os
import time

import pytest

from chartprune import (
    EncoderConfig,
    TrainConfig,
    binarize,
    extract_pcfg,
    extract_spinal,
    read_treebank,
    train_boundary_model,
)
from chartprune.tag_extract import read_head_rules_file

DATA = os.path.join(os.path.dirname(__file__), os.pardir, "data")


def data_path(name: str) -> str:
    return os.path.join(DATA, name)


@pytest.fixture(scope="session")
def train_trees():
    return read_treebank(data_path("synth.train.ptb"))


@pytest.fixture(scope="session")
def dev_trees():
    return read_treebank(data_path("synth.dev.ptb"))


@pytest.fixture(scope="session")
def test_trees():
    return read_treebank(data_path("synth.test.ptb"))


@pytest.fixture(scope="session")
def markov2_grammar(train_trees):
    return extract_pcfg(
        [binarize(t, h=2) for t in train_trees], pos_as_terminals=True
    )


@pytest.fixture(scope="session")
def head_rules():
    return read_head_rules_file(data_path("head_rules.tsv"))


@pytest.fixture(scope="session")
def tag_corpus(train_trees, head_rules):
    return extract_spinal(train_trees, head_rules)


@pytest.fixture(scope="session")
def boundary_tagger(train_trees, dev_trees):
    """Trained once per session; reused by the tagger acceptance checks.

    Returns (model, history, wall seconds) so budget checks can reuse the
    single training run.
    """
    t0 = time.perf_counter()
    model, history = train_boundary_model(
        train_trees,
        dev_trees,
        EncoderConfig(word_dim=24, pos_dim=8, hidden=64, layers=1),
        TrainConfig(epochs=4, seed=0),
    )
    return model, history, time.perf_counter() - t0
