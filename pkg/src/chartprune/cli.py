"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 data error.  Every flag can also be
supplied through a TOML config file (``--config``); the table matching the
subcommand path is consulted, with explicit flags taking precedence, e.g.

    [parse.pcfg]
    grammar = "out/grammar.pcfg"

``--seed`` fixes Python and NumPy randomness for anything stochastic.
"""

from __future__ import annotations

import argparse
import random
import sys
import time
from collections import Counter

import numpy as np
import tomli

from .bench import (
    BenchSentence,
    SentenceRecord,
    benchmark,
    eval_report,
    write_stats_tsv_file,
)
from .constraints import (
    BeginEndConstraints,
    allow_all,
    constraints_from_file,
    constraints_to_file,
    gold_constraints,
    pcfg_filter,
    tag_filter,
)
from .cky import chart_stats, parse
from .errors import DataError
from .evalmetrics import parseval, tagging_scores
from .nn import EncoderConfig, TrainConfig
from .pcfg import extract_pcfg, read_pcfg_file, write_pcfg_file
from .supertag import (
    FrequencySupertagModel,
    load_supertag_model,
    sentence_grammar,
    artificial_tokens,
    relabel,
    topk,
    train_neural_supertagger,
)
from .tag_extract import extract_spinal, read_head_rules_file
from .tag_parser import best_derivation, tag_chart_stats, tag_parse
from .tagger import load_boundary_model, predict_corpus, train_boundary_model
from .trees import (
    Tree,
    binarize,
    debinarize,
    pos_sequence,
    read_treebank,
    strip_word_layer,
    write_treebank,
)

FAIL_LABEL = "NOPARSE"


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; the contract here is exit 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _log(msg: str) -> None:
    print(msg, file=sys.stderr)


# ---------------------------------------------------------------------------
# Config resolution
# ---------------------------------------------------------------------------


def _config_section(path: str | None, subpath: list[str]) -> dict:
    if path is None:
        return {}
    with open(path, "rb") as f:
        table = tomli.load(f)
    for key in subpath:
        nxt = table.get(key)
        if not isinstance(nxt, dict):
            return {}
        table = nxt
    return table


def _resolve(args, key: str, fallback=None):
    """Flag value, else config-file value, else the hard default."""
    value = getattr(args, key)
    if value is not None:
        return value
    return args._cfg.get(key, fallback)


def _require(args, key: str, flag: str):
    value = _resolve(args, key)
    if value is None:
        args._parser.error(f"{flag} is required")
    return value


def _seed_everything(seed: int | None) -> None:
    if seed is not None:
        random.seed(seed)
        np.random.seed(seed)


# ---------------------------------------------------------------------------
# treebank
# ---------------------------------------------------------------------------


def _cmd_treebank_binarize(args) -> int:
    trees = read_treebank(_require(args, "treebank", "--treebank"))
    h = int(_resolve(args, "h", 2))
    out = [debinarize(t) if args.undo else binarize(t, h=h) for t in trees]
    write_treebank(out, _require(args, "out", "--out"))
    return 0


def _cmd_treebank_extract_pcfg(args) -> int:
    trees = read_treebank(_require(args, "treebank", "--treebank"))
    h = int(_resolve(args, "h", 2))
    grammar = extract_pcfg(
        [binarize(t, h=h) for t in trees],
        pos_as_terminals=args.pos_as_terminals,
    )
    write_pcfg_file(grammar, _require(args, "out", "--out"))
    return 0


# ---------------------------------------------------------------------------
# constraints
# ---------------------------------------------------------------------------


def _cmd_constraints_gold(args) -> int:
    trees = read_treebank(_require(args, "treebank", "--treebank"))
    constraints_to_file(
        ((i, gold_constraints(t)) for i, t in enumerate(trees)),
        _require(args, "out", "--out"),
    )
    return 0


def _as_labels(c: BeginEndConstraints) -> tuple[list[int], list[int]]:
    b = [1 if i in c.begin_banned else 0 for i in range(0, c.n - 1)]
    e = [1 if k in c.end_banned else 0 for k in range(2, c.n + 1)]
    return b, e


def _cmd_constraints_eval(args) -> int:
    gold = constraints_from_file(_require(args, "gold", "--gold"))
    pred = constraints_from_file(_require(args, "pred", "--pred"))
    if set(gold) != set(pred):
        raise DataError("gold and predicted files cover different sentences")
    pairs_b, pairs_e = [], []
    for sent_id in sorted(gold):
        gb, ge = _as_labels(gold[sent_id])
        pb, pe = _as_labels(pred[sent_id])
        pairs_b.append((gb, pb))
        pairs_e.append((ge, pe))
    for side, pairs in (("B", pairs_b), ("E", pairs_e)):
        s = tagging_scores(pairs)
        print(
            "%s  acc %.4f  P %.4f  R %.4f  F %.4f  (%d positions)"
            % (side, s.accuracy, s.precision, s.recall, s.f1, s.n_positions)
        )
    return 0


# ---------------------------------------------------------------------------
# tagger
# ---------------------------------------------------------------------------


def _train_configs(args) -> tuple[EncoderConfig, TrainConfig]:
    encoder = EncoderConfig(
        word_dim=int(_resolve(args, "word_dim", EncoderConfig.word_dim)),
        pos_dim=int(_resolve(args, "pos_dim", EncoderConfig.pos_dim)),
        hidden=int(_resolve(args, "hidden", EncoderConfig.hidden)),
        layers=int(_resolve(args, "layers", EncoderConfig.layers)),
    )
    training = TrainConfig(
        epochs=int(_resolve(args, "epochs", TrainConfig.epochs)),
        lr0=float(_resolve(args, "lr", TrainConfig.lr0)),
        seed=int(args.seed if args.seed is not None else TrainConfig.seed),
    )
    return encoder, training


def _cmd_tagger_train(args) -> int:
    train = read_treebank(_require(args, "treebank", "--treebank"))
    dev_path = _resolve(args, "dev")
    dev = read_treebank(dev_path) if dev_path else None
    encoder, training = _train_configs(args)
    model, _ = train_boundary_model(train, dev, encoder, training, log=_log)
    model.save(_require(args, "out", "--out"))
    return 0


def _cmd_tagger_predict(args) -> int:
    model = load_boundary_model(_require(args, "model", "--model"))
    trees = read_treebank(_require(args, "treebank", "--treebank"))
    theta = float(_resolve(args, "theta", 0.9))
    sentences = [(t.leaves(), pos_sequence(t)) for t in trees]
    predicted = predict_corpus(model, sentences, theta)
    constraints_to_file(enumerate(predicted), _require(args, "out", "--out"))
    return 0


# ---------------------------------------------------------------------------
# parse
# ---------------------------------------------------------------------------


def _read_sentences(args) -> tuple[list[list[str]], list[Tree] | None]:
    """(token lists, gold trees or None) from --treebank or --input."""
    treebank, raw = _resolve(args, "treebank"), _resolve(args, "input")
    if treebank and raw:
        args._parser.error("--treebank and --input are mutually exclusive")
    if treebank:
        trees = read_treebank(treebank)
        if args.pos_as_terminals:
            trees = [strip_word_layer(t) for t in trees]
        return [t.leaves() for t in trees], trees
    if raw:
        with open(raw, encoding="utf-8") as f:
            lines = [line.split() for line in f if line.strip()]
        return lines, None
    args._parser.error("one of --treebank or --input is required")


def _load_constraint_filters(path, n_sentences, strategy=None):
    """Per-sentence allowability predicates from a constraints file."""
    if path is None:
        return [allow_all] * n_sentences
    table = constraints_from_file(path)
    preds = []
    for i in range(n_sentences):
        c = table.get(i)
        if c is None:
            preds.append(allow_all)
        elif strategy is None:
            preds.append(pcfg_filter(c))
        else:
            preds.append(tag_filter(c, strategy))
    return preds


def _cmd_parse_pcfg(args) -> int:
    grammar = read_pcfg_file(_require(args, "grammar", "--grammar"))
    sentences, gold = _read_sentences(args)
    if args.stats and gold is None:
        args._parser.error("--stats needs gold trees, use --treebank")
    preds = _load_constraint_filters(_resolve(args, "constraints"), len(sentences))
    out_trees: list[Tree] = []
    records = []
    for i, tokens in enumerate(sentences):
        t0 = time.perf_counter()
        chart = parse(grammar, tokens, predicate=preds[i])
        t1 = time.perf_counter()
        best = chart.viterbi_tree()
        t2 = time.perf_counter()
        if best is None:
            out_trees.append(Tree(FAIL_LABEL, tuple(Tree(w) for w in tokens)))
        else:
            out_trees.append(debinarize(best))
        if args.stats:
            items, fraction = chart_stats(chart, gold[i])
            records.append(
                SentenceRecord(
                    i,
                    len(tokens),
                    items,
                    (t1 - t0) * 1000.0,
                    (t2 - t0) * 1000.0,
                    fraction,
                    "ok" if best is not None else "fail",
                )
            )
    write_treebank(out_trees, _require(args, "out", "--out"))
    if args.stats:
        write_stats_tsv_file(records, args.stats)
    return 0


def _cmd_parse_tag(args) -> int:
    train = read_treebank(_require(args, "train", "--train"))
    rules = read_head_rules_file(_require(args, "head_rules", "--head-rules"))
    corpus = extract_spinal(train, rules)
    model_path = _resolve(args, "model")
    if model_path:
        model = load_supertag_model(model_path)
    else:
        model = FrequencySupertagModel(corpus)
    start = Counter(t.label for t in train).most_common(1)[0][0]
    k = int(_resolve(args, "k", 3))
    test = read_treebank(_require(args, "treebank", "--treebank"))
    strategy = _resolve(args, "mode", "cc")
    preds = _load_constraint_filters(
        _resolve(args, "constraints"), len(test), strategy
    )
    out_trees = []
    records = []
    for i, t in enumerate(test):
        tokens, pos_tags = t.leaves(), pos_sequence(t)
        assignment = topk(model, tokens, pos_tags, k)
        grammar = sentence_grammar(assignment, corpus.inventory, start)
        t0 = time.perf_counter()
        chart = tag_parse(grammar, artificial_tokens(len(tokens)), preds[i])
        t1 = time.perf_counter()
        best = best_derivation(chart)
        t2 = time.perf_counter()
        if best is None:
            out_trees.append(Tree(FAIL_LABEL, tuple(Tree(w) for w in tokens)))
        else:
            out_trees.append(relabel(best[0], tokens))
        if args.stats:
            items, fraction = tag_chart_stats(chart, strip_word_layer(t))
            records.append(
                SentenceRecord(
                    i,
                    len(tokens),
                    items,
                    (t1 - t0) * 1000.0,
                    (t2 - t0) * 1000.0,
                    fraction,
                    "ok" if best is not None else "fail",
                )
            )
    write_treebank(out_trees, _require(args, "out", "--out"))
    if args.stats:
        write_stats_tsv_file(records, args.stats)
    return 0


# ---------------------------------------------------------------------------
# supertag
# ---------------------------------------------------------------------------


def _cmd_supertag_train(args) -> int:
    train = read_treebank(_require(args, "treebank", "--treebank"))
    rules = read_head_rules_file(_require(args, "head_rules", "--head-rules"))
    corpus = extract_spinal(train, rules)
    dev_path = _resolve(args, "dev")
    dev = (
        extract_spinal(read_treebank(dev_path), rules) if dev_path else None
    )
    encoder, training = _train_configs(args)
    model, _ = train_neural_supertagger(corpus, dev, encoder, training, log=_log)
    model.save(_require(args, "out", "--out"))
    return 0


def _cmd_supertag_predict(args) -> int:
    model = load_supertag_model(_require(args, "model", "--model"))
    trees = read_treebank(_require(args, "treebank", "--treebank"))
    k = int(_resolve(args, "k", 3))
    with open(_require(args, "out", "--out"), "w", encoding="utf-8") as f:
        for i, t in enumerate(trees):
            tokens, pos_tags = t.leaves(), pos_sequence(t)
            for pos, choices in enumerate(topk(model, tokens, pos_tags, k)):
                ranked = " ".join(
                    "%s:%.4f" % (name, lp) for name, lp in choices
                )
                f.write("%d\t%d\t%s\t%s\n" % (i, pos, tokens[pos], ranked))
    return 0


# ---------------------------------------------------------------------------
# eval / bench
# ---------------------------------------------------------------------------


def _cmd_eval_parseval(args) -> int:
    gold = read_treebank(_require(args, "gold", "--gold"))
    pred = read_treebank(_require(args, "pred", "--pred"))
    if len(gold) != len(pred):
        raise DataError(
            f"treebank sizes differ: {len(gold)} gold vs {len(pred)} predicted"
        )
    print(parseval(zip(gold, pred)))
    return 0


def _bench_run(name, grammar, bench_sentences, constraint_for, warmup):
    # the warmup pass repeats the first sentences, so map call order back
    # to sentence indexes
    n_warm = min(warmup, len(bench_sentences))

    def build(tokens):
        idx = build.calls
        build.calls += 1
        real = idx - n_warm if idx >= n_warm else idx
        return parse(grammar, tokens, predicate=constraint_for(real))

    build.calls = 0

    def extract(chart):
        best = chart.viterbi_tree()
        return None if best is None else debinarize(best)

    return benchmark(
        name, bench_sentences, build, extract, chart_stats, warmup=warmup
    )


def _cmd_bench(args) -> int:
    train = read_treebank(_require(args, "train", "--train"))
    test = read_treebank(_require(args, "test", "--test"))
    h = int(_resolve(args, "h", 2))
    warmup = int(_resolve(args, "warmup", 10))
    grammar = extract_pcfg(
        [binarize(t, h=h) for t in train], pos_as_terminals=True
    )
    stripped = [strip_word_layer(t) for t in test]
    bench_sentences = [
        BenchSentence(i, tuple(t.leaves()), t, t)
        for i, t in enumerate(stripped)
    ]
    mode = _resolve(args, "mode", "gold")
    if mode == "gold":
        filters = [pcfg_filter(gold_constraints(t)) for t in stripped]
    elif mode == "tagger":
        model = load_boundary_model(_require(args, "model", "--model"))
        theta = float(_resolve(args, "theta", 0.9))
        predicted = predict_corpus(
            model, [(t.leaves(), pos_sequence(t)) for t in test], theta
        )
        filters = [pcfg_filter(c) for c in predicted]
    elif mode == "none":
        filters = [allow_all for _ in stripped]
    else:
        raise DataError(f"unknown bench mode {mode!r}")
    run = _bench_run(mode, grammar, bench_sentences, lambda i: filters[i], warmup)
    baseline = None
    if mode != "none" and not args.no_baseline:
        baseline = _bench_run(
            "none", grammar, bench_sentences, lambda i: allow_all, warmup
        )
    print(eval_report(run, baseline))
    if args.stats:
        write_stats_tsv_file(run.records, args.stats)
    return 0


# ---------------------------------------------------------------------------
# wiring
# ---------------------------------------------------------------------------


def _add_train_flags(p) -> None:
    p.add_argument("--dev")
    p.add_argument("--epochs", type=int)
    p.add_argument("--lr", type=float)
    p.add_argument("--hidden", type=int)
    p.add_argument("--layers", type=int)
    p.add_argument("--word-dim", dest="word_dim", type=int)
    p.add_argument("--pos-dim", dest="pos_dim", type=int)


def build_parser() -> _Parser:
    root = _Parser(prog="chartprune", description=__doc__)
    root.add_argument("--config", help="TOML config file")
    root.add_argument("--seed", type=int, help="seed for all randomness")
    sub = root.add_subparsers(dest="command", parser_class=_Parser)

    tb = sub.add_parser("treebank").add_subparsers(
        dest="subcommand", parser_class=_Parser
    )
    p = tb.add_parser("binarize")
    p.add_argument("--treebank")
    p.add_argument("--out")
    p.add_argument("--h", type=int)
    p.add_argument("--undo", action="store_true")
    p.set_defaults(func=_cmd_treebank_binarize, _path=["treebank", "binarize"])
    p = tb.add_parser("extract-pcfg")
    p.add_argument("--treebank")
    p.add_argument("--out")
    p.add_argument("--h", type=int)
    p.add_argument("--pos-as-terminals", action="store_true")
    p.set_defaults(
        func=_cmd_treebank_extract_pcfg, _path=["treebank", "extract-pcfg"]
    )

    cs = sub.add_parser("constraints").add_subparsers(
        dest="subcommand", parser_class=_Parser
    )
    p = cs.add_parser("gold")
    p.add_argument("--treebank")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_constraints_gold, _path=["constraints", "gold"])
    p = cs.add_parser("eval")
    p.add_argument("--gold")
    p.add_argument("--pred")
    p.set_defaults(func=_cmd_constraints_eval, _path=["constraints", "eval"])

    tg = sub.add_parser("tagger").add_subparsers(
        dest="subcommand", parser_class=_Parser
    )
    p = tg.add_parser("train")
    p.add_argument("--treebank")
    p.add_argument("--out")
    _add_train_flags(p)
    p.set_defaults(func=_cmd_tagger_train, _path=["tagger", "train"])
    p = tg.add_parser("predict")
    p.add_argument("--model")
    p.add_argument("--treebank")
    p.add_argument("--out")
    p.add_argument("--theta", type=float)
    p.set_defaults(func=_cmd_tagger_predict, _path=["tagger", "predict"])

    pr = sub.add_parser("parse").add_subparsers(
        dest="subcommand", parser_class=_Parser
    )
    p = pr.add_parser("pcfg")
    p.add_argument("--grammar")
    p.add_argument("--treebank")
    p.add_argument("--input")
    p.add_argument("--pos-as-terminals", action="store_true")
    p.add_argument("--constraints")
    p.add_argument("--out")
    p.add_argument("--stats")
    p.set_defaults(func=_cmd_parse_pcfg, _path=["parse", "pcfg"])
    p = pr.add_parser("tag")
    p.add_argument("--train")
    p.add_argument("--head-rules", dest="head_rules")
    p.add_argument("--treebank")
    p.add_argument("--model", help="neural supertagger; default frequency model")
    p.add_argument("--k", type=int)
    p.add_argument("--mode", choices=["cc", "be"])
    p.add_argument("--constraints")
    p.add_argument("--out")
    p.add_argument("--stats")
    p.set_defaults(func=_cmd_parse_tag, _path=["parse", "tag"])

    st = sub.add_parser("supertag").add_subparsers(
        dest="subcommand", parser_class=_Parser
    )
    p = st.add_parser("train")
    p.add_argument("--treebank")
    p.add_argument("--head-rules", dest="head_rules")
    p.add_argument("--out")
    _add_train_flags(p)
    p.set_defaults(func=_cmd_supertag_train, _path=["supertag", "train"])
    p = st.add_parser("predict")
    p.add_argument("--model")
    p.add_argument("--treebank")
    p.add_argument("--k", type=int)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_supertag_predict, _path=["supertag", "predict"])

    ev = sub.add_parser("eval").add_subparsers(
        dest="subcommand", parser_class=_Parser
    )
    p = ev.add_parser("parseval")
    p.add_argument("--gold")
    p.add_argument("--pred")
    p.set_defaults(func=_cmd_eval_parseval, _path=["eval", "parseval"])

    p = sub.add_parser("bench")
    p.add_argument("--train")
    p.add_argument("--test")
    p.add_argument("--h", type=int)
    p.add_argument("--mode", choices=["gold", "tagger", "none"])
    p.add_argument("--model")
    p.add_argument("--theta", type=float)
    p.add_argument("--warmup", type=int)
    p.add_argument("--stats")
    p.add_argument("--no-baseline", action="store_true")
    p.set_defaults(func=_cmd_bench, _path=["bench"])

    return root


def main(argv: list[str] | None = None) -> int:
    root = build_parser()
    args = root.parse_args(argv)
    if not hasattr(args, "func"):
        root.error("a subcommand is required")
    args._parser = root
    args._cfg = _config_section(args.config, args._path)
    _seed_everything(args.seed)
    try:
        return args.func(args)
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
