"""Benchmark orchestration: timed per-sentence runs, stats TSVs and the
corpus report.

Chart construction is timed separately from tree extraction, so the headline
time is the chart phase alone.  A warmup pass (default 10 sentences) runs
before measurement and is not recorded.  Speedups compare mean chart time
over the sentences parsed by both runs.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, Iterable

from .errors import DataError
from .evalmetrics import ParsevalScores, parseval
from .trees import Tree

REPORT_CONVENTIONS = """\
# PARSEVAL: labeled brackets on trees with the word layer stripped; every
# internal node including the root counts one bracket; duplicates count
# with multiplicity.  Headline scores penalize parse failures (their gold
# brackets stay in the recall denominator); parsed-only scores are listed
# alongside.  time_ms is chart construction only; extraction is timed
# separately.  Speedups are computed over the sentences both runs parsed.
"""


@dataclass(frozen=True)
class BenchSentence:
    sent_id: int
    tokens: tuple[str, ...]
    gold_eval: Tree  # compared against the extracted tree
    gold_stats: Tree  # its spans define gold-consistent chart items


@dataclass(frozen=True)
class SentenceRecord:
    sent_id: int
    n: int
    items: int
    time_ms: float  # chart construction
    total_ms: float  # chart construction + extraction
    gold_fraction: float
    status: str  # "ok" or "fail"


@dataclass(frozen=True)
class RunResult:
    name: str
    records: tuple[SentenceRecord, ...]
    scores: ParsevalScores  # failures penalized
    scores_parsed: ParsevalScores | None  # parsed sentences only

    @property
    def parsed_ids(self) -> frozenset[int]:
        return frozenset(r.sent_id for r in self.records if r.status == "ok")


def benchmark(
    name: str,
    sentences: Iterable[BenchSentence],
    build: Callable,
    extract: Callable,
    stats: Callable,
    warmup: int = 10,
) -> RunResult:
    """Run build/extract/stats over the corpus and collect records.

    build(tokens) -> chart (timed); extract(chart) -> Tree or None (timed);
    stats(chart, gold_stats) -> (item count, gold fraction).
    """
    sentences = list(sentences)
    for s in sentences[:warmup]:
        extract(build(list(s.tokens)))
    records = []
    pairs = []
    pairs_parsed = []
    for s in sentences:
        t0 = time.perf_counter()
        chart = build(list(s.tokens))
        t1 = time.perf_counter()
        pred = extract(chart)
        t2 = time.perf_counter()
        items, fraction = stats(chart, s.gold_stats)
        records.append(
            SentenceRecord(
                s.sent_id,
                len(s.tokens),
                items,
                (t1 - t0) * 1000.0,
                (t2 - t0) * 1000.0,
                fraction,
                "ok" if pred is not None else "fail",
            )
        )
        pairs.append((s.gold_eval, pred))
        if pred is not None:
            pairs_parsed.append((s.gold_eval, pred))
    return RunResult(
        name,
        tuple(records),
        parseval(pairs),
        parseval(pairs_parsed) if pairs_parsed else None,
    )


@dataclass(frozen=True)
class EvalReport:
    name: str
    precision: float
    recall: float
    f1: float
    precision_parsed: float | None
    recall_parsed: float | None
    f1_parsed: float | None
    coverage: float
    mean_chart_ms: float
    mean_total_ms: float
    mean_items: float
    mean_gold_fraction: float
    speedup: float | None  # None when no baseline was given
    baseline: str | None

    def __str__(self) -> str:
        lines = [REPORT_CONVENTIONS, f"run: {self.name}"]
        lines.append(
            "f-score %.2f (P %.2f / R %.2f), failures penalized"
            % (100 * self.f1, 100 * self.precision, 100 * self.recall)
        )
        if self.f1_parsed is not None:
            lines.append(
                "f-score %.2f (P %.2f / R %.2f), parsed only"
                % (
                    100 * self.f1_parsed,
                    100 * self.precision_parsed,
                    100 * self.recall_parsed,
                )
            )
        lines.append("coverage %.1f%%" % (100 * self.coverage))
        lines.append(
            "mean chart time %.2f ms, mean total %.2f ms"
            % (self.mean_chart_ms, self.mean_total_ms)
        )
        lines.append(
            "mean items %.1f, mean %% gold %.1f"
            % (self.mean_items, 100 * self.mean_gold_fraction)
        )
        if self.speedup is not None:
            lines.append(
                "speedup %.1fx vs %s (%s)"
                % (self.speedup, self.baseline, "chart time, parsed by both")
            )
        return "\n".join(lines)


def eval_report(run: RunResult, baseline: RunResult | None = None) -> EvalReport:
    records = run.records
    if not records:
        raise DataError("benchmark produced no records")
    n = len(records)
    speedup = None
    if baseline is not None:
        shared = run.parsed_ids & baseline.parsed_ids
        if not shared:
            raise DataError(
                f"no sentence parsed by both {run.name!r} and {baseline.name!r}"
            )
        mine = _mean(
            [r.time_ms for r in records if r.sent_id in shared]
        )
        theirs = _mean(
            [r.time_ms for r in baseline.records if r.sent_id in shared]
        )
        speedup = theirs / mine if mine > 0 else float("inf")
    parsed = run.scores_parsed
    return EvalReport(
        run.name,
        run.scores.precision,
        run.scores.recall,
        run.scores.f1,
        parsed.precision if parsed else None,
        parsed.recall if parsed else None,
        parsed.f1 if parsed else None,
        sum(r.status == "ok" for r in records) / n,
        _mean([r.time_ms for r in records]),
        _mean([r.total_ms for r in records]),
        _mean([r.items for r in records]),
        _mean([r.gold_fraction for r in records]),
        speedup,
        baseline.name if baseline is not None else None,
    )


def _mean(xs) -> float:
    return sum(xs) / len(xs) if xs else 0.0


STATS_COLUMNS = ("sent_id", "n", "items", "time_ms", "gold_fraction", "status")


def write_stats_tsv(records: Iterable[SentenceRecord]) -> str:
    lines = ["\t".join(STATS_COLUMNS) + "\n"]
    for r in sorted(records, key=lambda r: r.sent_id):
        lines.append(
            "%d\t%d\t%d\t%.3f\t%.4f\t%s\n"
            % (r.sent_id, r.n, r.items, r.time_ms, r.gold_fraction, r.status)
        )
    return "".join(lines)


def write_stats_tsv_file(records: Iterable[SentenceRecord], path: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(write_stats_tsv(records))
