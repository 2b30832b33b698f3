"""Ranking comparison between predicted likelihoods and measured fractions.

The core metric is Wall's unweighted matching: order both value maps, take
the top m = ceil(f*N) of each at a block fraction f, and score the overlap
|top_pred & top_meas| / m.  A random permutation scores m/N in expectation,
which serves as the baseline.  Supporting tables report threshold accuracy
at the distribution's 0/1 boundaries and the mean measured likelihood per
predicted block.
"""

from __future__ import annotations

import math
import random
import statistics
from dataclasses import dataclass
from typing import Mapping, Sequence

BLOCKS: tuple[float, ...] = (0.01, 0.02, 0.05, 0.10, 0.20, 0.40, 0.80)

# Threshold rows mirror the two interesting boundaries: points predicted
# (almost) always executed, checked against measured fraction exactly 1.0,
# and points predicted (almost) never executed, against measured exactly 0.0.
ALWAYS_ROWS: tuple[tuple[str, float, bool], ...] = (
    ("= 1", 1.0, False), ("> 0.99", 0.99, True),
    ("> 0.98", 0.98, True), ("> 0.95", 0.95, True))
NEVER_ROWS: tuple[tuple[str, float, bool], ...] = (
    ("= 0", 0.0, False), ("< 0.01", 0.01, True),
    ("< 0.02", 0.02, True), ("< 0.05", 0.05, True))


class RankingPair:
    """Predicted and measured scores over one shared vertex set.

    Both rankings order by (score descending, vertex id ascending); the id
    tie-break keeps every derived metric deterministic.
    """

    def __init__(self, predicted: Mapping[int, float],
                 measured: Mapping[int, float]) -> None:
        if set(predicted) != set(measured):
            raise ValueError("predicted and measured cover different vertices")
        self.predicted = dict(predicted)
        self.measured = dict(measured)
        self.n = len(self.predicted)
        self.tie_break = "score desc, vertex id asc"
        self.predicted_order = sorted(
            self.predicted, key=lambda v: (-self.predicted[v], v))
        self.measured_order = sorted(
            self.measured, key=lambda v: (-self.measured[v], v))


@dataclass(frozen=True)
class BlockScore:
    fraction: float
    m: int
    matched: int
    score: float
    random_baseline: float


def wall_score(pair: RankingPair, fraction: float) -> BlockScore:
    """Top-block overlap score at one block fraction."""
    if pair.n == 0:
        raise ValueError("empty ranking")
    if not 0.0 < fraction <= 1.0:
        raise ValueError(f"block fraction must be in (0, 1], got {fraction}")
    m = math.ceil(fraction * pair.n)
    top_predicted = set(pair.predicted_order[:m])
    top_measured = set(pair.measured_order[:m])
    matched = len(top_predicted & top_measured)
    return BlockScore(fraction=fraction, m=m, matched=matched,
                      score=matched / m, random_baseline=m / pair.n)


@dataclass
class CorrelationReport:
    n: int
    blocks: list[BlockScore]
    plateau_predicted: int   # points with predicted likelihood exactly 1.0
    plateau_measured: int    # points with measured fraction exactly 1.0


def correlation_report(pair: RankingPair,
                       fractions: Sequence[float] = BLOCKS) -> CorrelationReport:
    """Wall scores at each block plus the 1.0-plateau sizes.

    A large plateau means many points share the top measured value, which
    caps how informative the small blocks can be.
    """
    blocks = [wall_score(pair, f) for f in fractions]
    return CorrelationReport(
        n=pair.n, blocks=blocks,
        plateau_predicted=sum(1 for v in pair.predicted.values() if v == 1.0),
        plateau_measured=sum(1 for v in pair.measured.values() if v == 1.0))


@dataclass(frozen=True)
class ThresholdRow:
    label: str
    count: int
    percent: float | None    # None when no vertex matches the predicate


@dataclass
class AccuracyTable:
    always: list[ThresholdRow]
    never: list[ThresholdRow]


def threshold_accuracy(predicted: Mapping[int, float],
                       measured: Mapping[int, float]) -> AccuracyTable:
    """How often extreme predictions are borne out by the measurements.

    For each "always" row, the percentage of vertices with predicted value
    in that band whose measured fraction is exactly 1.0; the "never" rows
    check measured 0.0.  Bands are nested, so the strict rows contain the
    exact ones.
    """
    if set(predicted) != set(measured):
        raise ValueError("predicted and measured cover different vertices")

    def rows(specs, above: bool, target: float) -> list[ThresholdRow]:
        out = []
        for label, bound, strict in specs:
            if strict:
                selected = [v for v, p in predicted.items()
                            if (p > bound if above else p < bound)]
            else:
                selected = [v for v, p in predicted.items() if p == bound]
            if not selected:
                out.append(ThresholdRow(label=label, count=0, percent=None))
                continue
            good = sum(1 for v in selected if measured[v] == target)
            out.append(ThresholdRow(label=label, count=len(selected),
                                    percent=100.0 * good / len(selected)))
        return out

    return AccuracyTable(always=rows(ALWAYS_ROWS, True, 1.0),
                         never=rows(NEVER_ROWS, False, 0.0))


@dataclass(frozen=True)
class BlockMeanRow:
    fraction: float
    m: int
    mean_measured: float


def block_likelihood_table(pair: RankingPair,
                           fractions: Sequence[float] = BLOCKS
                           ) -> list[BlockMeanRow]:
    """Mean measured fraction within each predicted top block.

    If prediction orders points well this is non-increasing from the 1%
    block down to the 80% block.
    """
    if pair.n == 0:
        raise ValueError("empty ranking")
    rows = []
    for f in fractions:
        m = math.ceil(f * pair.n)
        top = pair.predicted_order[:m]
        rows.append(BlockMeanRow(
            fraction=f, m=m,
            mean_measured=sum(pair.measured[v] for v in top) / m))
    return rows


@dataclass(frozen=True)
class ShuffleStats:
    fraction: float
    m: int
    mean: float
    std_error: float
    expected: float           # m / n


def shuffled_mean_scores(n: int, trials: int, seed: int,
                         fractions: Sequence[float] = BLOCKS
                         ) -> list[ShuffleStats]:
    """Monte-Carlo check of the random baseline.

    Scores a fixed identity ranking against independently shuffled rankings;
    the mean block score converges on m/n.
    """
    if n <= 0:
        raise ValueError("empty ranking")
    if trials < 2:
        raise ValueError("need at least 2 trials for a standard error")
    rng = random.Random(seed)
    ms = [math.ceil(f * n) for f in fractions]
    top_fixed = [set(range(m)) for m in ms]
    scores: list[list[float]] = [[] for _ in fractions]
    order = list(range(n))
    for _ in range(trials):
        rng.shuffle(order)
        for i, m in enumerate(ms):
            matched = sum(1 for v in order[:m] if v in top_fixed[i])
            scores[i].append(matched / m)
    out = []
    for i, f in enumerate(fractions):
        mean = statistics.fmean(scores[i])
        se = statistics.stdev(scores[i]) / math.sqrt(trials)
        out.append(ShuffleStats(fraction=f, m=ms[i], mean=mean,
                                std_error=se, expected=ms[i] / n))
    return out


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------

def _pct(value: float | None) -> str:
    return "n/a" if value is None else f"{value:.1f}"


def render_report_markdown(report: CorrelationReport,
                           table: AccuracyTable,
                           means: list[BlockMeanRow]) -> str:
    lines = [
        f"N = {report.n} program points; measured 1.0-plateau "
        f"{report.plateau_measured}, predicted {report.plateau_predicted}",
        "",
        "| block | m | matched | score | random |",
        "|------:|--:|--------:|------:|-------:|",
    ]
    for b in report.blocks:
        lines.append(f"| {b.fraction:.0%} | {b.m} | {b.matched} "
                     f"| {b.score:.3f} | {b.random_baseline:.3f} |")
    lines += ["", "| block | m | mean measured |", "|------:|--:|--------------:|"]
    for row in means:
        lines.append(f"| {row.fraction:.0%} | {row.m} | {row.mean_measured:.3f} |")
    lines += ["", "| predicted | points | % measured 1.0 |",
              "|----------:|-------:|---------------:|"]
    for row in table.always:
        lines.append(f"| {row.label} | {row.count} | {_pct(row.percent)} |")
    lines += ["", "| predicted | points | % measured 0.0 |",
              "|----------:|-------:|---------------:|"]
    for row in table.never:
        lines.append(f"| {row.label} | {row.count} | {_pct(row.percent)} |")
    return "\n".join(lines) + "\n"


def report_to_json(report: CorrelationReport, table: AccuracyTable,
                   means: list[BlockMeanRow]) -> dict:
    return {
        "n": report.n,
        "plateau_measured": report.plateau_measured,
        "plateau_predicted": report.plateau_predicted,
        "blocks": [{"fraction": b.fraction, "m": b.m, "matched": b.matched,
                    "score": b.score, "random_baseline": b.random_baseline}
                   for b in report.blocks],
        "block_means": [{"fraction": r.fraction, "m": r.m,
                         "mean_measured": r.mean_measured} for r in means],
        "always": [{"label": r.label, "count": r.count, "percent": r.percent}
                   for r in table.always],
        "never": [{"label": r.label, "count": r.count, "percent": r.percent}
                  for r in table.never],
    }
