"""Classification metrics, threshold-sensitivity reporting, latency
benchmarking, and accuracy-latency trade-off output.

Positive class is fixed to End. All zero-denominator rates are defined as 0
(never NaN). Latency percentiles use the nearest-rank rule on the raw
recorded durations.
"""
from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

from . import kernels
from .scorer import ScoreRecord


@dataclass
class Metrics:
    threshold: float
    tp: int
    fp: int
    tn: int
    fn: int
    precision: float
    recall: float
    f1: float
    accuracy: float

    def to_dict(self) -> dict:
        return {
            "threshold": self.threshold,
            "tp": self.tp,
            "fp": self.fp,
            "tn": self.tn,
            "fn": self.fn,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "accuracy": self.accuracy,
        }


@dataclass
class LatencyStats:
    n_samples: int
    mean_s: float
    p50_s: float
    p95_s: float
    max_s: float

    def to_dict(self) -> dict:
        return {
            "n_samples": self.n_samples,
            "mean_s": self.mean_s,
            "p50_s": self.p50_s,
            "p95_s": self.p95_s,
            "max_s": self.max_s,
        }


@dataclass
class SensitivityRow:
    name: str
    tau_star: float
    at_tau_star: Metrics
    at_half: Metrics


def _safe_div(num: float, den: float) -> float:
    return num / den if den else 0.0


def metrics_from_counts(tp: int, fp: int, tn: int, fn: int, threshold: float) -> Metrics:
    precision = _safe_div(tp, tp + fp)
    recall = _safe_div(tp, tp + fn)
    f1 = _safe_div(2 * precision * recall, precision + recall)
    accuracy = _safe_div(tp + tn, tp + fp + tn + fn)
    return Metrics(threshold, tp, fp, tn, fn, precision, recall, f1, accuracy)


def compute_metrics(records: list[ScoreRecord], tau: float) -> Metrics:
    """Confusion counts and derived rates at the rule p_end >= tau."""
    if not records:
        raise ValueError("no score records")
    scores = [r.p_end for r in records]
    labels = [1 if r.label == "End" else 0 for r in records]
    tp, fp, tn, fn = kernels.confusion_counts(scores, labels, tau)
    return metrics_from_counts(tp, fp, tn, fn, tau)


def sensitivity_report(
    records: list[ScoreRecord], tau_star: float, name: str | None = None
) -> SensitivityRow:
    """Calibrated vs fixed-0.5 operating points on the same records.

    tau_star must come from a different split (validation) than the records
    it is applied to (test); this function cannot check that, the pipeline
    enforces it by construction.
    """
    scorer_name = name or (records[0].scorer if records else "scorer")
    return SensitivityRow(
        name=scorer_name,
        tau_star=tau_star,
        at_tau_star=compute_metrics(records, tau_star),
        at_half=compute_metrics(records, 0.5),
    )


def render_sensitivity(rows: Sequence[SensitivityRow]) -> str:
    """Markdown table: calibrated (val-optimized) vs uncalibrated (0.5)."""
    lines = [
        "| Model | τ* | F1 | Acc | Prec | Rec | F1 (0.5) | Acc (0.5) | Prec (0.5) | Rec (0.5) |",
        "|---|---|---|---|---|---|---|---|---|---|",
    ]
    for row in rows:
        a, b = row.at_tau_star, row.at_half
        lines.append(
            f"| {row.name} | {row.tau_star:.3g} "
            f"| {a.f1:.3f} | {a.accuracy:.3f} | {a.precision:.3f} | {a.recall:.3f} "
            f"| {b.f1:.3f} | {b.accuracy:.3f} | {b.precision:.3f} | {b.recall:.3f} |"
        )
    return "\n".join(lines) + "\n"


def nearest_rank(sorted_values: Sequence[float], pct: float) -> float:
    """Nearest-rank percentile: the ceil(p/100 * n)-th smallest value."""
    n = len(sorted_values)
    if n == 0:
        raise ValueError("empty sample")
    rank = max(1, math.ceil(pct / 100.0 * n))
    return sorted_values[rank - 1]


def latency_from_durations(durations_s: Sequence[float]) -> LatencyStats:
    ordered = sorted(durations_s)
    return LatencyStats(
        n_samples=len(ordered),
        mean_s=sum(ordered) / len(ordered),
        p50_s=nearest_rank(ordered, 50),
        p95_s=nearest_rank(ordered, 95),
        max_s=ordered[-1],
    )


def bench_latency(
    scorer,
    samples: Sequence[str],
    n: int = 100,
    warmup: int = 5,
    clock: Callable[[], float] = time.perf_counter,
) -> LatencyStats:
    """Per-call wall-clock latency of scorer.score, batch size one.

    Runs `warmup` unrecorded calls, then n recorded calls round-robin over
    the samples. Timing includes grapheme segmentation, i.e. the full cost a
    live session would pay per decision.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not samples:
        raise ValueError("no samples to bench")
    for i in range(warmup):
        scorer.score(samples[i % len(samples)])
    durations = []
    for i in range(n):
        text = samples[i % len(samples)]
        t0 = clock()
        scorer.score(text)
        durations.append(clock() - t0)
    return latency_from_durations(durations)


def tradeoff_report(
    rows: Sequence[tuple[str, Metrics, LatencyStats, str]], path: str | Path
) -> None:
    """Plot-ready accuracy-latency CSV, sorted by mean latency ascending."""
    if not rows:
        raise ValueError("no rows for trade-off report")
    ordered = sorted(rows, key=lambda r: r[2].mean_s)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("name,f1,accuracy,mean_latency_s,size_note\n")
        for name, metrics, latency, size_note in ordered:
            fh.write(
                f"{name},{metrics.f1!r},{metrics.accuracy!r},{latency.mean_s!r},{size_note}\n"
            )


def write_metrics_json(metrics: Metrics, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(metrics.to_dict(), fh, indent=2)
        fh.write("\n")


def write_latency_json(stats: LatencyStats, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(stats.to_dict(), fh, indent=2)
        fh.write("\n")
