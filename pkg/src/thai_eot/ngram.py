"""Character n-gram scorer: a deterministic, desk-scale stand-in for a
fine-tuned decoder LM.

It preserves the same interface the real thing exposes: the likelihood of a
terminal stop symbol given the recent context. Training accumulates counts
over grapheme clusters of complete sentences, each terminated by an EOT
sentinel; scoring returns the smoothed conditional probability of that
sentinel, backing off to the longest suffix context with nonzero raw count.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable

from .text import segment

EOT_SENTINEL = "<eot>"
MODEL_FORMAT = "thai-eot-ngram-v1"


class NgramModel:
    """Add-alpha smoothed character n-gram model over grapheme clusters.

    Immutable after training; safe for concurrent read-only scoring.
    """

    def __init__(
        self,
        order: int,
        alpha: float,
        vocab: set[str],
        counts: dict[tuple[str, ...], dict[str, int]],
    ):
        if order < 2:
            raise ValueError("order must be >= 2")
        if alpha <= 0:
            raise ValueError("alpha must be > 0")
        self.order = order
        self.alpha = alpha
        self.vocab = frozenset(vocab)
        self.counts = counts
        self._totals = {ctx: sum(c.values()) for ctx, c in counts.items()}

    @property
    def name(self) -> str:
        return f"ngram-k{self.order}"

    def score(self, context: str) -> float:
        """Smoothed P(EOT | longest known suffix of the context)."""
        units = segment(context)
        max_order = min(self.order - 1, len(units))
        alpha = self.alpha
        v = len(self.vocab)
        for length in range(max_order, -1, -1):
            ctx = tuple(units[len(units) - length :])
            total = self._totals.get(ctx)
            if total:
                eot = self.counts[ctx].get(EOT_SENTINEL, 0)
                return (eot + alpha) / (total + alpha * v)
        # empty-context counts always exist after training
        raise RuntimeError("model has no order-0 counts; was it trained?")

    # -- persistence -------------------------------------------------------

    def to_dict(self) -> dict:
        entries = []
        for ctx in sorted(self.counts):
            per_unit = self.counts[ctx]
            entries.append(
                {
                    "context": list(ctx),
                    "counts": {u: per_unit[u] for u in sorted(per_unit)},
                }
            )
        return {
            "format": MODEL_FORMAT,
            "order": self.order,
            "alpha": self.alpha,
            "vocab": sorted(self.vocab),
            "counts": entries,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "NgramModel":
        if d.get("format") != MODEL_FORMAT:
            raise ValueError(f"not an n-gram model dump: format={d.get('format')!r}")
        counts = {
            tuple(entry["context"]): dict(entry["counts"]) for entry in d["counts"]
        }
        return cls(d["order"], d["alpha"], set(d["vocab"]), counts)

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, ensure_ascii=False, indent=1)
            fh.write("\n")

    @classmethod
    def load(cls, path: str | Path) -> "NgramModel":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def train_ngram(
    train_end_texts: Iterable[str], k: int = 4, alpha: float = 0.1
) -> NgramModel:
    """Train on complete sentences, each terminated by the EOT sentinel.

    Counts are kept for every context order 0..k-1, which gives the scorer a
    backoff path all the way down to the unconditional EOT rate.
    """
    counts: dict[tuple[str, ...], dict[str, int]] = {}
    vocab: set[str] = {EOT_SENTINEL}
    n_texts = 0
    for text in train_end_texts:
        n_texts += 1
        units = segment(text) + [EOT_SENTINEL]
        vocab.update(units)
        for i, unit in enumerate(units):
            lo = max(0, i - (k - 1))
            for start in range(lo, i + 1):
                ctx = tuple(units[start:i])
                bucket = counts.setdefault(ctx, {})
                bucket[unit] = bucket.get(unit, 0) + 1
    if n_texts == 0:
        raise ValueError("training corpus is empty")
    return NgramModel(k, alpha, vocab, counts)
