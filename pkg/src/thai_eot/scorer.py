"""Scorer contract and implementations.

A scorer maps a text context to p_end in [0,1], the probability that the
turn is complete at the context's final boundary. Three flavors:

* the trainable n-gram reference scorer (see :mod:`thai_eot.ngram`),
* a replay scorer that serves scores recorded in a scores.jsonl file,
* a remote scorer speaking the wire protocol to an out-of-process adapter.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Protocol, runtime_checkable

from .corpus import LabeledExample
from .ngram import NgramModel
from .wire import DEFAULT_TIMEOUT_S, WireClient


@runtime_checkable
class Scorer(Protocol):
    name: str

    def score(self, context: str) -> float: ...


@dataclass
class ScoreRecord:
    example_id: str
    label: str
    p_end: float
    scorer: str

    def to_dict(self) -> dict:
        return {
            "example_id": self.example_id,
            "label": self.label,
            "p_end": self.p_end,
            "scorer": self.scorer,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ScoreRecord":
        return cls(d["example_id"], d["label"], float(d["p_end"]), d.get("scorer", ""))


class NgramScorer:
    """Adapter giving an NgramModel the scorer face."""

    def __init__(self, model: NgramModel):
        self.model = model
        self.name = model.name

    def score(self, context: str) -> float:
        return self.model.score(context)


class ReplayScorer:
    """Serves p_end values recorded offline in a scores.jsonl file.

    Lookup is by example id when scoring a dataset, with a text-keyed
    fallback so the engine can use replay scorers on raw contexts.
    """

    def __init__(self, records: list[ScoreRecord], texts: dict[str, str] | None = None):
        self.records = records
        self.by_id = {r.example_id: r for r in records}
        self.name = records[0].scorer if records else "replay"
        self._by_text: dict[str, float] = {}
        if texts:
            for ex_id, text in texts.items():
                if ex_id in self.by_id:
                    self._by_text[text] = self.by_id[ex_id].p_end

    @classmethod
    def load(cls, path: str | Path, dataset: list[LabeledExample] | None = None):
        records = read_scores(path)
        texts = {ex.example_id: ex.text for ex in dataset} if dataset else None
        return cls(records, texts)

    def score(self, context: str) -> float:
        if context not in self._by_text:
            raise KeyError(f"replay file has no score for this context: {context!r}")
        return self._by_text[context]

    def score_example(self, example: LabeledExample) -> float:
        rec = self.by_id.get(example.example_id)
        if rec is None:
            raise KeyError(f"replay file has no score for example {example.example_id}")
        return rec.p_end


class RemoteScorer:
    """Wire-protocol client scorer; see :mod:`thai_eot.wire` for the frames."""

    def __init__(self, addr: str, timeout_s: float = DEFAULT_TIMEOUT_S):
        self._client = WireClient(addr, timeout_s=timeout_s)
        self.name = self._client.server_name

    def score(self, context: str) -> float:
        return self._client.score(context)

    def close(self) -> None:
        self._client.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def remote_score(addr: str, context: str, timeout_s: float = DEFAULT_TIMEOUT_S) -> float:
    """One-shot convenience wrapper: connect, handshake, score, disconnect."""
    with RemoteScorer(addr, timeout_s=timeout_s) as scorer:
        return scorer.score(context)


def score_dataset(scorer, examples: list[LabeledExample]) -> list[ScoreRecord]:
    """Score every example, preserving order; aborts naming the bad example."""
    if not examples:
        raise ValueError("no examples to score")
    out: list[ScoreRecord] = []
    score_example = getattr(scorer, "score_example", None)
    for ex in examples:
        try:
            p_end = score_example(ex) if score_example else scorer.score(ex.text)
        except Exception as exc:
            raise RuntimeError(f"scorer failed on example {ex.example_id}: {exc}") from exc
        out.append(ScoreRecord(ex.example_id, ex.label, float(p_end), scorer.name))
    return out


def write_scores(records: Iterable[ScoreRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec.to_dict(), ensure_ascii=False) + "\n")


def read_scores(path: str | Path) -> list[ScoreRecord]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(ScoreRecord.from_dict(json.loads(line)))
    return out
