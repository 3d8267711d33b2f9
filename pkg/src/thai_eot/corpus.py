"""Corpus preparation: filter raw subtitle lines, generate balanced
End/NotEnd examples by mid-cut truncation, and assign leakage-free splits.

Splits are assigned at the sentence level before example generation so a
NotEnd prefix can never land in a different split than its End parent.
"""
from __future__ import annotations

import json
import random
import subprocess
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from .text import grapheme_len, has_thai, segment

LABEL_END = "End"
LABEL_NOT_END = "NotEnd"
SPLITS = ("Train", "Val", "Test")

REASON_NO_THAI = "NoThai"
REASON_TOO_SHORT = "TooShort"
REASON_TOO_LONG = "TooLong"
REASON_FILTERED = "Filtered"


@dataclass
class SentenceRecord:
    """One cleaned candidate sentence (a positive "end" unit)."""

    id: str
    text: str
    source: str
    accepted: bool
    reason: str | None = None

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "text": self.text,
            "source": self.source,
            "accepted": self.accepted,
            "reason": self.reason,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SentenceRecord":
        return cls(
            id=d["id"],
            text=d["text"],
            source=d.get("source", ""),
            accepted=bool(d["accepted"]),
            reason=d.get("reason"),
        )


@dataclass
class LabeledExample:
    """A (text, label, split) dataset row derived from one sentence."""

    example_id: str
    sentence_id: str
    text: str
    label: str
    split: str

    def to_dict(self) -> dict:
        return {
            "example_id": self.example_id,
            "sentence_id": self.sentence_id,
            "text": self.text,
            "label": self.label,
            "split": self.split,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LabeledExample":
        return cls(d["example_id"], d["sentence_id"], d["text"], d["label"], d["split"])


@dataclass
class SplitConfig:
    ratios: tuple[float, float, float] = (0.8, 0.1, 0.1)
    seed: int = 0

    def validate(self) -> None:
        if len(self.ratios) != len(SPLITS):
            raise ValueError("need one ratio per split")
        if any(r < 0 for r in self.ratios):
            raise ValueError("split ratios must be non-negative")
        if abs(sum(self.ratios) - 1.0) > 1e-9:
            raise ValueError(f"split ratios must sum to 1, got {sum(self.ratios)}")


def filter_sentences(
    lines: Iterable[str],
    min_len: int = 3,
    max_len: int = 200,
    source: str = "<memory>",
) -> Iterator[SentenceRecord]:
    """Turn raw lines into SentenceRecords, one per line.

    A line is accepted iff it contains a Thai-block code point and its
    grapheme length lies within [min_len, max_len]. Rejected lines keep a
    reason code so corpus statistics stay auditable.
    """
    if min_len < 1:
        raise ValueError("min_len must be >= 1")
    if max_len < min_len:
        raise ValueError("max_len must be >= min_len")
    for lineno, raw in enumerate(lines, start=1):
        text = raw.strip()
        rec = SentenceRecord(
            id=f"s{lineno:06d}",
            text=text,
            source=f"{source}:{lineno}",
            accepted=False,
        )
        if not has_thai(text):
            rec.reason = REASON_NO_THAI
        else:
            length = grapheme_len(text)
            if length < min_len:
                rec.reason = REASON_TOO_SHORT
            elif length > max_len:
                rec.reason = REASON_TOO_LONG
            else:
                rec.accepted = True
        yield rec


def generate_examples(
    rec: SentenceRecord, min_cut_len: int = 6, split: str = "Train"
) -> list[LabeledExample]:
    """Emit the End example and, when long enough, its mid-cut NotEnd prefix.

    The cut keeps the first floor(L/2) grapheme clusters, so it can never
    split a combining mark off its base consonant.
    """
    if not rec.accepted:
        raise ValueError(f"cannot generate examples from rejected sentence {rec.id}")
    out = [
        LabeledExample(f"{rec.id}-end", rec.id, rec.text, LABEL_END, split),
    ]
    clusters = segment(rec.text)
    if len(clusters) >= min_cut_len:
        prefix = "".join(clusters[: len(clusters) // 2])
        out.append(LabeledExample(f"{rec.id}-cut", rec.id, prefix, LABEL_NOT_END, split))
    return out


def largest_remainder_counts(n: int, ratios: Iterable[float]) -> list[int]:
    """Apportion n items to ratios, rounding by largest remainder.

    Ties go to the earlier bucket, so results are deterministic.
    """
    quotas = [n * r for r in ratios]
    counts = [int(q) for q in quotas]
    remainders = [q - c for q, c in zip(quotas, counts)]
    short = n - sum(counts)
    order = sorted(range(len(ratios)), key=lambda i: (-remainders[i], i))
    for i in order[:short]:
        counts[i] += 1
    return counts


def split_dataset(
    records: Iterable[SentenceRecord], cfg: SplitConfig
) -> dict[str, str]:
    """Assign each accepted sentence id to Train/Val/Test, deterministically."""
    cfg.validate()
    ids = [r.id for r in records if r.accepted]
    if not ids:
        raise ValueError("no accepted sentences to split")
    counts = largest_remainder_counts(len(ids), cfg.ratios)
    shuffled = list(ids)
    random.Random(cfg.seed).shuffle(shuffled)
    assignment: dict[str, str] = {}
    start = 0
    for split, count in zip(SPLITS, counts):
        for sid in shuffled[start : start + count]:
            assignment[sid] = split
        start += count
    return assignment


def run_filter_cmd(records: list[SentenceRecord], cmd: str) -> list[SentenceRecord]:
    """Pipe accepted records through an external JSONL->JSONL filter command.

    This is the plug point where an LLM-based noise filter or sentence
    segmenter would sit; the default pipeline skips it entirely. Records the
    command drops (or returns with accepted=false) are marked Filtered.
    """
    payload = "".join(
        json.dumps(r.to_dict(), ensure_ascii=False) + "\n" for r in records if r.accepted
    )
    proc = subprocess.run(
        cmd, shell=True, input=payload.encode("utf-8"), capture_output=True
    )
    if proc.returncode != 0:
        raise RuntimeError(
            f"filter command failed with exit code {proc.returncode}: "
            f"{proc.stderr.decode('utf-8', 'replace').strip()}"
        )
    returned: dict[str, SentenceRecord] = {}
    for line in proc.stdout.decode("utf-8").splitlines():
        line = line.strip()
        if not line:
            continue
        rec = SentenceRecord.from_dict(json.loads(line))
        returned[rec.id] = rec
    out: list[SentenceRecord] = []
    for rec in records:
        if not rec.accepted:
            out.append(rec)
            continue
        kept = returned.get(rec.id)
        if kept is None or not kept.accepted:
            out.append(
                SentenceRecord(rec.id, rec.text, rec.source, False, REASON_FILTERED)
            )
        else:
            out.append(kept)
    return out


@dataclass
class CorpusStats:
    lines: int = 0
    accepted: int = 0
    rejected: Counter = field(default_factory=Counter)
    examples: Counter = field(default_factory=Counter)

    def to_dict(self) -> dict:
        by_split: dict[str, dict[str, int]] = {}
        for split in SPLITS:
            by_split[split] = {
                LABEL_END: self.examples.get((split, LABEL_END), 0),
                LABEL_NOT_END: self.examples.get((split, LABEL_NOT_END), 0),
            }
        return {
            "lines": self.lines,
            "accepted": self.accepted,
            "rejected": dict(sorted(self.rejected.items())),
            "examples": by_split,
        }


def prepare(
    input_path: str | Path,
    out_dir: str | Path,
    seed: int = 0,
    min_len: int = 3,
    max_len: int = 200,
    min_cut_len: int = 6,
    filter_cmd: str | None = None,
    ratios: tuple[float, float, float] = (0.8, 0.1, 0.1),
) -> CorpusStats:
    """Run the full corpus pipeline and write dataset.jsonl + corpus_stats.json.

    Re-running with identical inputs and seed produces byte-identical output.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(input_path, encoding="utf-8") as fh:
        records = list(
            filter_sentences(fh, min_len=min_len, max_len=max_len, source=str(input_path))
        )
    if filter_cmd:
        records = run_filter_cmd(records, filter_cmd)

    stats = CorpusStats(lines=len(records))
    for rec in records:
        if rec.accepted:
            stats.accepted += 1
        else:
            stats.rejected[rec.reason or "Unknown"] += 1

    assignment = split_dataset(records, SplitConfig(ratios=ratios, seed=seed))
    with open(out_dir / "dataset.jsonl", "w", encoding="utf-8") as fh:
        for rec in records:
            if not rec.accepted:
                continue
            for ex in generate_examples(rec, min_cut_len, assignment[rec.id]):
                stats.examples[(ex.split, ex.label)] += 1
                fh.write(json.dumps(ex.to_dict(), ensure_ascii=False) + "\n")
    with open(out_dir / "corpus_stats.json", "w", encoding="utf-8") as fh:
        json.dump(stats.to_dict(), fh, ensure_ascii=False, indent=2)
        fh.write("\n")
    return stats


def read_dataset(path: str | Path) -> list[LabeledExample]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(LabeledExample.from_dict(json.loads(line)))
    return out
