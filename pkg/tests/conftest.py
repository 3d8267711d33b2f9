from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

import synth  # noqa: E402

from thai_eot import calibration as cal  # noqa: E402
from thai_eot import corpus, ngram  # noqa: E402
from thai_eot import scorer as scoring  # noqa: E402

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def synth_lines() -> list[str]:
    return synth.corpus_lines(2500, seed=42)


@pytest.fixture(scope="session")
def pipeline(tmp_path_factory, synth_lines):
    """Full prepare -> train -> score -> calibrate run on the synthetic corpus."""
    out = tmp_path_factory.mktemp("pipeline")
    raw = out / "raw.txt"
    raw.write_text("\n".join(synth_lines) + "\n", encoding="utf-8")
    stats = corpus.prepare(raw, out, seed=7)
    dataset = corpus.read_dataset(out / "dataset.jsonl")
    model = ngram.train_ngram(
        [e.text for e in dataset if e.split == "Train" and e.label == "End"],
        k=4,
        alpha=0.1,
    )
    sc = scoring.NgramScorer(model)
    val_scores = scoring.score_dataset(sc, [e for e in dataset if e.split == "Val"])
    test_scores = scoring.score_dataset(sc, [e for e in dataset if e.split == "Test"])
    curve, result = cal.calibrate(val_scores)
    return {
        "dir": out,
        "raw": raw,
        "stats": stats,
        "dataset": dataset,
        "model": model,
        "scorer": sc,
        "val_scores": val_scores,
        "test_scores": test_scores,
        "curve": curve,
        "calibration": result,
    }


@pytest.fixture(scope="session")
def golden_model() -> ngram.NgramModel:
    return ngram.NgramModel.load(DATA_DIR / "golden_model.json")
