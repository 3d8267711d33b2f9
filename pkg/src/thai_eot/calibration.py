"""ROC construction, AUC, and validation-optimal threshold selection.

The decision rule everywhere is ``p_end >= tau`` predicts End. Thresholds
swept are exactly the unique observed scores (descending), preceded by a
+inf sentinel so the curve starts at (FPR, TPR) = (0, 0) and ends at (1, 1).
The operating point maximizes Youden's J = TPR + TNR - 1; ties break toward
the lowest threshold, which favors recall.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import kernels
from .corpus import LABEL_END
from .scorer import ScoreRecord


class DegenerateLabels(ValueError):
    """The score set has only one class; no ROC curve exists."""


@dataclass
class RocCurve:
    thresholds: np.ndarray  # descending; [0] is +inf
    tpr: np.ndarray
    fpr: np.ndarray
    n_pos: int
    n_neg: int

    @property
    def points(self) -> list[tuple[float, float, float]]:
        return [
            (float(t), float(tp), float(fp))
            for t, tp, fp in zip(self.thresholds, self.tpr, self.fpr)
        ]


@dataclass
class CalibrationResult:
    tau_star: float
    j_star: float
    auc: float
    n_pos: int
    n_neg: int

    def to_dict(self) -> dict:
        return {
            "tau_star": self.tau_star,
            "j_star": self.j_star,
            "auc": self.auc,
            "n_pos": self.n_pos,
            "n_neg": self.n_neg,
        }


def _scores_labels(records: list[ScoreRecord]) -> tuple[np.ndarray, np.ndarray]:
    scores = np.array([r.p_end for r in records], dtype=np.float64)
    labels = np.array([1 if r.label == LABEL_END else 0 for r in records], dtype=np.int8)
    return scores, labels


def roc_curve(records: list[ScoreRecord]) -> RocCurve:
    """Sweep every unique score as a threshold; rates are exact counts."""
    if not records:
        raise DegenerateLabels("no score records")
    scores, labels = _scores_labels(records)
    n_pos = int(labels.sum())
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DegenerateLabels(
            f"need both classes, got {n_pos} positives / {n_neg} negatives"
        )
    thr, tps, fps = kernels.roc_accumulate(scores, labels)
    thresholds = np.concatenate([[math.inf], thr])
    tpr = np.concatenate([[0.0], tps / n_pos])
    fpr = np.concatenate([[0.0], fps / n_neg])
    return RocCurve(thresholds, tpr, fpr, n_pos, n_neg)


def auc(curve: RocCurve) -> float:
    """Trapezoidal area under the (FPR, TPR) curve."""
    return float(np.trapezoid(curve.tpr, curve.fpr))


def concordance_auc(records: list[ScoreRecord]) -> float:
    """Pairwise concordance AUC (ties 1/2); independent cross-check of auc()."""
    scores, labels = _scores_labels(records)
    return kernels.concordance_auc(scores[labels == 1], scores[labels == 0])


def youden_threshold(curve: RocCurve) -> CalibrationResult:
    """Pick the swept threshold maximizing J = TPR - FPR (lowest tau on ties)."""
    j = curve.tpr - curve.fpr
    j_star = float(j.max())
    # thresholds are descending, so the last maximizer is the lowest threshold
    idx = int(np.nonzero(j == j_star)[0][-1])
    return CalibrationResult(
        tau_star=float(curve.thresholds[idx]),
        j_star=j_star,
        auc=auc(curve),
        n_pos=curve.n_pos,
        n_neg=curve.n_neg,
    )


def calibrate(records: list[ScoreRecord]) -> tuple[RocCurve, CalibrationResult]:
    curve = roc_curve(records)
    result = youden_threshold(curve)
    trapezoid = result.auc
    pairwise = concordance_auc(records)
    if abs(trapezoid - pairwise) > 1e-9:
        raise AssertionError(
            f"AUC cross-check failed: trapezoid={trapezoid!r} pairwise={pairwise!r}"
        )
    return curve, result


def write_roc_csv(curve: RocCurve, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("threshold,tpr,fpr\n")
        for t, tp, fp in curve.points:
            fh.write(f"{t!r},{tp!r},{fp!r}\n")


def write_calibration_json(result: CalibrationResult, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(result.to_dict(), fh, indent=2)
        fh.write("\n")


def read_calibration_json(path: str | Path) -> CalibrationResult:
    with open(path, encoding="utf-8") as fh:
        d = json.load(fh)
    return CalibrationResult(
        d["tau_star"], d["j_star"], d["auc"], d["n_pos"], d["n_neg"]
    )
