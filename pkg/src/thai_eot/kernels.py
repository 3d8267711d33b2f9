"""Numeric kernels behind ROC construction, confusion counting, and AUC.

Two interchangeable backends:

* ``numba`` (default when importable): the loop kernels below compiled
  with ``@njit``.
* ``numpy``: vectorized equivalents, no compilation step.

Select with the environment variable ``EOT_KERNELS=numba|numpy`` (read at
import time) or programmatically via :func:`set_backend`. Both backends
produce identical results; ``benchmarks/bench_kernels.py`` compares their
throughput.
"""
from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAS_NUMBA = False


# ---------------------------------------------------------------------------
# loop kernels (numba-compilable, also valid pure Python)


def _confusion_loop(scores, labels, tau):
    tp = 0
    fp = 0
    tn = 0
    fn = 0
    for i in range(scores.shape[0]):
        pred = scores[i] >= tau
        if labels[i] == 1:
            if pred:
                tp += 1
            else:
                fn += 1
        else:
            if pred:
                fp += 1
            else:
                tn += 1
    return tp, fp, tn, fn


def _roc_accumulate_loop(sorted_scores, sorted_labels):
    # scores sorted descending; emit cumulative TP/FP at the last index of
    # each distinct score value
    n = sorted_scores.shape[0]
    thr = np.empty(n, dtype=np.float64)
    tps = np.empty(n, dtype=np.int64)
    fps = np.empty(n, dtype=np.int64)
    tp = 0
    fp = 0
    m = 0
    for i in range(n):
        if sorted_labels[i] == 1:
            tp += 1
        else:
            fp += 1
        if i == n - 1 or sorted_scores[i + 1] != sorted_scores[i]:
            thr[m] = sorted_scores[i]
            tps[m] = tp
            fps[m] = fp
            m += 1
    return thr[:m], tps[:m], fps[:m]


def _concordance_loop(pos, neg):
    # pairwise concordance with ties counting 1/2; O(P*N)
    c = 0.0
    for i in range(pos.shape[0]):
        for j in range(neg.shape[0]):
            if pos[i] > neg[j]:
                c += 1.0
            elif pos[i] == neg[j]:
                c += 0.5
    return c / (pos.shape[0] * neg.shape[0])


if HAS_NUMBA:
    _confusion_nb = njit(cache=True)(_confusion_loop)
    _roc_accumulate_nb = njit(cache=True)(_roc_accumulate_loop)
    _concordance_nb = njit(cache=True)(_concordance_loop)


# ---------------------------------------------------------------------------
# numpy backend


def _confusion_np(scores, labels, tau):
    pred = scores >= tau
    pos = labels == 1
    tp = int(np.count_nonzero(pred & pos))
    fp = int(np.count_nonzero(pred & ~pos))
    fn = int(np.count_nonzero(~pred & pos))
    tn = int(np.count_nonzero(~pred & ~pos))
    return tp, fp, tn, fn


def _roc_accumulate_np(sorted_scores, sorted_labels):
    n = sorted_scores.shape[0]
    ends = np.nonzero(np.diff(sorted_scores))[0]
    ends = np.concatenate([ends, np.array([n - 1])])
    tp_cum = np.cumsum(sorted_labels == 1)
    fp_cum = np.cumsum(sorted_labels != 1)
    return (
        sorted_scores[ends],
        tp_cum[ends].astype(np.int64),
        fp_cum[ends].astype(np.int64),
    )


def _concordance_np(pos, neg):
    # Mann-Whitney rank formulation with midranks for ties
    npos = pos.shape[0]
    nneg = neg.shape[0]
    allv = np.concatenate([pos, neg])
    _, inverse, counts = np.unique(allv, return_inverse=True, return_counts=True)
    csum = np.cumsum(counts).astype(np.float64)
    midrank = csum - (counts - 1) / 2.0
    ranks = midrank[inverse]
    rank_sum = float(ranks[:npos].sum())
    return (rank_sum - npos * (npos + 1) / 2.0) / (npos * nneg)


# ---------------------------------------------------------------------------
# dispatch

_backend = os.environ.get("EOT_KERNELS", "").strip().lower()
if _backend not in ("numba", "numpy"):
    _backend = "numba" if HAS_NUMBA else "numpy"
if _backend == "numba" and not HAS_NUMBA:
    _backend = "numpy"


def backend() -> str:
    return _backend


def set_backend(name: str) -> None:
    global _backend
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown kernel backend: {name!r}")
    if name == "numba" and not HAS_NUMBA:
        raise ValueError("numba backend requested but numba is not importable")
    _backend = name


def _as_scores(scores) -> np.ndarray:
    return np.ascontiguousarray(scores, dtype=np.float64)


def _as_labels(labels) -> np.ndarray:
    return np.ascontiguousarray(labels, dtype=np.int8)


def confusion_counts(scores, labels, tau: float) -> tuple[int, int, int, int]:
    """Confusion counts (tp, fp, tn, fn) for the rule ``score >= tau``."""
    s = _as_scores(scores)
    y = _as_labels(labels)
    if _backend == "numba":
        tp, fp, tn, fn = _confusion_nb(s, y, float(tau))
        return int(tp), int(fp), int(tn), int(fn)
    return _confusion_np(s, y, float(tau))


def roc_accumulate(scores, labels) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Unique thresholds (descending) with cumulative TP/FP counts.

    At threshold ``thr[i]`` every score ``>= thr[i]`` is predicted positive,
    so ``tps[i]``/``fps[i]`` are the TP/FP counts at that operating point.
    """
    s = _as_scores(scores)
    y = _as_labels(labels)
    order = np.argsort(-s, kind="mergesort")
    s = np.ascontiguousarray(s[order])
    y = np.ascontiguousarray(y[order])
    if _backend == "numba":
        thr, tps, fps = _roc_accumulate_nb(s, y)
        return thr, tps, fps
    return _roc_accumulate_np(s, y)


def concordance_auc(pos_scores, neg_scores) -> float:
    """Pairwise concordance probability P(score_pos > score_neg), ties 1/2."""
    p = _as_scores(pos_scores)
    n = _as_scores(neg_scores)
    if p.shape[0] == 0 or n.shape[0] == 0:
        raise ValueError("need at least one positive and one negative score")
    if _backend == "numba":
        return float(_concordance_nb(p, n))
    return float(_concordance_np(p, n))


def warmup() -> None:
    """Trigger JIT compilation so benchmarks and latency tests stay clean."""
    s = np.array([0.9, 0.1, 0.5], dtype=np.float64)
    y = np.array([1, 0, 1], dtype=np.int8)
    confusion_counts(s, y, 0.5)
    roc_accumulate(s, y)
    concordance_auc(s[:2], s[2:])
