import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from thai_eot import kernels
from thai_eot.calibration import (
    CalibrationResult,
    DegenerateLabels,
    auc,
    calibrate,
    concordance_auc,
    read_calibration_json,
    roc_curve,
    write_calibration_json,
    write_roc_csv,
    youden_threshold,
)
from thai_eot.scorer import ScoreRecord


def recs(scores, labels, name="t"):
    return [
        ScoreRecord(f"e{i}", "End" if l else "NotEnd", float(s), name)
        for i, (s, l) in enumerate(zip(scores, labels))
    ]


def brute_force_youden(scores, labels):
    """Independent exhaustive sweep used as the calibration oracle."""
    candidates = sorted(set(scores)) + [math.inf]
    n_pos = sum(labels)
    n_neg = len(labels) - n_pos
    best_tau, best_j = None, -math.inf
    for tau in candidates:
        tp = sum(1 for s, l in zip(scores, labels) if l and s >= tau)
        fp = sum(1 for s, l in zip(scores, labels) if not l and s >= tau)
        j = tp / n_pos - fp / n_neg
        # strictly-greater keeps the lowest tau among maximizers, since
        # candidates ascend
        if j > best_j:
            best_tau, best_j = tau, j
    return best_tau, best_j


def brute_force_concordance(scores, labels):
    pos = [s for s, l in zip(scores, labels) if l]
    neg = [s for s, l in zip(scores, labels) if not l]
    c = 0.0
    for p in pos:
        for n in neg:
            c += 1.0 if p > n else (0.5 if p == n else 0.0)
    return c / (len(pos) * len(neg))


# -- spec cases ---------------------------------------------------------------


def test_separable_case():
    curve = roc_curve(recs([0.9, 0.8, 0.3, 0.1], [1, 1, 0, 0]))
    by_tau = {t: (tp, fp) for t, tp, fp in curve.points}
    assert by_tau[0.8] == (1.0, 0.0)
    result = youden_threshold(curve)
    assert result.tau_star == 0.8
    assert result.j_star == 1.0
    assert auc(curve) == 1.0


def test_interleaved_case_tie_breaks_low():
    curve = roc_curve(recs([0.9, 0.8, 0.3, 0.1], [1, 0, 1, 0]))
    by_tau = {t: (tp, fp) for t, tp, fp in curve.points}
    assert by_tau[0.3] == (1.0, 0.5)
    result = youden_threshold(curve)
    assert result.tau_star == 0.3
    assert result.j_star == pytest.approx(0.5)
    assert auc(curve) == pytest.approx(0.75)


def test_all_scores_equal_gives_half_auc():
    curve = roc_curve(recs([0.4] * 6, [1, 0, 1, 0, 1, 0]))
    assert auc(curve) == pytest.approx(0.5)


def test_single_class_raises():
    with pytest.raises(DegenerateLabels):
        roc_curve(recs([0.9, 0.1], [1, 1]))
    with pytest.raises(DegenerateLabels):
        roc_curve(recs([0.9, 0.1], [0, 0]))
    with pytest.raises(DegenerateLabels):
        roc_curve([])


# -- invariants ---------------------------------------------------------------


def random_set(rng, size):
    labels = [rng.random() < 0.5 for _ in range(size)]
    labels[0], labels[1] = True, False  # keep both classes present
    # coarse grid to force ties
    scores = [round(rng.random(), 2) for _ in range(size)]
    return scores, labels


def test_youden_matches_brute_force():
    rng = random.Random(202)
    for _ in range(200):
        scores, labels = random_set(rng, rng.randint(4, 80))
        result = youden_threshold(roc_curve(recs(scores, labels)))
        tau, j = brute_force_youden(scores, labels)
        assert result.tau_star == tau
        assert abs(result.j_star - j) < 1e-12


def test_auc_equals_concordance():
    rng = random.Random(7)
    for _ in range(200):
        scores, labels = random_set(rng, rng.randint(4, 60))
        records = recs(scores, labels)
        trapezoid = auc(roc_curve(records))
        pairwise = concordance_auc(records)
        brute = brute_force_concordance(scores, labels)
        assert abs(trapezoid - pairwise) < 1e-9
        assert abs(pairwise - brute) < 1e-9


def test_curve_is_monotone(pipeline):
    curve = pipeline["curve"]
    assert np.all(np.diff(curve.tpr) >= 0)
    assert np.all(np.diff(curve.fpr) >= 0)
    assert curve.tpr[0] == curve.fpr[0] == 0.0
    assert curve.tpr[-1] == curve.fpr[-1] == 1.0
    assert np.all((0 <= curve.tpr) & (curve.tpr <= 1))
    assert np.all(np.diff(curve.thresholds) < 0)


@settings(max_examples=60, deadline=None)
@given(
    st.lists(
        st.tuples(st.floats(0.001, 0.999), st.booleans()), min_size=4, max_size=60
    ).filter(lambda xs: any(l for _, l in xs) and any(not l for _, l in xs))
)
def test_rank_invariance_under_monotone_transform(pairs):
    scores = [s for s, _ in pairs]
    labels = [l for _, l in pairs]
    base = recs(scores, labels)
    # strictly increasing map [0,1] -> [0,1]
    squashed = recs([s**3 for s in scores], labels)
    auc_a = auc(roc_curve(base))
    auc_b = auc(roc_curve(squashed))
    assert abs(auc_a - auc_b) < 1e-9
    res_a = youden_threshold(roc_curve(base))
    res_b = youden_threshold(roc_curve(squashed))
    pred_a = {r.example_id for r in base if r.p_end >= res_a.tau_star}
    pred_b = {r.example_id for r in squashed if r.p_end >= res_b.tau_star}
    assert pred_a == pred_b


def test_backends_agree():
    rng = random.Random(11)
    original = kernels.backend()
    try:
        for _ in range(50):
            scores, labels = random_set(rng, rng.randint(4, 50))
            records = recs(scores, labels)
            out = {}
            for backend in ("numpy", "numba") if kernels.HAS_NUMBA else ("numpy",):
                kernels.set_backend(backend)
                curve = roc_curve(records)
                out[backend] = (
                    curve.thresholds.tolist(),
                    curve.tpr.tolist(),
                    curve.fpr.tolist(),
                    concordance_auc(records),
                )
            if kernels.HAS_NUMBA:
                np_thr, np_tpr, np_fpr, np_auc = out["numpy"]
                nb_thr, nb_tpr, nb_fpr, nb_auc = out["numba"]
                assert np_thr == nb_thr and np_tpr == nb_tpr and np_fpr == nb_fpr
                assert abs(np_auc - nb_auc) < 1e-12
    finally:
        kernels.set_backend(original)


# -- artifacts ---------------------------------------------------------------


def test_calibrate_runs_cross_check(pipeline):
    curve, result = calibrate(pipeline["val_scores"])
    assert 0.0 <= result.auc <= 1.0
    assert result.tau_star in set(curve.thresholds.tolist())
    assert result.n_pos + result.n_neg == len(pipeline["val_scores"])


def test_roc_csv_and_calibration_json_roundtrip(tmp_path, pipeline):
    curve, result = pipeline["curve"], pipeline["calibration"]
    write_roc_csv(curve, tmp_path / "roc.csv")
    lines = (tmp_path / "roc.csv").read_text().splitlines()
    assert lines[0] == "threshold,tpr,fpr"
    assert lines[1].startswith("inf,")
    assert len(lines) == len(curve.points) + 1
    write_calibration_json(result, tmp_path / "calibration.json")
    loaded = read_calibration_json(tmp_path / "calibration.json")
    assert loaded == CalibrationResult(**result.to_dict())
