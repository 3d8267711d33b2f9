#!/usr/bin/env python3
"""Compare the numba and numpy kernel backends.

Usage:
    python3 benchmarks/bench_kernels.py [--sizes 1000,10000,100000] [--repeat 20]

For each input size the three kernels (confusion counts, ROC accumulation,
pairwise concordance) run on the same random score/label arrays under both
backends; results are cross-checked for agreement before timing.
"""
from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from thai_eot import kernels  # noqa: E402


def _time(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_size(n: int, repeat: int, rng: np.random.Generator) -> list[tuple]:
    scores = np.round(rng.random(n), 3)  # rounding forces score ties
    labels = (rng.random(n) < 0.5).astype(np.int8)
    labels[0], labels[1] = 1, 0
    pos = scores[labels == 1]
    neg = scores[labels == 0]
    # concordance is O(P*N) on the loop backend; cap its input
    cap = min(len(pos), len(neg), 4000)
    pos_c, neg_c = pos[:cap], neg[:cap]

    cases = [
        ("confusion", lambda: kernels.confusion_counts(scores, labels, 0.5)),
        ("roc_accumulate", lambda: kernels.roc_accumulate(scores, labels)),
        ("concordance", lambda: kernels.concordance_auc(pos_c, neg_c)),
    ]

    rows = []
    for name, fn in cases:
        results = {}
        timings = {}
        for backend in ("numpy", "numba") if kernels.HAS_NUMBA else ("numpy",):
            kernels.set_backend(backend)
            kernels.warmup()
            results[backend] = fn()
            timings[backend] = _time(fn, repeat)
        if len(results) == 2:
            a, b = results["numpy"], results["numba"]
            if name == "roc_accumulate":
                assert all(np.array_equal(x, y) for x, y in zip(a, b)), name
            elif name == "concordance":
                assert abs(a - b) < 1e-12, name
            else:
                assert a == b, name
        rows.append((name, n, timings))
    return rows


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="1000,10000,100000")
    ap.add_argument("--repeat", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    sizes = [int(s) for s in args.sizes.split(",")]

    print(f"numba available: {kernels.HAS_NUMBA}")
    header = f"{'kernel':<16}{'n':>9}{'numpy (ms)':>14}{'numba (ms)':>14}{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for n in sizes:
        for name, size, timings in bench_size(n, args.repeat, rng):
            np_ms = timings["numpy"] * 1e3
            if "numba" in timings:
                nb_ms = timings["numba"] * 1e3
                speed = f"{np_ms / nb_ms:9.2f}x"
                print(f"{name:<16}{size:>9}{np_ms:>14.3f}{nb_ms:>14.3f}{speed}")
            else:
                print(f"{name:<16}{size:>9}{np_ms:>14.3f}{'-':>14}{'-':>10}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
