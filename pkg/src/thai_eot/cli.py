"""Unified command-line entry point.

Subcommands: prepare, train-scorer, score, calibrate, evaluate, bench,
serve. Run ``thai-eot <subcommand> --help`` for flags.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import calibration as calib
from . import corpus, evaluation, ngram, scorer as scoring
from .engine import SessionConfig
from .service import EotService, configure_logging


def _add_prepare(sub):
    p = sub.add_parser("prepare", help="filter raw lines and build dataset.jsonl")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--min-len", type=int, default=3)
    p.add_argument("--max-len", type=int, default=200)
    p.add_argument("--min-cut-len", type=int, default=6)
    p.add_argument("--filter-cmd", default=None,
                   help="external JSONL->JSONL filter command (optional)")


def _add_train(sub):
    p = sub.add_parser("train-scorer", help="train the n-gram reference scorer")
    p.add_argument("--dataset", required=True)
    p.add_argument("--order", type=int, default=4)
    p.add_argument("--alpha", type=float, default=0.1)
    p.add_argument("--out", required=True)


def _add_score(sub):
    p = sub.add_parser("score", help="score a dataset with any scorer")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--model", help="n-gram model file")
    src.add_argument("--replay", help="scores.jsonl to replay")
    src.add_argument("--remote", help="host:port of a wire-protocol scorer")
    p.add_argument("--dataset", required=True)
    p.add_argument("--split", choices=corpus.SPLITS, default=None,
                   help="restrict to one split")
    p.add_argument("--out", required=True)


def _add_calibrate(sub):
    p = sub.add_parser("calibrate", help="ROC + Youden's J threshold selection")
    p.add_argument("--scores", required=True)
    p.add_argument("--out", required=True)


def _add_evaluate(sub):
    p = sub.add_parser("evaluate", help="metrics at a threshold, plus sensitivity")
    p.add_argument("--scores", required=True)
    thr = p.add_mutually_exclusive_group(required=True)
    thr.add_argument("--tau", type=float)
    thr.add_argument("--calibration", help="calibration.json from `calibrate`")
    p.add_argument("--out", required=True)
    p.add_argument("--latency", default=None,
                   help="latency.json from `bench`; enables tradeoff.csv")
    p.add_argument("--size-note", default="", help="size column for tradeoff.csv")


def _add_bench(sub):
    p = sub.add_parser("bench", help="per-sample scorer latency, batch size one")
    p.add_argument("--model", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--out", required=True)


def _add_serve(sub):
    p = sub.add_parser("serve", help="run the streaming decision service")
    p.add_argument("--bind", default="127.0.0.1:0")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--model", help="n-gram model file")
    src.add_argument("--remote", help="host:port of a wire-protocol scorer")
    p.add_argument("--calibration", default=None)
    p.add_argument("--tau", type=float, default=None,
                   help="overrides the calibration file threshold")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="thai-eot", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for add in (_add_prepare, _add_train, _add_score, _add_calibrate,
                _add_evaluate, _add_bench, _add_serve):
        add(sub)
    return parser


def _load_scorer(args) -> object:
    if getattr(args, "model", None):
        return scoring.NgramScorer(ngram.NgramModel.load(args.model))
    if getattr(args, "remote", None):
        return scoring.RemoteScorer(args.remote)
    raise SystemExit("no scorer source given")


def cmd_prepare(args) -> int:
    stats = corpus.prepare(
        args.input,
        args.out,
        seed=args.seed,
        min_len=args.min_len,
        max_len=args.max_len,
        min_cut_len=args.min_cut_len,
        filter_cmd=args.filter_cmd,
    )
    print(f"lines={stats.lines} accepted={stats.accepted} "
          f"rejected={dict(stats.rejected)}")
    return 0


def cmd_train(args) -> int:
    examples = corpus.read_dataset(args.dataset)
    texts = [ex.text for ex in examples
             if ex.label == corpus.LABEL_END and ex.split == "Train"]
    model = ngram.train_ngram(texts, k=args.order, alpha=args.alpha)
    model.save(args.out)
    print(f"trained {model.name} on {len(texts)} sentences, "
          f"vocab={len(model.vocab)}, contexts={len(model.counts)}")
    return 0


def cmd_score(args) -> int:
    examples = corpus.read_dataset(args.dataset)
    if args.split:
        examples = [ex for ex in examples if ex.split == args.split]
    if args.replay:
        sc = scoring.ReplayScorer.load(args.replay, examples)
    else:
        sc = _load_scorer(args)
    records = scoring.score_dataset(sc, examples)
    scoring.write_scores(records, args.out)
    print(f"scored {len(records)} examples with {sc.name} -> {args.out}")
    return 0


def cmd_calibrate(args) -> int:
    records = scoring.read_scores(args.scores)
    curve, result = calib.calibrate(records)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    calib.write_roc_csv(curve, out / "roc.csv")
    calib.write_calibration_json(result, out / "calibration.json")
    print(f"tau_star={result.tau_star!r} j_star={result.j_star:.4f} "
          f"auc={result.auc:.4f} (n_pos={result.n_pos}, n_neg={result.n_neg})")
    return 0


def cmd_evaluate(args) -> int:
    records = scoring.read_scores(args.scores)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    tau = args.tau
    if tau is None:
        tau = calib.read_calibration_json(args.calibration).tau_star
    metrics = evaluation.compute_metrics(records, tau)
    evaluation.write_metrics_json(metrics, out / "metrics.json")
    row = evaluation.sensitivity_report(records, tau)
    with open(out / "sensitivity.md", "w", encoding="utf-8") as fh:
        fh.write(evaluation.render_sensitivity([row]))
    if args.latency:
        import json

        with open(args.latency, encoding="utf-8") as fh:
            lat = evaluation.LatencyStats(**json.load(fh))
        evaluation.tradeoff_report(
            [(row.name, metrics, lat, args.size_note)], out / "tradeoff.csv"
        )
    print(f"tau={tau!r} f1={metrics.f1:.4f} acc={metrics.accuracy:.4f} "
          f"prec={metrics.precision:.4f} rec={metrics.recall:.4f}")
    return 0


def cmd_bench(args) -> int:
    sc = scoring.NgramScorer(ngram.NgramModel.load(args.model))
    examples = corpus.read_dataset(args.dataset)
    samples = [ex.text for ex in examples]
    stats = evaluation.bench_latency(sc, samples, n=args.n)
    evaluation.write_latency_json(stats, args.out)
    print(f"n={stats.n_samples} mean={stats.mean_s * 1e3:.3f}ms "
          f"p50={stats.p50_s * 1e3:.3f}ms p95={stats.p95_s * 1e3:.3f}ms "
          f"max={stats.max_s * 1e3:.3f}ms")
    return 0


def cmd_serve(args) -> int:
    configure_logging()
    sc = _load_scorer(args)
    tau = 0.5
    if args.calibration:
        tau = calib.read_calibration_json(args.calibration).tau_star
    if args.tau is not None:
        tau = args.tau
    host, _, port = args.bind.rpartition(":")
    service = EotService(sc, SessionConfig(tau=tau), host=host or "127.0.0.1",
                         port=int(port))
    print(f"serving on {service.address} with {sc.name}, tau={tau!r}", flush=True)
    try:
        service.serve_forever()
    except KeyboardInterrupt:
        service.stop()
    return 0


_COMMANDS = {
    "prepare": cmd_prepare,
    "train-scorer": cmd_train,
    "score": cmd_score,
    "calibrate": cmd_calibrate,
    "evaluate": cmd_evaluate,
    "bench": cmd_bench,
    "serve": cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return _COMMANDS[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
