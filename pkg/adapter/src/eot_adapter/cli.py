"""CLI: serve a checkpoint's stop-token probability over the wire protocol."""
from __future__ import annotations

import argparse
import logging
import os
import sys

from .adapter import AdapterConfig, AdapterError, StopTokenScorer
from .server import AdapterServer


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="eot-adapter",
        description="Serve P(stop token | text) from a causal-LM checkpoint.",
    )
    ap.add_argument("--checkpoint", required=True, help="model path or identifier")
    ap.add_argument("--stop-token", required=True, help="vocabulary token marking end of turn")
    ap.add_argument("--bind", default="127.0.0.1:0", help="host:port (port 0 = ephemeral)")
    ap.add_argument("--device", default="cpu")
    ap.add_argument("--max-context", type=int, default=512)
    args = ap.parse_args(argv)

    level = os.environ.get("EOT_LOG", "warning").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING))

    host, _, port = args.bind.rpartition(":")
    if not host or not port.isdigit():
        ap.error(f"--bind expects host:port, got {args.bind!r}")

    config = AdapterConfig(
        checkpoint=args.checkpoint,
        stop_token=args.stop_token,
        device=args.device,
        max_context=args.max_context,
    )
    try:
        scorer = StopTokenScorer(config)
    except AdapterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    server = AdapterServer(scorer, host=host, port=int(port))
    print(f"serving on {server.address} ({scorer.name}, stop={args.stop_token!r})", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.stop()
    return 0


if __name__ == "__main__":
    sys.exit(main())
