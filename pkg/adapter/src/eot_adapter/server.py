"""Scorer wire protocol server: newline-delimited JSON over TCP.

Handshake: client sends {"hello":{"proto":1}}, server replies
{"hello":{"proto":1,"name":<scorer name>}}. Then each request
{"id":<u64>,"text":<string>} gets exactly one {"id":<u64>,"p_end":<float>}
with the same id. Frames the server cannot parse or dispatch are answered
with {"error":{"code":...,"message":...}} and the connection stays open.

Connections are handled in threads, but model inference is serialized
behind a lock: one forward pass at a time.
"""
from __future__ import annotations

import json
import logging
import socketserver
import threading

log = logging.getLogger("eot_adapter.server")

PROTO_VERSION = 1


def dump_frame(obj: dict) -> bytes:
    return (json.dumps(obj, ensure_ascii=False, separators=(",", ":")) + "\n").encode(
        "utf-8"
    )


def _error(code: str, message: str) -> bytes:
    return dump_frame({"error": {"code": code, "message": message}})


def _serve_connection(rfile, wfile, name: str, score) -> None:
    line = rfile.readline()
    if not line:
        return
    try:
        frame = json.loads(line.decode("utf-8"))
        hello = frame.get("hello") if isinstance(frame, dict) else None
    except (UnicodeDecodeError, json.JSONDecodeError):
        hello = None
    if not isinstance(hello, dict) or hello.get("proto") != PROTO_VERSION:
        wfile.write(_error("bad_handshake", "expected hello with proto 1"))
        wfile.flush()
        return
    wfile.write(dump_frame({"hello": {"proto": PROTO_VERSION, "name": name}}))
    wfile.flush()

    for raw in rfile:
        try:
            frame = json.loads(raw.decode("utf-8"))
            if not isinstance(frame, dict):
                raise ValueError("frame is not a JSON object")
        except (UnicodeDecodeError, json.JSONDecodeError, ValueError) as exc:
            wfile.write(_error("bad_frame", f"malformed frame: {exc}"))
            wfile.flush()
            continue
        req_id = frame.get("id")
        text = frame.get("text")
        if not isinstance(req_id, int) or isinstance(req_id, bool) or not isinstance(text, str):
            wfile.write(_error("bad_request", "need id:int and text:str"))
            wfile.flush()
            continue
        try:
            p_end = float(score(text))
        except Exception as exc:
            log.warning("scoring failed for request %s: %s", req_id, exc)
            wfile.write(_error("scorer_error", str(exc)))
            wfile.flush()
            continue
        wfile.write(dump_frame({"id": req_id, "p_end": p_end}))
        wfile.flush()


class AdapterServer:
    """Threaded TCP server wrapping one StopTokenScorer."""

    def __init__(self, scorer, host: str = "127.0.0.1", port: int = 0):
        name = scorer.name
        lock = threading.Lock()

        def locked_score(text: str) -> float:
            with lock:
                return scorer.score(text)

        class Handler(socketserver.StreamRequestHandler):
            def handle(self):
                _serve_connection(self.rfile, self.wfile, name, locked_score)

        class Server(socketserver.ThreadingTCPServer):
            allow_reuse_address = True
            daemon_threads = True

        self._server = Server((host, port), Handler)
        self._thread: threading.Thread | None = None
        self._serving = False

    @property
    def address(self) -> str:
        host, port = self._server.server_address[:2]
        return f"{host}:{port}"

    def start(self) -> "AdapterServer":
        self._serving = True
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()
        log.info("serving on %s", self.address)
        return self

    def serve_forever(self) -> None:
        self._serving = True
        self._server.serve_forever()

    def stop(self) -> None:
        if self._serving:
            self._server.shutdown()
            self._serving = False
        self._server.server_close()
        if self._thread:
            self._thread.join(timeout=5)

    def __enter__(self):
        return self.start()

    def __exit__(self, *exc):
        self.stop()
