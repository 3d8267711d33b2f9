"""Scorer wire protocol: newline-delimited JSON over a stream socket.

Handshake: client sends ``{"hello":{"proto":1}}``; the server replies
``{"hello":{"proto":1,"name":<scorer name>}}``. After that, each request
``{"id":<u64>,"text":<string>}`` is answered by exactly one response
``{"id":<u64>,"p_end":<float>}`` with the same id. A frame the server
cannot parse or dispatch is answered with ``{"error":{"code":...,
"message":...}}`` and the connection stays open.

This module carries the client-side plumbing, a reference server that can
wrap any local scorer, and the conformance suite any server implementation
(including the out-of-process model adapter) must pass.
"""
from __future__ import annotations

import json
import socket
import socketserver
import threading
from typing import Callable

PROTO_VERSION = 1
DEFAULT_TIMEOUT_S = 5.0


class ProtocolError(Exception):
    """The peer violated the wire protocol (bad frame, bad id, bad p_end)."""


class TimedOut(Exception):
    """The peer did not answer within the configured timeout."""


def parse_address(addr: str) -> tuple[str, int]:
    host, _, port = addr.rpartition(":")
    if not host or not port.isdigit():
        raise ValueError(f"expected host:port, got {addr!r}")
    return host, int(port)


def dump_frame(obj: dict) -> bytes:
    return (json.dumps(obj, ensure_ascii=False, separators=(",", ":")) + "\n").encode(
        "utf-8"
    )


def read_frame(fh) -> dict | None:
    """Read one NDJSON frame; None on EOF."""
    try:
        line = fh.readline()
    except socket.timeout as exc:
        raise TimedOut("timed out waiting for a frame") from exc
    if not line:
        return None
    try:
        obj = json.loads(line.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ProtocolError(f"malformed frame: {exc}") from exc
    if not isinstance(obj, dict):
        raise ProtocolError("frame is not a JSON object")
    return obj


class WireClient:
    """Client half of the scorer protocol; one request in flight at a time."""

    def __init__(self, addr: str, timeout_s: float = DEFAULT_TIMEOUT_S):
        host, port = parse_address(addr)
        self._sock = socket.create_connection((host, port), timeout=timeout_s)
        self._fh = self._sock.makefile("rb")
        self._next_id = 1
        self.server_name = self._handshake()

    def _handshake(self) -> str:
        self._sock.sendall(dump_frame({"hello": {"proto": PROTO_VERSION}}))
        reply = read_frame(self._fh)
        if reply is None:
            raise ProtocolError("connection closed during handshake")
        hello = reply.get("hello")
        if not isinstance(hello, dict) or hello.get("proto") != PROTO_VERSION:
            raise ProtocolError(f"bad handshake reply: {reply!r}")
        name = hello.get("name")
        if not isinstance(name, str):
            raise ProtocolError("handshake reply lacks a scorer name")
        return name

    def score(self, text: str) -> float:
        req_id = self._next_id
        self._next_id += 1
        self._sock.sendall(dump_frame({"id": req_id, "text": text}))
        reply = read_frame(self._fh)
        if reply is None:
            raise ProtocolError("connection closed mid-request")
        if "error" in reply:
            raise ProtocolError(f"server error: {reply['error']!r}")
        if reply.get("id") != req_id:
            raise ProtocolError(
                f"response id {reply.get('id')!r} does not match request id {req_id}"
            )
        p_end = reply.get("p_end")
        if isinstance(p_end, bool) or not isinstance(p_end, (int, float)):
            raise ProtocolError(f"p_end is not a number: {p_end!r}")
        p_end = float(p_end)
        if not 0.0 <= p_end <= 1.0:
            raise ProtocolError(f"p_end out of [0,1]: {p_end}")
        return p_end

    def close(self) -> None:
        try:
            self._fh.close()
        finally:
            self._sock.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def handle_scorer_connection(rfile, wfile, name: str, score: Callable[[str], float]):
    """Server-side request loop shared by the reference server and tests."""
    frame = read_frame_lenient(rfile)
    if frame is None:
        return
    hello = frame.get("hello") if isinstance(frame, dict) else None
    if not isinstance(hello, dict) or hello.get("proto") != PROTO_VERSION:
        wfile.write(
            dump_frame({"error": {"code": "bad_handshake", "message": "expected hello"}})
        )
        wfile.flush()
        return
    wfile.write(dump_frame({"hello": {"proto": PROTO_VERSION, "name": name}}))
    wfile.flush()
    while True:
        frame = read_frame_lenient(rfile)
        if frame is None:
            return
        if isinstance(frame, ProtocolError):
            wfile.write(
                dump_frame({"error": {"code": "bad_frame", "message": str(frame)}})
            )
            wfile.flush()
            continue
        req_id = frame.get("id")
        text = frame.get("text")
        if not isinstance(req_id, int) or isinstance(req_id, bool) or not isinstance(text, str):
            wfile.write(
                dump_frame(
                    {"error": {"code": "bad_request", "message": "need id:int and text:str"}}
                )
            )
            wfile.flush()
            continue
        try:
            p_end = float(score(text))
        except Exception as exc:  # scorer failure must not kill the connection
            wfile.write(
                dump_frame({"error": {"code": "scorer_error", "message": str(exc)}})
            )
            wfile.flush()
            continue
        wfile.write(dump_frame({"id": req_id, "p_end": p_end}))
        wfile.flush()


def read_frame_lenient(fh):
    """Like read_frame, but returns the ProtocolError instead of raising.

    Servers must answer malformed frames with an error frame and keep going.
    """
    try:
        return read_frame(fh)
    except ProtocolError as exc:
        return exc


class ScorerServer:
    """Reference threaded server exposing a local scorer over the protocol."""

    def __init__(self, scorer, host: str = "127.0.0.1", port: int = 0):
        name = scorer.name
        score = scorer.score

        class Handler(socketserver.StreamRequestHandler):
            def handle(self):
                handle_scorer_connection(self.rfile, self.wfile, name, score)

        class Server(socketserver.ThreadingTCPServer):
            allow_reuse_address = True
            daemon_threads = True

        self._server = Server((host, port), Handler)
        self._thread: threading.Thread | None = None

    @property
    def address(self) -> str:
        host, port = self._server.server_address[:2]
        return f"{host}:{port}"

    def start(self) -> "ScorerServer":
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()
        return self

    def stop(self) -> None:
        self._server.shutdown()
        self._server.server_close()
        if self._thread:
            self._thread.join(timeout=5)

    def __enter__(self):
        return self.start()

    def __exit__(self, *exc):
        self.stop()


def run_conformance(addr: str, sample_texts: list[str] | None = None) -> list[dict]:
    """Run the protocol conformance suite against a live scorer server.

    Returns one dict per check: {"check": name, "ok": bool, "detail": str}.
    Any server (in-process reference or out-of-process adapter) must pass
    every check.
    """
    texts = sample_texts or ["สวัสดีครับ", "ขอโอนเงินไปที่", "วันนี้อากาศดีนะ"]
    results: list[dict] = []

    def record(check: str, ok: bool, detail: str = "") -> None:
        results.append({"check": check, "ok": ok, "detail": detail})

    # handshake
    try:
        client = WireClient(addr)
        record("handshake", True, f"name={client.server_name}")
    except Exception as exc:
        record("handshake", False, str(exc))
        return results

    try:
        # bounds + determinism
        first = [client.score(t) for t in texts]
        ok = all(0.0 <= p <= 1.0 for p in first)
        record("p_end_bounds", ok, f"scores={first}")
        second = [client.score(t) for t in texts]
        record("determinism", first == second, f"{first} vs {second}")

        # id correlation across many requests, including large ids
        client._next_id = 2**53
        p = client.score(texts[0])
        record("large_id_correlation", True, f"p_end={p}")
    except Exception as exc:
        record("request_response", False, str(exc))

    # malformed frame: server must answer with an error frame and keep the
    # connection usable
    try:
        client._sock.sendall(b"this is not json\n")
        reply = read_frame(client._fh)
        ok = isinstance(reply, dict) and "error" in reply
        record("malformed_frame_error", ok, f"reply={reply!r}")
        p = client.score(texts[0])
        record("connection_survives_error", 0.0 <= p <= 1.0, f"p_end={p}")
    except Exception as exc:
        record("malformed_frame_error", False, str(exc))
    finally:
        client.close()

    # structurally valid JSON but not a request
    try:
        with WireClient(addr) as c2:
            c2._sock.sendall(dump_frame({"id": "not-an-int", "text": 5}))
            reply = read_frame(c2._fh)
            ok = isinstance(reply, dict) and "error" in reply
            record("bad_request_error", ok, f"reply={reply!r}")
    except Exception as exc:
        record("bad_request_error", False, str(exc))

    return results
