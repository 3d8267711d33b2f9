"""Long-running decision service: sessions over newline-delimited JSON.

Client frames (one JSON object per line):
    {"open":  {...SessionConfig overrides...}}
    {"push":  {"session": <id>, "text": <string>}}
    {"reset": {"session": <id>}}
    {"close": {"session": <id>}}

Server frames:
    {"opened":   {"session": <id>}}
    {"decision": {"session": <id>, "verdict": "End"|"NotEnd",
                  "p_end": <float>, "boundary_index": <int>}}
    {"error":    {"code": <string>, "message": <string>}}

Frames within a connection are processed strictly in arrival order; a
malformed frame yields an error frame and the connection stays open.
Session ids are assigned per connection ("s1", "s2", ...), so recorded
transcripts replay byte-identically.
"""
from __future__ import annotations

import json
import logging
import os
import socketserver
import threading

from .engine import ConfigError, SessionConfig, open_session

log = logging.getLogger("thai_eot.service")

_CONFIG_KEYS = ("tau", "min_context", "cooldown", "max_context")


def configure_logging() -> None:
    """Line-oriented logging; verbosity from the EOT_LOG env var."""
    level = os.environ.get("EOT_LOG", "warning").upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.WARNING),
        format="%(asctime)s %(levelname)s %(name)s %(message)s",
    )


def dump_frame(obj: dict) -> bytes:
    return (
        json.dumps(obj, ensure_ascii=False, separators=(",", ":"), sort_keys=True) + "\n"
    ).encode("utf-8")


def _error(code: str, message: str) -> bytes:
    return dump_frame({"error": {"code": code, "message": message}})


class _ConnectionState:
    def __init__(self, server: "EotService"):
        self.server = server
        self.sessions: dict[str, object] = {}
        self.next_id = 1

    def handle_frame(self, frame: dict) -> list[bytes]:
        if not isinstance(frame, dict) or len(frame) != 1:
            return [_error("bad_frame", "expected exactly one frame kind")]
        kind, body = next(iter(frame.items()))
        handler = getattr(self, f"_on_{kind}", None)
        if handler is None:
            return [_error("unknown_kind", f"unknown frame kind: {kind}")]
        if not isinstance(body, dict):
            return [_error("bad_frame", f"{kind} body must be an object")]
        return handler(body)

    def _on_open(self, body: dict) -> list[bytes]:
        overrides = {k: body[k] for k in _CONFIG_KEYS if k in body}
        unknown = set(body) - set(_CONFIG_KEYS)
        if unknown:
            return [_error("bad_config", f"unknown config keys: {sorted(unknown)}")]
        cfg_dict = dict(self.server.default_config.__dict__)
        cfg_dict.update(overrides)
        try:
            session = open_session(SessionConfig(**cfg_dict))
        except (ConfigError, TypeError) as exc:
            return [_error("bad_config", str(exc))]
        sid = f"s{self.next_id}"
        self.next_id += 1
        self.sessions[sid] = session
        log.info("opened session %s", sid)
        return [dump_frame({"opened": {"session": sid}})]

    def _require(self, body: dict):
        sid = body.get("session")
        session = self.sessions.get(sid)
        if session is None:
            return None, [_error("no_such_session", f"unknown session: {sid!r}")]
        return (sid, session), None

    def _on_push(self, body: dict) -> list[bytes]:
        found, err = self._require(body)
        if err:
            return err
        sid, session = found
        text = body.get("text")
        if not isinstance(text, str):
            return [_error("bad_frame", "push needs text:str")]
        out = []
        for decision in session.push_text(text, self.server.scorer):
            out.append(
                dump_frame(
                    {
                        "decision": {
                            "session": sid,
                            "verdict": decision.verdict,
                            "p_end": decision.p_end,
                            "boundary_index": decision.boundary_index,
                        }
                    }
                )
            )
        return out

    def _on_reset(self, body: dict) -> list[bytes]:
        found, err = self._require(body)
        if err:
            return err
        found[1].reset_after_end()
        return []

    def _on_close(self, body: dict) -> list[bytes]:
        found, err = self._require(body)
        if err:
            return err
        del self.sessions[found[0]]
        return []


class _Handler(socketserver.StreamRequestHandler):
    def handle(self):
        state = _ConnectionState(self.server.service)  # type: ignore[attr-defined]
        for raw in self.rfile:
            try:
                frame = json.loads(raw.decode("utf-8"))
            except (UnicodeDecodeError, json.JSONDecodeError) as exc:
                self.wfile.write(_error("bad_frame", f"malformed frame: {exc}"))
                self.wfile.flush()
                continue
            for reply in state.handle_frame(frame):
                self.wfile.write(reply)
            self.wfile.flush()


class EotService:
    """Threaded TCP service; one engine session set per connection."""

    def __init__(
        self,
        scorer,
        default_config: SessionConfig | None = None,
        host: str = "127.0.0.1",
        port: int = 0,
    ):
        self.scorer = scorer
        self.default_config = default_config or SessionConfig()
        self.default_config.validate()

        class Server(socketserver.ThreadingTCPServer):
            allow_reuse_address = True
            daemon_threads = True

        self._server = Server((host, port), _Handler)
        self._server.service = self  # type: ignore[attr-defined]
        self._thread: threading.Thread | None = None
        self._serving = False

    @property
    def address(self) -> str:
        host, port = self._server.server_address[:2]
        return f"{host}:{port}"

    def start(self) -> "EotService":
        self._serving = True
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()
        log.info("serving on %s", self.address)
        return self

    def serve_forever(self) -> None:
        log.info("serving on %s", self.address)
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
