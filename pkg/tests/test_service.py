import json
import socket
from pathlib import Path

import pytest

from thai_eot.engine import SessionConfig
from thai_eot.scorer import NgramScorer
from thai_eot.service import EotService

DATA = Path(__file__).parent / "data"


class Client:
    def __init__(self, address: str):
        host, _, port = address.rpartition(":")
        self.sock = socket.create_connection((host, int(port)), timeout=10)
        self.fh = self.sock.makefile("rb")

    def send_raw(self, data: bytes) -> None:
        self.sock.sendall(data)

    def send(self, frame: dict) -> None:
        self.send_raw(
            (json.dumps(frame, ensure_ascii=False, separators=(",", ":")) + "\n").encode()
        )

    def recv(self) -> dict:
        line = self.fh.readline()
        assert line, "connection closed unexpectedly"
        return json.loads(line.decode("utf-8"))

    def recv_raw(self) -> bytes:
        return self.fh.readline()

    def close(self):
        self.fh.close()
        self.sock.close()


@pytest.fixture()
def service(golden_model):
    with EotService(NgramScorer(golden_model), SessionConfig()) as svc:
        yield svc


def test_open_returns_fresh_ids(service):
    c = Client(service.address)
    c.send({"open": {}})
    assert c.recv() == {"opened": {"session": "s1"}}
    c.send({"open": {"tau": 0.1}})
    assert c.recv() == {"opened": {"session": "s2"}}
    c.close()


def test_push_streams_decisions_ending_in_end(service):
    c = Client(service.address)
    c.send({"open": {"tau": 0.2, "min_context": 1, "cooldown": 0}})
    sid = c.recv()["opened"]["session"]
    c.send({"push": {"session": sid, "text": "สวัสดีครับ"}})
    decisions = [c.recv()["decision"] for _ in range(7)]
    assert [d["boundary_index"] for d in decisions] == list(range(1, 8))
    assert decisions[-1]["verdict"] == "End"
    assert all(d["verdict"] == "NotEnd" for d in decisions[:-1])
    c.close()


def test_unknown_session_error(service):
    c = Client(service.address)
    c.send({"push": {"session": "nope", "text": "ก"}})
    reply = c.recv()
    assert reply["error"]["code"] == "no_such_session"
    c.close()


def test_malformed_frame_keeps_connection_open(service):
    c = Client(service.address)
    c.send_raw(b"not json at all\n")
    assert c.recv()["error"]["code"] == "bad_frame"
    c.send({"open": {}})
    assert c.recv() == {"opened": {"session": "s1"}}
    c.close()


def test_unknown_kind_and_bad_config(service):
    c = Client(service.address)
    c.send({"frobnicate": {}})
    assert c.recv()["error"]["code"] == "unknown_kind"
    c.send({"open": {"tau": 1.5}})
    assert c.recv()["error"]["code"] == "bad_config"
    c.send({"open": {"bogus_key": 1}})
    assert c.recv()["error"]["code"] == "bad_config"
    c.close()


def test_golden_transcript_replays_byte_identically(service):
    frames = (DATA / "service_golden_input.ndjson").read_bytes()
    expected = (DATA / "service_golden_output.ndjson").read_bytes()
    c = Client(service.address)
    c.send_raw(frames)
    received = bytearray()
    while len(received) < len(expected):
        line = c.recv_raw()
        assert line, "connection closed before full golden output"
        received.extend(line)
    assert bytes(received) == expected
    c.close()


def test_decisions_are_ordered_per_session(service):
    c = Client(service.address)
    c.send({"open": {"tau": 0.99, "min_context": 1}})
    sid = c.recv()["opened"]["session"]
    seen = []
    for chunk in ("สวัส", "ดีครับ", "นะ"):
        c.send({"push": {"session": sid, "text": chunk}})
    for _ in range(9):
        seen.append(c.recv()["decision"]["boundary_index"])
    assert seen == sorted(seen) and len(set(seen)) == len(seen)
    c.close()


def test_interleaved_sessions_are_isolated(service):
    # run the golden transcript for one session while a second session gets
    # unrelated traffic interleaved; the first session's decisions must not
    # change
    def run_solo():
        c = Client(service.address)
        c.send({"open": {"tau": 0.2, "min_context": 1, "cooldown": 0}})
        sid = c.recv()["opened"]["session"]
        out = []
        for chunk in ("สวัสดี", "ครับ"):
            c.send({"push": {"session": sid, "text": chunk}})
            while len(out) < (4 if chunk == "สวัสดี" else 7):
                out.append(c.recv()["decision"])
        c.close()
        return [(d["verdict"], d["p_end"], d["boundary_index"]) for d in out]

    reference = run_solo()

    c = Client(service.address)
    c.send({"open": {"tau": 0.2, "min_context": 1, "cooldown": 0}})
    a = c.recv()["opened"]["session"]
    c.send({"open": {"tau": 0.9, "min_context": 1, "cooldown": 0}})
    b = c.recv()["opened"]["session"]

    interleaved = []
    c.send({"push": {"session": a, "text": "สวัสดี"}})
    for _ in range(4):
        interleaved.append(c.recv()["decision"])
    c.send({"push": {"session": b, "text": "ไปไหนมา"}})  # 7 clusters
    for _ in range(7):
        d = c.recv()["decision"]
        assert d["session"] == b
    c.send({"push": {"session": a, "text": "ครับ"}})
    for _ in range(3):
        interleaved.append(c.recv()["decision"])
    c.close()

    assert [
        (d["verdict"], d["p_end"], d["boundary_index"]) for d in interleaved
    ] == reference


def test_concurrent_connections_have_independent_session_ids(service):
    c1, c2 = Client(service.address), Client(service.address)
    c1.send({"open": {}})
    c2.send({"open": {}})
    assert c1.recv() == {"opened": {"session": "s1"}}
    assert c2.recv() == {"opened": {"session": "s1"}}
    c1.close()
    c2.close()


def test_tau_zero_point_two_config_precedence(golden_model):
    # server default tau applies when open carries no override
    with EotService(NgramScorer(golden_model), SessionConfig(tau=0.2, min_context=1)) as svc:
        c = Client(svc.address)
        c.send({"open": {}})
        sid = c.recv()["opened"]["session"]
        c.send({"push": {"session": sid, "text": "สวัสดีครับ"}})
        decisions = [c.recv()["decision"] for _ in range(7)]
        assert decisions[-1]["verdict"] == "End"
        c.close()
