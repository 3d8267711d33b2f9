#!/usr/bin/env python3
"""Regenerate the frozen test fixtures in tests/data/.

Run from the repo root after an intentional change to the model format,
the service wire format, or the golden corpus. Tests compare against the
committed bytes, so regenerating is a deliberate act.
"""
from __future__ import annotations

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))
sys.path.insert(0, str(ROOT / "tests"))

from thai_eot import ngram  # noqa: E402
from thai_eot.engine import SessionConfig  # noqa: E402
from thai_eot.scorer import NgramScorer  # noqa: E402
from thai_eot.service import _ConnectionState, EotService  # noqa: E402

GOLDEN_SENTENCES = [
    "สวัสดีครับ",
    "ไปไหนมาครับ",
    "กินข้าวหรือยังครับ",
    "วันนี้อากาศดีนะ",
    "ขอบคุณมากค่ะ",
    "เดี๋ยวเจอกันนะ",
    "ช่วยเปิดบัญชีให้หน่อยครับ",
    "ไม่เป็นไรค่ะ",
]

GOLDEN_FRAMES = [
    {"open": {"tau": 0.2, "min_context": 1, "cooldown": 0}},
    {"push": {"session": "s1", "text": "สวัสดี"}},
    {"push": {"session": "s1", "text": "ครับ"}},
    {"reset": {"session": "s1"}},
    {"open": {"tau": 0.2, "min_context": 3}},
    {"push": {"session": "s2", "text": "ไปไหนมาครับ"}},
    {"push": {"session": "sX", "text": "ก"}},
    {"close": {"session": "s2"}},
    {"push": {"session": "s2", "text": "ก"}},
]


def main() -> None:
    data = ROOT / "tests" / "data"
    data.mkdir(parents=True, exist_ok=True)

    model = ngram.train_ngram(GOLDEN_SENTENCES, k=4, alpha=0.1)
    model.save(data / "golden_model.json")

    # replay the golden frame sequence through a connection state (the same
    # code path the TCP handler uses) and record the reply bytes
    service = EotService(NgramScorer(model), SessionConfig())
    try:
        state = _ConnectionState(service)
        replies = bytearray()
        for frame in GOLDEN_FRAMES:
            for reply in state.handle_frame(frame):
                replies.extend(reply)
    finally:
        service.stop()

    with open(data / "service_golden_input.ndjson", "w", encoding="utf-8") as fh:
        for frame in GOLDEN_FRAMES:
            fh.write(json.dumps(frame, ensure_ascii=False, separators=(",", ":")) + "\n")
    (data / "service_golden_output.ndjson").write_bytes(bytes(replies))
    print(f"wrote goldens to {data}")


if __name__ == "__main__":
    main()
