from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from tiny_checkpoint import STOP_TOKEN, build_checkpoint  # noqa: E402


@pytest.fixture(scope="session")
def checkpoint_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("ckpt")
    return str(build_checkpoint(out))


@pytest.fixture(scope="session")
def scorer(checkpoint_dir):
    from eot_adapter import AdapterConfig, StopTokenScorer

    return StopTokenScorer(
        AdapterConfig(checkpoint=checkpoint_dir, stop_token=STOP_TOKEN)
    )
