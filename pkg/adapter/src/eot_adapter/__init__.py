"""Sidecar serving a causal LM's stop-token probability as an EOT scorer."""

__version__ = "0.1.0"

from .adapter import AdapterConfig, AdapterError, StopTokenScorer  # noqa: F401
from .server import AdapterServer  # noqa: F401
