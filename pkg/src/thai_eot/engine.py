"""Streaming session state machine.

Incoming transcript text is segmented into grapheme clusters; after each
appended cluster the engine evaluates the boundary: guard rules first
(minimum context, cooldown after an End), then the scorer, then the
threshold rule p_end >= tau.

If an incoming chunk starts with combining marks, they are absorbed into
the session's last cluster without re-evaluating that boundary, so decision
sequences are invariant under any chunking that splits the stream at
cluster boundaries.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

from .text import segment

log = logging.getLogger("thai_eot.engine")

VERDICT_END = "End"
VERDICT_NOT_END = "NotEnd"


class ConfigError(ValueError):
    pass


@dataclass
class SessionConfig:
    tau: float = 0.5
    min_context: int = 3
    cooldown: int = 1
    max_context: int = 512

    def validate(self) -> None:
        if not 0.0 <= self.tau <= 1.0:
            raise ConfigError(f"tau must be in [0,1], got {self.tau}")
        if self.min_context < 1:
            raise ConfigError("min_context must be >= 1")
        if self.cooldown < 0:
            raise ConfigError("cooldown must be >= 0")
        if self.max_context < self.min_context:
            raise ConfigError("max_context must be >= min_context")


@dataclass
class Decision:
    verdict: str
    p_end: float
    tau: float
    boundary_index: int
    guard: bool = False
    error: str | None = None
    scorer_time_s: float = 0.0
    engine_time_s: float = 0.0


@dataclass
class Session:
    """One streaming turn-detection session. Not safe for concurrent use."""

    cfg: SessionConfig
    _context: list[str] = field(default_factory=list)
    _turn_len: int = 0
    _boundary: int = 0
    _last_end: int | None = None
    _saw_end: bool = False

    def push_text(self, chunk: str, scorer) -> list[Decision]:
        """Append a transcript chunk; one Decision per completed cluster."""
        cfg = self.cfg
        if self._context:
            # re-segment the previous cluster together with the new chunk so
            # a leading combining mark merges instead of becoming a cluster
            merged = segment(self._context[-1] + chunk)
            self._context[-1] = merged[0]
            new_clusters = merged[1:]
        else:
            new_clusters = segment(chunk)

        decisions: list[Decision] = []
        for cluster in new_clusters:
            t0 = time.perf_counter()
            self._context.append(cluster)
            if len(self._context) > cfg.max_context:
                del self._context[0]
            self._boundary += 1
            self._turn_len += 1

            guard = self._turn_len < cfg.min_context or (
                self._last_end is not None
                and self._boundary - self._last_end < cfg.cooldown
            )
            p_end = 0.0
            error = None
            scorer_time = 0.0
            if not guard:
                context_text = "".join(self._context)
                s0 = time.perf_counter()
                try:
                    p_end = float(scorer.score(context_text))
                except Exception as exc:  # fail open: keep listening
                    error = str(exc)
                    p_end = 0.0
                scorer_time = time.perf_counter() - s0
            verdict = (
                VERDICT_END if error is None and not guard and p_end >= cfg.tau
                else VERDICT_NOT_END
            )
            if verdict == VERDICT_END:
                self._last_end = self._boundary
                self._saw_end = True
            engine_time = (time.perf_counter() - t0) - scorer_time
            decisions.append(
                Decision(
                    verdict=verdict,
                    p_end=p_end,
                    tau=cfg.tau,
                    boundary_index=self._boundary,
                    guard=guard,
                    error=error,
                    scorer_time_s=scorer_time,
                    engine_time_s=engine_time,
                )
            )
        return decisions

    def reset_after_end(self) -> "Session":
        """Clear the context after a detected End; the next turn starts fresh.

        The boundary counter keeps running so boundary_index stays monotone
        across turns. Without a prior End this is a no-op with a warning.
        """
        if not self._saw_end:
            log.warning("reset_after_end called with no prior End decision; ignoring")
            return self
        self._context.clear()
        self._turn_len = 0
        return self

    @property
    def context_text(self) -> str:
        return "".join(self._context)

    @property
    def boundary_index(self) -> int:
        return self._boundary


def open_session(cfg: SessionConfig | None = None) -> Session:
    cfg = cfg or SessionConfig()
    cfg.validate()
    return Session(cfg=cfg)
