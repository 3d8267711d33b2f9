"""Stop-token probability from a causal LM checkpoint.

The scorer loads any checkpoint `AutoModelForCausalLM` understands, runs a
single forward pass over the given text, and returns the next-token
probability of one configured stop token, normalized over the full
vocabulary (softmax, no sampling, no temperature). Which token marks end
of turn differs per model family, so it is required configuration rather
than a guess.
"""
from __future__ import annotations

import logging
import os
from dataclasses import dataclass
from pathlib import Path

log = logging.getLogger("eot_adapter")


class AdapterError(Exception):
    """Configuration or input the adapter cannot serve."""


@dataclass
class AdapterConfig:
    checkpoint: str
    stop_token: str
    device: str = "cpu"
    max_context: int = 512

    def validate(self) -> None:
        if not self.checkpoint:
            raise AdapterError("checkpoint is required")
        if not self.stop_token:
            raise AdapterError("stop_token is required")
        if self.max_context < 1:
            raise AdapterError(f"max_context must be >= 1, got {self.max_context}")


class StopTokenScorer:
    """Maps text -> P(stop token | text) for one loaded checkpoint."""

    def __init__(self, config: AdapterConfig):
        import torch
        from transformers import AutoModelForCausalLM, AutoTokenizer

        config.validate()
        self._torch = torch
        self.config = config
        self.tokenizer = AutoTokenizer.from_pretrained(config.checkpoint)
        self.model = AutoModelForCausalLM.from_pretrained(config.checkpoint)
        self.model.to(config.device)
        self.model.eval()

        vocab = self.tokenizer.get_vocab()
        if config.stop_token not in vocab:
            raise AdapterError(
                f"stop token {config.stop_token!r} is not in the checkpoint vocabulary"
            )
        self.stop_id = vocab[config.stop_token]

        model_limit = getattr(self.model.config, "max_position_embeddings", None)
        self.max_context = config.max_context
        if model_limit:
            self.max_context = min(self.max_context, int(model_limit))

        base = os.path.basename(str(Path(config.checkpoint)).rstrip("/")) or "checkpoint"
        self.name = f"adapter:{base}"

    def score(self, text: str) -> float:
        text = text.strip()
        if not text:
            raise AdapterError("text is empty after trimming")
        ids = self.tokenizer.encode(text, add_special_tokens=False)
        if not ids:
            raise AdapterError("text tokenized to zero tokens")
        if len(ids) > self.max_context:
            log.warning(
                "context truncated from the left: %d -> %d tokens",
                len(ids),
                self.max_context,
            )
            ids = ids[-self.max_context :]
        return self._score_ids(ids)

    def _score_ids(self, ids: list[int]) -> float:
        torch = self._torch
        input_ids = torch.tensor([ids], dtype=torch.long, device=self.config.device)
        with torch.inference_mode():
            logits = self.model(input_ids=input_ids).logits[0, -1]
            probs = torch.softmax(logits.double(), dim=-1)
        return float(probs[self.stop_id].item())
