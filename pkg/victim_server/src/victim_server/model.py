"""Checkpoint loading and batched, deterministic inference."""

from __future__ import annotations

import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import torch
from transformers import AutoModelForSequenceClassification, AutoTokenizer


@dataclass(frozen=True)
class ModelRegistration:
    """What the server announces about the model it hosts."""

    model_id: str
    labels: tuple[str, ...]
    max_length: int
    can_embed: bool


class VictimModel:
    """A sequence classifier with a frozen label order.

    Inference is wrapped in `torch.inference_mode` on an `eval()` model, so
    repeated calls on the same input return identical rows. A lock serializes
    tokenization and forward passes (fast tokenizers are not thread-safe), so
    requests stay independent of arrival order and concurrent clients are
    safe.
    """

    def __init__(self, model_path: str | Path, device: str = "cpu",
                 max_length: int | None = None, batch_size: int = 32):
        torch.manual_seed(0)
        path = str(model_path)
        self._tokenizer = AutoTokenizer.from_pretrained(path)
        self._model = AutoModelForSequenceClassification.from_pretrained(path)
        self._model.to(device)
        self._model.eval()
        self._device = device
        self._batch_size = batch_size
        self._lock = threading.Lock()

        id2label = self._model.config.id2label
        labels = tuple(id2label[i] for i in sorted(id2label))
        limit = max_length or min(
            self._tokenizer.model_max_length,
            self._model.config.max_position_embeddings,
        )
        self.registration = ModelRegistration(
            model_id=Path(path).name or path,
            labels=labels,
            max_length=int(limit),
            can_embed=True,
        )

    @property
    def labels(self) -> tuple[str, ...]:
        return self.registration.labels

    def _truncated_flags(self, texts: Sequence[str]) -> list[bool]:
        # lengths with special tokens but without truncation, vs the limit
        full = self._tokenizer(list(texts), add_special_tokens=True)["input_ids"]
        return [len(ids) > self.registration.max_length for ids in full]

    def _encode(self, texts: Sequence[str]):
        return self._tokenizer(
            list(texts),
            padding=True,
            truncation=True,
            max_length=self.registration.max_length,
            return_tensors="pt",
        ).to(self._device)

    def predict(self, texts: Sequence[str]) -> tuple[list[list[float]], list[bool]]:
        """Probability rows aligned with `labels`, plus per-text truncation."""
        if not texts:
            return [], []
        rows: list[list[float]] = []
        with self._lock, torch.inference_mode():
            truncated = self._truncated_flags(texts)
            for start in range(0, len(texts), self._batch_size):
                enc = self._encode(texts[start : start + self._batch_size])
                logits = self._model(**enc).logits
                probs = torch.softmax(logits, dim=-1)
                rows.extend(probs.cpu().double().tolist())
        return rows, truncated

    def embed(self, texts: Sequence[str]) -> tuple[list[list[float]], list[bool]]:
        """Mean-pooled final-layer token embeddings (padding masked out)."""
        if not texts:
            return [], []
        vectors: list[list[float]] = []
        base = self._model.base_model
        with self._lock, torch.inference_mode():
            truncated = self._truncated_flags(texts)
            for start in range(0, len(texts), self._batch_size):
                enc = self._encode(texts[start : start + self._batch_size])
                hidden = base(**enc).last_hidden_state
                mask = enc["attention_mask"].unsqueeze(-1).to(hidden.dtype)
                pooled = (hidden * mask).sum(dim=1) / mask.sum(dim=1)
                vectors.extend(pooled.cpu().double().tolist())
        return vectors, truncated
