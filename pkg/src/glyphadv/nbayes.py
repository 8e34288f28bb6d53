"""Built-in bag-of-syllables classifier for self-contained pipelines.

Multinomial naive Bayes over syllable unigrams with add-one smoothing and a
shared out-of-vocabulary bucket: P(t|c) = (count+1) / (N_c + |V| + 1), and
any unseen token maps to the bucket with probability 1 / (N_c + |V| + 1).
Tokens come from syllable segmentation, so masking a unit with a non-script
string like "[UNK]" removes it from the token stream entirely: the mask
behaves as leave-one-out deletion, a valid "unknown" for this model.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Iterable, Sequence

from .classifiers import predict_index
from .errors import InputError
from .segmentation import segment_syllables

MODEL_FORMAT = "glyphadv-nbayes"
MODEL_VERSION = 1


def _tokens(text: str) -> list[str]:
    return segment_syllables(text).attackable_surfaces()


class NaiveBayesClassifier:
    def __init__(
        self,
        labels: Sequence[str],
        doc_counts: dict[str, int],
        token_counts: dict[str, dict[str, int]],
        total_tokens: dict[str, int],
        vocab_size: int,
    ):
        self._labels = tuple(labels)
        self._doc_counts = doc_counts
        self._token_counts = token_counts
        self._total_tokens = total_tokens
        self._vocab_size = vocab_size
        total_docs = sum(doc_counts.values())
        self._log_prior = {c: math.log(doc_counts[c] / total_docs) for c in self._labels}
        # log((count+1) / (N_c + |V| + 1)); unseen tokens share one bucket
        self._log_cond = {}
        self._log_oov = {}
        for c in self._labels:
            denom = self._total_tokens[c] + vocab_size + 1
            self._log_cond[c] = {
                t: math.log((n + 1) / denom) for t, n in token_counts[c].items()
            }
            self._log_oov[c] = math.log(1 / denom)

    @property
    def labels(self) -> tuple[str, ...]:
        return self._labels

    @classmethod
    def train(cls, samples: Iterable[tuple[str, str]]) -> "NaiveBayesClassifier":
        doc_counts: dict[str, int] = {}
        token_counts: dict[str, dict[str, int]] = {}
        vocab: set[str] = set()
        n = 0
        for text, label in samples:
            n += 1
            doc_counts[label] = doc_counts.get(label, 0) + 1
            per = token_counts.setdefault(label, {})
            for tok in _tokens(text):
                per[tok] = per.get(tok, 0) + 1
                vocab.add(tok)
        if n == 0:
            raise InputError("training corpus is empty")
        if len(doc_counts) < 2:
            raise InputError("training corpus must contain at least 2 classes")
        labels = tuple(sorted(doc_counts))
        total_tokens = {c: sum(token_counts.get(c, {}).values()) for c in labels}
        return cls(
            labels=labels,
            doc_counts=doc_counts,
            token_counts={c: token_counts.get(c, {}) for c in labels},
            total_tokens=total_tokens,
            vocab_size=len(vocab),
        )

    def query(self, texts: Sequence[str]) -> list[list[float]]:
        rows = []
        for text in texts:
            toks = _tokens(text)
            scores = []
            for c in self._labels:
                cond = self._log_cond[c]
                oov = self._log_oov[c]
                s = self._log_prior[c]
                for t in toks:
                    s += cond.get(t, oov)
                scores.append(s)
            m = max(scores)
            exps = [math.exp(s - m) for s in scores]
            z = sum(exps)
            rows.append([e / z for e in exps])
        return rows

    def accuracy(self, samples: Sequence[tuple[str, str]]) -> float:
        if not samples:
            raise InputError("no samples to score")
        rows = self.query([t for t, _ in samples])
        hits = 0
        for (_, label), row in zip(samples, rows):
            if self._labels[predict_index(row)] == label:
                hits += 1
        return hits / len(samples)

    def save(self, path: str | Path) -> None:
        payload = {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "labels": list(self._labels),
            "doc_counts": self._doc_counts,
            "token_counts": self._token_counts,
            "total_tokens": self._total_tokens,
            "vocab_size": self._vocab_size,
        }
        Path(path).write_text(
            json.dumps(payload, ensure_ascii=False, separators=(",", ":")), encoding="utf-8"
        )

    @classmethod
    def load(cls, path: str | Path) -> "NaiveBayesClassifier":
        try:
            payload = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read model file {path}: {exc}") from exc
        if payload.get("format") != MODEL_FORMAT or payload.get("version") != MODEL_VERSION:
            raise InputError(f"{path}: not a recognized built-in model file")
        return cls(
            labels=payload["labels"],
            doc_counts=payload["doc_counts"],
            token_counts=payload["token_counts"],
            total_tokens=payload["total_tokens"],
            vocab_size=payload["vocab_size"],
        )
