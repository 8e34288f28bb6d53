"""Black-box classifier protocol, query accounting, and HTTP transport.

A classifier exposes an ordered label list and maps a batch of texts to
probability rows aligned with that list. The attack engine only ever sees
this protocol, so in-process models and remote services are interchangeable.
"""

from __future__ import annotations

import threading
from typing import Protocol, Sequence, runtime_checkable

import requests

from .errors import BudgetExceededError, ClassifierError

PROB_SUM_TOLERANCE = 1e-6


@runtime_checkable
class Classifier(Protocol):
    @property
    def labels(self) -> tuple[str, ...]: ...

    def query(self, texts: Sequence[str]) -> list[list[float]]: ...


def predict_index(probs: Sequence[float]) -> int:
    """Argmax with first-wins tie-breaking."""
    return max(range(len(probs)), key=lambda i: (probs[i], -i))


def validate_rows(
    rows: list[list[float]], n_texts: int, n_labels: int, source: str
) -> list[list[float]]:
    if len(rows) != n_texts:
        raise ClassifierError(f"{source}: {n_texts} texts sent, {len(rows)} rows returned")
    for i, row in enumerate(rows):
        if len(row) != n_labels:
            raise ClassifierError(
                f"{source}: row {i} has {len(row)} probabilities, expected {n_labels}"
            )
        total = sum(row)
        if abs(total - 1.0) > PROB_SUM_TOLERANCE:
            raise ClassifierError(f"{source}: row {i} sums to {total!r}, not 1")
    return rows


class QueryCounter:
    """Wraps a classifier, counting one query per text and enforcing a budget.

    The check happens before a batch is forwarded: if submitting it would
    push the count past the budget, the batch is refused whole.
    """

    def __init__(self, inner: Classifier, budget: int | None = None):
        if budget is not None and budget <= 0:
            raise ValueError("budget must be positive when set")
        self._inner = inner
        self._budget = budget
        self.count = 0

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(self._inner.labels)

    def query(self, texts: Sequence[str]) -> list[list[float]]:
        if self._budget is not None and self.count + len(texts) > self._budget:
            raise BudgetExceededError(self._budget, self.count, len(texts))
        rows = self._inner.query(texts)
        self.count += len(texts)
        return rows


class HTTPClassifier:
    """JSON-over-HTTP client for the classifier protocol.

    Handshake: GET {base}/labels -> {"labels": [...]}. Prediction:
    POST {base}/predict {"texts": [...]} -> {"labels": [...], "probs": [[...]]}
    where probs rows align with the handshake label order. An /embed endpoint
    with {"texts": [...]} -> {"vectors": [[...]]} serves semantic similarity
    when available.
    """

    def __init__(self, base_url: str, timeout: float = 60.0):
        self._base = base_url.rstrip("/")
        self._timeout = timeout
        self._local = threading.local()
        payload = self._get("/labels")
        labels = payload.get("labels")
        if not isinstance(labels, list) or not all(isinstance(x, str) for x in labels):
            raise ClassifierError(f"{self._base}/labels: malformed label list")
        self._labels: tuple[str, ...] = tuple(labels)

    @property
    def labels(self) -> tuple[str, ...]:
        return self._labels

    def _session(self) -> requests.Session:
        # requests sessions are not thread-safe; keep one per thread
        sess = getattr(self._local, "session", None)
        if sess is None:
            sess = requests.Session()
            self._local.session = sess
        return sess

    def _get(self, route: str) -> dict:
        try:
            resp = self._session().get(self._base + route, timeout=self._timeout)
            resp.raise_for_status()
            return resp.json()
        except (requests.RequestException, ValueError) as exc:
            raise ClassifierError(f"GET {self._base}{route} failed: {exc}") from exc

    def _post(self, route: str, payload: dict) -> dict:
        try:
            resp = self._session().post(self._base + route, json=payload, timeout=self._timeout)
            resp.raise_for_status()
            return resp.json()
        except (requests.RequestException, ValueError) as exc:
            raise ClassifierError(f"POST {self._base}{route} failed: {exc}") from exc

    def query(self, texts: Sequence[str]) -> list[list[float]]:
        if not texts:
            return []
        payload = self._post("/predict", {"texts": list(texts)})
        if payload.get("labels") is not None and tuple(payload["labels"]) != self._labels:
            raise ClassifierError(
                f"{self._base}/predict: label order changed between handshake and prediction"
            )
        probs = payload.get("probs")
        if not isinstance(probs, list):
            raise ClassifierError(f"{self._base}/predict: missing probs")
        rows = [[float(p) for p in row] for row in probs]
        return validate_rows(rows, len(texts), len(self._labels), f"{self._base}/predict")

    def embed(self, texts: Sequence[str]) -> list[list[float]]:
        if not texts:
            return []
        payload = self._post("/embed", {"texts": list(texts)})
        vectors = payload.get("vectors")
        if not isinstance(vectors, list) or len(vectors) != len(texts):
            raise ClassifierError(f"{self._base}/embed: malformed vectors")
        return [[float(v) for v in vec] for vec in vectors]
