"""Shared test helpers: stub classifiers and hand-built databases."""

from __future__ import annotations

import hashlib
from typing import Sequence

from glyphadv import SimilarityDB
from glyphadv.similarity import DBHeader


def make_hand_db(
    entries: dict[str, Sequence[tuple[str, float]]], threshold: float = 0.8
) -> SimilarityDB:
    """A database built directly from a neighbor mapping (no rendering)."""
    header = DBHeader(
        font_name="hand-built",
        font_sha256="0" * 64,
        font_size_px=50,
        canvas_width=1,
        canvas_height=1,
        pen_x=0,
        pen_y=0,
        threshold=threshold,
        inventory_size=len(entries),
    )
    return SimilarityDB(
        header=header, entries={k: tuple(v) for k, v in entries.items()}
    )


class TableClassifier:
    """Stub classifier: exact text -> probability row, with a default row.

    Deterministic and thread-safe; used to hand-script attack scenarios.
    """

    def __init__(
        self,
        labels: Sequence[str],
        table: dict[str, Sequence[float]],
        default: Sequence[float] | None = None,
    ):
        self._labels = tuple(labels)
        self._table = {k: list(v) for k, v in table.items()}
        self._default = list(default) if default is not None else None

    @property
    def labels(self) -> tuple[str, ...]:
        return self._labels

    def query(self, texts: Sequence[str]) -> list[list[float]]:
        rows = []
        for t in texts:
            if t in self._table:
                rows.append(list(self._table[t]))
            elif self._default is not None:
                rows.append(list(self._default))
            else:
                raise KeyError(f"stub classifier has no row for {t!r}")
        return rows


class HashClassifier:
    """Deterministic pseudo-random classifier: rows derived from sha256(text)."""

    def __init__(self, labels: Sequence[str] = ("A", "B"), salt: str = ""):
        self._labels = tuple(labels)
        self._salt = salt

    @property
    def labels(self) -> tuple[str, ...]:
        return self._labels

    def query(self, texts: Sequence[str]) -> list[list[float]]:
        rows = []
        for t in texts:
            h = hashlib.sha256((self._salt + t).encode("utf-8")).digest()
            weights = [1 + h[i % len(h)] for i in range(len(self._labels))]
            z = sum(weights)
            rows.append([w / z for w in weights])
        return rows
