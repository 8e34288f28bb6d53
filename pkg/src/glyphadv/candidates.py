"""Substitution candidate sets for syllables and words.

A syllable's candidates are exactly its database neighbors. A word's
candidates come from the Cartesian product of its syllables' neighbor sets
(each extended with the unchanged syllable at score 1); a product tuple is
kept when its composite score, the product of per-syllable scores, lies
strictly inside (threshold, 1). The all-identity tuple scores exactly 1 and
is thereby excluded, so every candidate differs from the original.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

from .segmentation import TSHEG
from .similarity import SimilarityDB

DEFAULT_PRODUCT_CAP = 10_000


@dataclass(frozen=True)
class CandidateSet:
    original: str
    candidates: tuple[tuple[str, float], ...]  # (surface, composite score), sorted
    truncated: bool = False

    def __len__(self) -> int:
        return len(self.candidates)

    def surfaces(self) -> list[str]:
        return [s for s, _ in self.candidates]


def syllable_candidates(db: SimilarityDB, syllable: str) -> CandidateSet:
    """The database neighbor list, verbatim."""
    return CandidateSet(original=syllable, candidates=db.query(syllable))


def word_candidates(
    db: SimilarityDB,
    syllables: Sequence[str],
    original_surface: str | None = None,
    product_cap: int = DEFAULT_PRODUCT_CAP,
) -> CandidateSet:
    """Candidates for a word given as its syllable sequence.

    Kept tuples are joined with tsheg. When the raw product would exceed
    `product_cap` tuples, each syllable's neighbor list is cut to its top k,
    with k shrunk until the product fits, and the result is flagged
    truncated. Ordering: score descending, then fewer changed syllables,
    then code-point order.
    """
    if not syllables:
        raise ValueError("a word needs at least one syllable")
    if product_cap < 1:
        raise ValueError("product_cap must be >= 1")
    original = original_surface if original_surface is not None else TSHEG.join(syllables)
    threshold = db.header.threshold

    neighbor_lists = [db.query(s) for s in syllables]
    max_k = max((len(nl) for nl in neighbor_lists), default=0)
    k = max_k
    while k > 0 and math.prod(1 + min(len(nl), k) for nl in neighbor_lists) > product_cap:
        k -= 1
    truncated = k < max_k

    # per-syllable options: (surface, score, changed flag); identity first
    options = [
        [(s, 1.0, 0)] + [(t, sc, 1) for t, sc in nl[:k]]
        for s, nl in zip(syllables, neighbor_lists)
    ]

    kept: list[tuple[str, float, int]] = []
    for combo in itertools.product(*options):
        score = math.prod(part[1] for part in combo)
        if not threshold < score < 1.0:
            continue
        surface = TSHEG.join(part[0] for part in combo)
        changed = sum(part[2] for part in combo)
        kept.append((surface, score, changed))

    kept.sort(key=lambda t: (-t[1], t[2], t[0]))
    return CandidateSet(
        original=original,
        candidates=tuple((surf, sc) for surf, sc, _ in kept),
        truncated=truncated,
    )
