"""Greedy visual-substitution attack ordered by probability-weighted saliency.

One attack makes a single scoring pass: it measures every attackable unit's
saliency (probability drop when the unit is masked with an unknown token)
and the best probability drop any visual candidate achieves there, combines
them as H_i = softmax(S)_i * dP*_i, then substitutes positions in descending
H order until the predicted label flips. Ordering is static: scores are not
recomputed after substitutions, and a substituted position is never
revisited.

Query accounting, verified against a closed form on stub classifiers:
1 (original) + m (one mask per attackable unit) + sum of candidate-set sizes
+ one per substitution step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .candidates import DEFAULT_PRODUCT_CAP, CandidateSet, syllable_candidates, word_candidates
from .classifiers import Classifier, QueryCounter, predict_index
from .errors import BudgetExceededError, GlyphAdvError
from .segmentation import (
    Granularity,
    TokenizedText,
    detokenize,
    segment_syllables,
    segment_words,
    syllables_of,
)
from .similarity import SimilarityDB


@dataclass(frozen=True)
class AttackConfig:
    granularity: Granularity = Granularity.SYLLABLE
    unk_token: str = "[UNK]"
    max_query_budget: int | None = None
    max_substitution_ratio: float | None = None
    lexicon: frozenset[str] | None = None
    product_cap: int = DEFAULT_PRODUCT_CAP

    def __post_init__(self):
        if self.max_query_budget is not None and self.max_query_budget <= 0:
            raise ValueError("max_query_budget must be positive when set")
        if self.max_substitution_ratio is not None and not 0 < self.max_substitution_ratio <= 1:
            raise ValueError("max_substitution_ratio must be in (0, 1]")
        if not self.unk_token:
            raise ValueError("unk_token must be non-empty")


@dataclass(frozen=True)
class SubstitutionStep:
    position: int
    old: str
    new: str
    prob_before: float  # P(y|x) entering this step, y = original predicted label
    prob_after: float


@dataclass(frozen=True)
class PositionScore:
    position: int
    saliency: float
    softmax_weight: float
    best_surface: str | None  # None when the position has no candidates
    delta_p: float
    h: float


@dataclass(frozen=True)
class AttackResult:
    original_text: str
    adversarial_text: str
    success: bool
    original_label: str
    final_label: str
    trace: tuple[SubstitutionStep, ...]
    queries: int
    granularity: Granularity
    gold_label: str | None = None
    skipped: bool = False
    failure_reason: str | None = None
    position_scores: tuple[PositionScore, ...] = ()
    truncated_positions: tuple[int, ...] = ()


@dataclass(frozen=True)
class RunSummary:
    total: int
    skipped: int
    attacked: int
    succeeded: int
    failed: int
    total_queries: int


def _softmax(xs: Sequence[float]) -> list[float]:
    m = max(xs)
    exps = [math.exp(x - m) for x in xs]
    z = sum(exps)
    return [e / z for e in exps]


def tokenize_for(text: str, cfg: AttackConfig) -> TokenizedText:
    if cfg.granularity is Granularity.WORD:
        if cfg.lexicon is None:
            raise ValueError("word granularity requires a lexicon (AttackConfig.lexicon)")
        return segment_words(text, cfg.lexicon)
    return segment_syllables(text)


def candidates_for(db: SimilarityDB, surface: str, cfg: AttackConfig) -> CandidateSet:
    if cfg.granularity is Granularity.WORD:
        parts = syllables_of(surface)
        if not parts:
            return CandidateSet(original=surface, candidates=())
        return word_candidates(db, parts, original_surface=surface, product_cap=cfg.product_cap)
    return syllable_candidates(db, surface)


def saliency(
    clf: Classifier,
    tokens: TokenizedText,
    i: int,
    unk_token: str = "[UNK]",
    reference: tuple[int, float] | None = None,
) -> float:
    """S_i: drop of the predicted label's probability when unit i is masked.

    `reference` is an optional precomputed (label index, probability) pair
    for the unmasked text, so callers holding the original query can reuse it.
    """
    if reference is None:
        row = clf.query([detokenize(tokens)])[0]
        y = predict_index(row)
        p = row[y]
    else:
        y, p = reference
    masked = clf.query([detokenize(tokens.with_surface(i, unk_token))])[0]
    return p - masked[y]


def best_substitution(
    clf: Classifier,
    tokens: TokenizedText,
    i: int,
    cand: CandidateSet,
    reference: tuple[int, float] | None = None,
) -> tuple[str, float]:
    """The candidate causing the largest drop of the predicted label's
    probability at position i, with that drop (dP*). Empty candidate set
    returns the original surface and 0. Ties keep the first candidate in
    set order: higher visual score, then code-point order.
    """
    if not cand.candidates:
        return cand.original, 0.0
    if reference is None:
        row = clf.query([detokenize(tokens)])[0]
        y = predict_index(row)
        p = row[y]
    else:
        y, p = reference
    texts = [detokenize(tokens.with_surface(i, s)) for s, _ in cand.candidates]
    rows = clf.query(texts)
    deltas = [p - r[y] for r in rows]
    best = 0
    for k in range(1, len(deltas)):
        if deltas[k] > deltas[best]:
            best = k
    return cand.candidates[best][0], deltas[best]


def attack(
    clf: Classifier,
    text: str,
    db: SimilarityDB,
    cfg: AttackConfig | None = None,
    gold_label: str | None = None,
) -> AttackResult:
    """Attack one text. With `gold_label` set, a text the classifier already
    misclassifies is skipped (marked, 1 query) rather than attacked."""
    cfg = cfg or AttackConfig()
    counter = QueryCounter(clf, cfg.max_query_budget)
    labels = counter.labels
    tokens = tokenize_for(text, cfg)

    def result(**kw) -> AttackResult:
        base = dict(
            original_text=text,
            adversarial_text=text,
            success=False,
            original_label="",
            final_label="",
            trace=(),
            queries=counter.count,
            granularity=cfg.granularity,
            gold_label=gold_label,
        )
        base.update(kw)
        return AttackResult(**base)

    row0 = counter.query([text])[0]
    y = predict_index(row0)
    p0 = row0[y]
    orig_label = labels[y]
    if gold_label is not None and orig_label != gold_label:
        return result(
            original_label=orig_label,
            final_label=orig_label,
            skipped=True,
            failure_reason="already-misclassified",
        )

    units = tokens.attackable_units()
    m = len(units)
    if m == 0:
        return result(
            original_label=orig_label,
            final_label=orig_label,
            failure_reason="no-attackable-units",
        )

    current = tokens
    p_cur = p0
    steps: list[SubstitutionStep] = []
    position_scores: tuple[PositionScore, ...] = ()
    truncated: tuple[int, ...] = ()
    success = False
    final_label = orig_label
    reason: str | None = None

    try:
        masked = [detokenize(tokens.with_surface(u.index, cfg.unk_token)) for u in units]
        sal = [p0 - r[y] for r in counter.query(masked)]

        cand_sets = [candidates_for(db, u.surface, cfg) for u in units]
        truncated = tuple(u.index for u, cs in zip(units, cand_sets) if cs.truncated)
        best: list[str | None] = []
        deltas: list[float] = []
        for u, cs in zip(units, cand_sets):
            if not cs.candidates:
                best.append(None)
                deltas.append(0.0)
                continue
            surface, delta = best_substitution(counter, tokens, u.index, cs, reference=(y, p0))
            best.append(surface)
            deltas.append(delta)

        weights = _softmax(sal)
        hs = [w * d for w, d in zip(weights, deltas)]
        position_scores = tuple(
            PositionScore(
                position=u.index,
                saliency=sal[k],
                softmax_weight=weights[k],
                best_surface=best[k],
                delta_p=deltas[k],
                h=hs[k],
            )
            for k, u in enumerate(units)
        )

        order = [k for k in sorted(range(m), key=lambda k: (-hs[k], units[k].index))
                 if best[k] is not None]
        max_subs = m
        if cfg.max_substitution_ratio is not None:
            max_subs = math.floor(cfg.max_substitution_ratio * m)

        for k in order:
            if len(steps) >= max_subs:
                reason = "substitution-limit-reached"
                break
            pos = units[k].index
            candidate_tokens = current.with_surface(pos, best[k])
            row = counter.query([detokenize(candidate_tokens)])[0]
            steps.append(
                SubstitutionStep(
                    position=pos,
                    old=current.attackable_units()[k].surface,
                    new=best[k],
                    prob_before=p_cur,
                    prob_after=row[y],
                )
            )
            current = candidate_tokens
            p_cur = row[y]
            top = predict_index(row)
            if top != y:
                success = True
                final_label = labels[top]
                break
        if not success and reason is None:
            reason = "positions-exhausted"
    except BudgetExceededError:
        reason = "budget-exhausted"

    return result(
        adversarial_text=detokenize(current),
        success=success,
        original_label=orig_label,
        final_label=final_label,
        trace=tuple(steps),
        failure_reason=None if success else reason,
        position_scores=position_scores,
        truncated_positions=truncated,
    )


def replay_trace(res: AttackResult, lexicon: frozenset[str] | None = None) -> str:
    """Re-apply a result's trace to its original text; the outcome must equal
    the stored adversarial text (checked by callers/tests)."""
    if res.granularity is Granularity.WORD:
        if lexicon is None:
            raise ValueError("replaying a word-granularity trace requires the lexicon")
        tokens = segment_words(res.original_text, lexicon)
    else:
        tokens = segment_syllables(res.original_text)
    for step in res.trace:
        unit = next((u for u in tokens.units if u.attackable and u.index == step.position), None)
        if unit is None or unit.surface != step.old:
            raise GlyphAdvError(
                f"trace does not replay: position {step.position} holds "
                f"{unit.surface if unit else '<missing>'!r}, trace expects {step.old!r}"
            )
        tokens = tokens.with_surface(step.position, step.new)
    return detokenize(tokens)


def attack_corpus(
    clf: Classifier,
    samples: Sequence[tuple[str, str]],
    db: SimilarityDB,
    cfg: AttackConfig | None = None,
    on_result: Callable[[AttackResult], None] | None = None,
    jobs: int = 1,
) -> tuple[list[AttackResult], RunSummary]:
    """Attack (text, gold label) samples in order; already-misclassified
    texts are skipped. Results are independent of `jobs`."""
    cfg = cfg or AttackConfig()
    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=jobs) as pool:
            futures = [
                pool.submit(attack, clf, text, db, cfg, gold_label=label)
                for text, label in samples
            ]
            results = []
            for fut in futures:
                res = fut.result()
                results.append(res)
                if on_result:
                    on_result(res)
    else:
        results = []
        for text, label in samples:
            res = attack(clf, text, db, cfg, gold_label=label)
            results.append(res)
            if on_result:
                on_result(res)

    skipped = sum(1 for r in results if r.skipped)
    succeeded = sum(1 for r in results if r.success)
    attacked = len(results) - skipped
    summary = RunSummary(
        total=len(results),
        skipped=skipped,
        attacked=attacked,
        succeeded=succeeded,
        failed=attacked - succeeded,
        total_queries=sum(r.queries for r in results),
    )
    return results, summary
