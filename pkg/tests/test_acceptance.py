"""Acceptance gate: one test per shipped guarantee, run with `pytest -v`.

Each test states its tolerance inline and checks the production code against
an independent oracle (brute-force recomputation, hand-worked numbers, or a
closed-form count). The final test exercises the full-scale reproduction
against a served victim model and skips, with an explanation, when that
infrastructure is not configured.
"""

from __future__ import annotations

import math
import os
import time
from math import fsum

import numpy as np
import pytest

from glyphadv import (
    AttackConfig,
    FontRenderer,
    NaiveBayesClassifier,
    attack,
    attack_corpus,
    build_db,
    evaluate_run,
    export_benchmark,
    levenshtein,
    load_benchmark,
    ncc,
    replay_trace,
    save_db,
    visual_similarity,
)
from glyphadv import devfont
from glyphadv.attack import AttackResult
from glyphadv.classifiers import predict_index
from glyphadv.segmentation import Granularity, detokenize, segment_syllables

from support import TableClassifier, make_hand_db

T = "་"


def pearson_pixels(a: np.ndarray, b: np.ndarray) -> float:
    """Brute-force pixel correlation via fsum, independent of the kernel."""
    xs = [float(v) for v in a.ravel()]
    ys = [float(v) for v in b.ravel()]
    if xs == ys:
        return 1.0
    mx, my = fsum(xs) / len(xs), fsum(ys) / len(ys)
    num = fsum((x - mx) * (y - my) for x, y in zip(xs, ys))
    den = math.sqrt(fsum((x - mx) ** 2 for x in xs) * fsum((y - my) ** 2 for y in ys))
    return 0.0 if den == 0.0 else num / den


# --- similarity score kernel --------------------------------------------------------

def test_score_kernel_against_pixel_oracle():
    """Self-similarity, exact symmetry, and the hand-worked 2x2 value."""
    rng = np.random.default_rng(20240817)
    for k in range(100):
        h, w = int(rng.integers(2, 16)), int(rng.integers(2, 16))
        a = rng.integers(0, 256, size=(h, w)).astype(np.float64)
        if np.ptp(a) == 0.0:  # non-constant bitmaps only
            a[0, 0] += 1.0
        assert ncc(a, a.copy()) == pytest.approx(1.0, abs=1e-12)
        b = rng.integers(0, 256, size=(h, w)).astype(np.float64)
        assert ncc(a, b) == ncc(b, a)  # bitwise, not approximate
        assert ncc(a, b) == pytest.approx(pearson_pixels(a, b), abs=1e-12)

    two_a = np.array([[0, 255], [0, 0]], dtype=np.float64)
    two_b = np.array([[255, 0], [0, 0]], dtype=np.float64)
    assert ncc(two_a, two_b) == pytest.approx(-1.0 / 3.0, abs=1e-12)
    assert pearson_pixels(two_a, two_b) == pytest.approx(-1.0 / 3.0, abs=1e-12)


# --- database correctness and build speed --------------------------------------------

@pytest.fixture(scope="module")
def big_build(renderer):
    inventory = devfont.inventory(500)
    t0 = time.perf_counter()
    db = build_db(inventory, renderer)
    elapsed = time.perf_counter() - t0
    return inventory, db, elapsed


def test_database_matches_naive_two_loop_recomputation(big_build, renderer):
    """500 syllables: stored neighbor sets and scores equal a pairwise rescan."""
    inventory, db, _ = big_build
    bitmaps = renderer.render_shared(inventory)
    arrays = [bm.to_array() for bm in bitmaps]
    raw = [bm.pixels for bm in bitmaps]

    expected: dict[str, dict[str, float]] = {s: {} for s in inventory}
    n = len(inventory)
    for i in range(n):
        for j in range(i + 1, n):
            if raw[i] == raw[j]:
                continue  # pixel-identical pairs are excluded by definition
            score = ncc(arrays[i], arrays[j])
            if 0.8 < score < 1.0:
                expected[inventory[i]][inventory[j]] = score
                expected[inventory[j]][inventory[i]] = score

    assert set(db.entries) == set(inventory)
    for s in inventory:
        got = dict(db.query(s))
        assert set(got) == set(expected[s]), s
        for t, score in expected[s].items():
            assert got[t] == pytest.approx(score, abs=1e-9)
        # strict band and symmetry for every stored pair
        for t, score in got.items():
            assert 0.8 < score < 1.0
            assert dict(db.query(t))[s] == score


def test_database_rebuild_is_byte_identical(big_build, renderer, tmp_path):
    inventory, db, _ = big_build
    first, second = tmp_path / "first.jsonl", tmp_path / "second.jsonl"
    save_db(db, first)
    save_db(build_db(inventory, renderer), second)
    assert first.read_bytes() == second.read_bytes()


def test_database_build_completes_in_time(big_build):
    """124,750 scored pairs through the precomputed-vector path, under 10 s."""
    inventory, db, elapsed = big_build
    assert len(inventory) == 500
    assert sum(len(v) for v in db.entries.values()) > 0
    assert elapsed < 10.0, f"500-syllable build took {elapsed:.2f}s"


# --- edit distance --------------------------------------------------------------------

def test_edit_distance_against_quadratic_reference():
    """1,000 random pairs vs the full-matrix DP, plus the metric axioms."""

    def reference(a: str, b: str) -> int:
        d = [[0] * (len(b) + 1) for _ in range(len(a) + 1)]
        for i in range(len(a) + 1):
            d[i][0] = i
        for j in range(len(b) + 1):
            d[0][j] = j
        for i in range(1, len(a) + 1):
            for j in range(1, len(b) + 1):
                d[i][j] = min(
                    d[i - 1][j] + 1,
                    d[i][j - 1] + 1,
                    d[i - 1][j - 1] + (a[i - 1] != b[j - 1]),
                )
        return d[len(a)][len(b)]

    rng = np.random.default_rng(42)
    alphabet = list("ཀཁགངཅཆ་ abxyz")
    pairs = []
    for _ in range(1000):
        a = "".join(rng.choice(alphabet, size=int(rng.integers(0, 13))))
        b = "".join(rng.choice(alphabet, size=int(rng.integers(0, 13))))
        pairs.append((a, b))
    for a, b in pairs:
        d = levenshtein(a, b)
        assert d == reference(a, b)
        # axioms: identity, symmetry, non-negativity with tight bounds
        assert (d == 0) == (a == b)
        assert d == levenshtein(b, a)
        assert abs(len(a) - len(b)) <= d <= max(len(a), len(b))
    for (a, b), (_, c) in zip(pairs[:200], pairs[200:400]):
        assert levenshtein(a, c) <= levenshtein(a, b) + levenshtein(b, c)


# --- attack scoring oracle ------------------------------------------------------------

def test_attack_scoring_matches_hand_computation():
    """S, dP*, softmax(S), H, substitution order, and query accounting.

    Worked example: S=(0.3, 0.1) and dP*=(0.2, 0.4) give softmax weights
    (0.549834, 0.450166), H=(0.109967, 0.180066), so the second position is
    substituted first. The classifier table lists every text the engine may
    query; an unexpected query raises KeyError and fails the test.
    """
    ka, kha, ga, nga = "ཀ", "ཁ", "ག", "ང"
    db = make_hand_db({ka: [(ga, 0.9)], kha: [(nga, 0.9)]})
    clf = TableClassifier(
        ("A", "B"),
        {
            f"{ka}{T}{kha}": [0.9, 0.1],
            f"[UNK]{T}{kha}": [0.6, 0.4],
            f"{ka}{T}[UNK]": [0.8, 0.2],
            f"{ga}{T}{kha}": [0.7, 0.3],
            f"{ka}{T}{nga}": [0.5, 0.5],
            f"{ga}{T}{nga}": [0.3, 0.7],
        },
    )
    res = attack(clf, f"{ka}{T}{kha}", db)
    scores = {ps.position: ps for ps in res.position_scores}
    assert scores[0].saliency == pytest.approx(0.3, abs=1e-12)
    assert scores[1].saliency == pytest.approx(0.1, abs=1e-12)
    assert scores[0].delta_p == pytest.approx(0.2, abs=1e-12)
    assert scores[1].delta_p == pytest.approx(0.4, abs=1e-12)
    assert scores[0].softmax_weight == pytest.approx(0.549834, abs=1e-6)
    assert scores[1].softmax_weight == pytest.approx(0.450166, abs=1e-6)
    assert scores[0].h == pytest.approx(0.109967, abs=1e-6)
    assert scores[1].h == pytest.approx(0.180066, abs=1e-6)
    assert [s.position for s in res.trace] == [1, 0]
    assert res.success and res.adversarial_text == f"{ga}{T}{nga}"
    # closed form: 1 original + 2 masks + (1 + 1) candidates + 2 steps
    assert res.queries == 7

    # three positions, mixed candidate counts (2, 0, 1), no flip anywhere:
    # the closed form still has to hold with an empty candidate set inside
    texts = {f"{ka}{T}{kha}{T}{ga}": [0.9, 0.1]}
    for masked in (f"[UNK]{T}{kha}{T}{ga}", f"{ka}{T}[UNK]{T}{ga}", f"{ka}{T}{kha}{T}[UNK]"):
        texts[masked] = [0.8, 0.2]
    for candidate in (f"{nga}{T}{kha}{T}{ga}", f"{ga}{T}{kha}{T}{ga}", f"{ka}{T}{kha}{T}{nga}"):
        texts[candidate] = [0.7, 0.3]
    texts[f"{nga}{T}{kha}{T}{nga}"] = [0.6, 0.4]  # after both substitutions
    db3 = make_hand_db({ka: [(nga, 0.9), (ga, 0.85)], kha: [], ga: [(nga, 0.88)]})
    res3 = attack(TableClassifier(("A", "B"), texts), f"{ka}{T}{kha}{T}{ga}", db3)
    assert not res3.success
    # 1 original + 3 masks + (2 + 0 + 1) candidates + 2 steps (position
    # without candidates is never substituted)
    assert len(res3.trace) == 2
    assert res3.queries == 1 + 3 + 3 + 2


# --- end-to-end desk scale ------------------------------------------------------------

def desk_alphabet() -> list[list[str]]:
    """100 renderable syllables as 20 families of 5 look-alike members:
    8 bare consonant groups plus 6 groups x 2 vowel signs."""
    groups = devfont.consonant_groups()[:8]
    families = [list(g) for g in groups]
    for v in ("ི", "ུ"):
        for g in groups[:6]:
            families.append([c + v for c in g])
    return families


def desk_db(families):
    """Hand-built neighbor lists: same-family members at 0.95 - 0.01*|i-j|."""
    entries = {}
    for fam in families:
        for i, s in enumerate(fam):
            entries[s] = [
                (t, 0.95 - 0.01 * abs(i - j)) for j, t in enumerate(fam) if j != i
            ]
    return make_hand_db(entries, threshold=0.8)


def desk_corpus(families, n=220, seed=12):
    """Two classes split by family member: A draws members 0-1, B members 3-4.

    Same-family neighbors then cross the class boundary, so a visually tiny
    substitution can carry a text over it.
    """
    rng = np.random.default_rng(seed)
    samples = []
    for i in range(n):
        label = "A" if i % 2 == 0 else "B"
        members = (0, 1) if label == "A" else (3, 4)
        k = int(rng.integers(5, 16))
        syls = [
            families[int(rng.integers(0, len(families)))][int(rng.choice(members))]
            for _ in range(k)
        ]
        samples.append((T.join(syls), label))
    return samples


def test_end_to_end_desk_scale_attack(renderer):
    """Built-in classifier, hand-built database, 220 texts: attacks must flip,
    substitute only database neighbors, replay exactly, and beat a random
    same-position substitution baseline on visual similarity."""
    families = desk_alphabet()
    alphabet = [s for fam in families for s in fam]
    assert len(alphabet) == len(set(alphabet)) == 100

    db = desk_db(families)
    samples = desk_corpus(families)
    assert len(samples) >= 200
    assert all(5 <= len(segment_syllables(t).attackable_surfaces()) <= 15 for t, _ in samples)

    clf = NaiveBayesClassifier.train(samples)
    results, summary = attack_corpus(clf, samples, db)
    successes = [r for r in results if r.success]
    assert summary.succeeded >= 1
    assert summary.succeeded == len(successes)

    rng = np.random.default_rng(99)
    attack_vs: list[float] = []
    baseline_vs: list[float] = []
    for r in successes:
        # (a) the adversarial text flips the argmax label on a fresh query
        row = clf.query([r.adversarial_text])[0]
        assert clf.labels[predict_index(row)] == r.final_label != r.original_label
        # (b) every substitution is a database neighbor of what it replaced
        for step in r.trace:
            assert step.new in {t for t, _ in db.query(step.old)}
        # (c) the trace alone reproduces the adversarial text
        assert replay_trace(r) == r.adversarial_text
        # (d) collect visual similarity against a random baseline that swaps
        # the same positions with arbitrary alphabet syllables
        attack_vs.append(visual_similarity(r.original_text, r.adversarial_text, renderer))
        tokens = segment_syllables(r.original_text)
        for step in r.trace:
            choices = [s for s in alphabet if s != step.old]
            tokens = tokens.with_surface(step.position, choices[int(rng.integers(0, len(choices)))])
        baseline_vs.append(visual_similarity(r.original_text, detokenize(tokens), renderer))

    mean_attack = sum(attack_vs) / len(attack_vs)
    mean_baseline = sum(baseline_vs) / len(baseline_vs)
    assert mean_attack > mean_baseline, (mean_attack, mean_baseline)


# --- benchmark export boundary ----------------------------------------------------------

def test_benchmark_boundary_and_roundtrip(tmp_path):
    """Keep rel distance strictly below 0.1; the written file loads back equal."""

    def result(original, adversarial):
        return AttackResult(
            original_text=original,
            adversarial_text=adversarial,
            success=True,
            original_label="A",
            final_label="B",
            trace=(),
            queries=1,
            granularity=Granularity.SYLLABLE,
            gold_label="A",
        )

    ten = "ཀཁགངཅཆཇཉཏཐ"
    twenty = ten * 2
    results = [
        result(ten, "མ" + ten[1:]),  # 1/10 == 0.1: excluded
        result(twenty, "མ" + twenty[1:]),  # 1/20 < 0.1: kept
        result(twenty, "མམ" + twenty[2:]),  # 2/20 == 0.1: excluded
    ]
    path = tmp_path / "bench.jsonl"
    written = export_benchmark(results, path)
    assert [r.original for r in written] == [twenty]
    assert written[0].ld == 1
    assert written[0].rel_ld == pytest.approx(0.05)

    header, loaded = load_benchmark(path)
    assert header["format"] == "glyphadv-benchmark"
    assert header["rel_ld_threshold"] == 0.1
    assert loaded == written


# --- full-scale reproduction (needs served infrastructure) ------------------------------------

VICTIM_URL_VAR = "GLYPHADV_VICTIM_URL"
VICTIM_CORPUS_VAR = "GLYPHADV_VICTIM_CORPUS"
VICTIM_DB_VAR = "GLYPHADV_VICTIM_DB"

# reference targets for the full-scale run against the served victim model
EXPECTED_ACCURACY_DROP = 0.4714
ACCURACY_DROP_TOLERANCE = 0.10
MAX_MEAN_LD = 3.5


@pytest.mark.skipif(
    not (
        os.environ.get(VICTIM_URL_VAR)
        and os.environ.get(VICTIM_CORPUS_VAR)
        and os.environ.get(VICTIM_DB_VAR)
    ),
    reason=(
        "full-scale reproduction needs a served victim model and real-script data: "
        f"set {VICTIM_URL_VAR} (victim_server endpoint), {VICTIM_CORPUS_VAR} "
        f"(news-title test split, JSON lines) and {VICTIM_DB_VAR} (similarity "
        "database built from a real Tibetan font). The fine-tuned checkpoint, "
        "dataset and font are large external downloads that are not available "
        "in this offline environment, so the run cannot execute here; the "
        "desk-scale suite above stands in for it."
    ),
)
def test_full_scale_reproduction_against_served_victim():
    from glyphadv import HTTPClassifier, load_corpus, load_db

    clf = HTTPClassifier(os.environ[VICTIM_URL_VAR])
    samples = load_corpus(os.environ[VICTIM_CORPUS_VAR])
    db = load_db(os.environ[VICTIM_DB_VAR])
    results, _ = attack_corpus(clf, samples, db, AttackConfig(), jobs=4)
    report = evaluate_run(results)
    assert abs(report.accuracy_drop - EXPECTED_ACCURACY_DROP) <= ACCURACY_DROP_TOLERANCE
    assert report.mean_ld is not None and report.mean_ld <= MAX_MEAN_LD
