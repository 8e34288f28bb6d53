"""Evaluate an attack run and export the low-perturbation benchmark slice.

Builds on the same synthetic pipeline as demo 02, then aggregates the run
into the standard report (accuracy drop, edit distance, visual and semantic
similarity) and writes the benchmark file of successes whose relative edit
distance stays under the export threshold.

Run:  python3 demos/03_metrics_benchmark.py
"""

from pathlib import Path

import numpy as np

from glyphadv import (
    FontRenderer,
    RenderConfig,
    NaiveBayesClassifier,
    SyllableFrequencyEmbedder,
    attack_corpus,
    build_db,
    evaluate_run,
    export_benchmark,
    levenshtein,
    load_benchmark,
    report_to_text,
)
from glyphadv import devfont

TSHEG = "་"
out = Path(__file__).parent / "output"
out.mkdir(exist_ok=True)

font = out / "demo.ttf"
devfont.build_font(font)
renderer = FontRenderer(RenderConfig(font_file=font, font_size_px=50))

families = devfont.consonant_groups()[:6]
inventory = [c for fam in families for c in fam]
db = build_db(inventory, renderer, threshold=0.8)

rng = np.random.default_rng(21)
samples = []
for i in range(120):
    label = "east" if i % 2 == 0 else "west"
    members = (0, 1) if label == "east" else (3, 4)
    k = int(rng.integers(8, 15))
    syllables = [families[int(rng.integers(0, 6))][int(rng.choice(members))] for _ in range(k)]
    samples.append((TSHEG.join(syllables), label))

clf = NaiveBayesClassifier.train(samples)
results, summary = attack_corpus(clf, samples, db, jobs=4)

# 1. The report. Visual similarity comes from the renderer; semantic
#    similarity from an embedder (here the syllable-frequency fallback;
#    a served model's /embed endpoint plugs in the same way).
report = evaluate_run(results, renderer=renderer, embedder=SyllableFrequencyEmbedder())
print(report_to_text(report))

# 2. Spot-check the distance arithmetic the report is built on.
success = next(r for r in results if r.success)
ld = levenshtein(success.original_text, success.adversarial_text)
print(f"example: {len(success.trace)} substitutions -> edit distance {ld}, "
      f"relative {ld / len(success.original_text):.3f}")

# 3. Benchmark export keeps only successes with relative edit distance
#    strictly below the threshold, each awaiting human annotation. The
#    bag-of-syllables victim only yields after many substitutions (its class
#    vocabularies barely overlap), so the demo threshold is lenient; against
#    a served neural victim the default 0.1 is the right setting.
bench = out / "demo_benchmark.jsonl"
records = export_benchmark(results, bench, rel_ld_threshold=0.4, renderer=renderer)
header, loaded = load_benchmark(bench)
assert loaded == records
print(f"\nbenchmark: kept {len(records)} of {summary.succeeded} successes "
      f"at rel_ld < {header['rel_ld_threshold']} -> {bench}")
