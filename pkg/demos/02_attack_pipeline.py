"""Attack a black-box classifier with visually-similar substitutions.

The victim here is the built-in bag-of-syllables classifier, trained on a
synthetic two-class corpus whose classes differ only by which members of
each look-alike family they use. Any classifier works in its place: the
attack sees nothing but label names and probability rows, so a served model
behind HTTPClassifier drops in unchanged.

Run:  python3 demos/02_attack_pipeline.py
"""

from pathlib import Path

import numpy as np

from glyphadv import (
    AttackConfig,
    FontRenderer,
    RenderConfig,
    NaiveBayesClassifier,
    attack,
    attack_corpus,
    build_db,
    replay_trace,
    visual_similarity,
)
from glyphadv import devfont

TSHEG = "་"
out = Path(__file__).parent / "output"
out.mkdir(exist_ok=True)

font = out / "demo.ttf"
devfont.build_font(font)
renderer = FontRenderer(RenderConfig(font_file=font, font_size_px=50))

# 1. Similarity database over the first four consonant families.
families = devfont.consonant_groups()[:4]
inventory = [c for fam in families for c in fam]
db = build_db(inventory, renderer, threshold=0.8)

# 2. A corpus the attack can plausibly flip: class "gold" writes with the
#    first two members of each family, class "silver" with the last two.
#    Same-family substitutions are tiny visually but cross the boundary.
rng = np.random.default_rng(7)
samples = []
for i in range(160):
    label = "gold" if i % 2 == 0 else "silver"
    members = (0, 1) if label == "gold" else (3, 4)
    k = int(rng.integers(6, 12))
    syllables = [families[int(rng.integers(0, 4))][int(rng.choice(members))] for _ in range(k)]
    samples.append((TSHEG.join(syllables), label))

clf = NaiveBayesClassifier.train(samples)
print(f"victim: {clf.__class__.__name__}, labels {clf.labels}, "
      f"training accuracy {clf.accuracy(samples):.3f}")

# 3. Attack one text and walk through what came back.
text, gold = samples[0]
result = attack(clf, text, db, AttackConfig(), gold_label=gold)
print(f"\noriginal      {result.original_text}")
print(f"adversarial   {result.adversarial_text}")
print(f"flip          {result.original_label} -> {result.final_label}"
      f" (success={result.success}) in {result.queries} queries")
for step in result.trace:
    score = dict(db.query(step.old))[step.new]
    print(f"  position {step.position}: {step.old} -> {step.new}"
          f"  (similarity {score:.3f}, prob {step.prob_before:.3f} -> {step.prob_after:.3f})")

# The trace alone reproduces the adversarial text, and the perturbation is
# nearly invisible when rendered.
assert replay_trace(result) == result.adversarial_text
print(f"replayed OK; visual similarity "
      f"{visual_similarity(result.original_text, result.adversarial_text, renderer):.4f}")

# 4. Whole-corpus run. Texts the victim already misclassifies are skipped,
#    not counted as wins.
results, summary = attack_corpus(clf, samples, db, jobs=4)
print(f"\ncorpus: {summary.attacked} attacked, {summary.succeeded} flipped, "
      f"{summary.skipped} skipped, {summary.total_queries} queries total")
