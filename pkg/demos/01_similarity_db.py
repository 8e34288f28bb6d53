"""Build a visual-similarity database from rendered glyphs.

The toolkit ships a deterministic synthetic test font so everything here runs
without downloading a real Tibetan font. Swap `font` for a path to a real
.ttf to build a production database; nothing else changes.

Run:  python3 demos/01_similarity_db.py
"""

from pathlib import Path

from glyphadv import FontRenderer, RenderConfig, build_db, export_table, load_db, ncc, save_db
from glyphadv import devfont

out = Path(__file__).parent / "output"
out.mkdir(exist_ok=True)

# 1. A font and a renderer. The synthetic font groups consonants into
#    look-alike families, so it produces the same band structure a real
#    font does: near-twins well above 0.8, unrelated shapes far below.
font = out / "demo.ttf"
devfont.build_font(font)
renderer = FontRenderer(RenderConfig(font_file=font, font_size_px=50))
print(f"font: {renderer.font_name} (sha256 {renderer.font_sha256[:12]}...)")

# 2. An inventory of syllables to compare. Every entry must be renderable;
#    the renderer refuses silently-missing glyphs up front.
inventory = devfont.inventory(120)
print(f"inventory: {len(inventory)} syllables, e.g. {' '.join(inventory[:6])}")

# 3. Pairwise scores. Identical bitmaps score exactly 1.0 and are excluded;
#    kept neighbors sit strictly between the threshold and 1.0.
db = build_db(inventory, renderer, threshold=0.8)
pairs = sum(len(v) for v in db.entries.values()) // 2
print(f"database: {pairs} neighbor pairs above threshold {db.header.threshold}")

probe = inventory[0]
neighbors = db.query(probe)
print(f"\nclosest neighbors of {probe} ({len(neighbors)} total):")
for surface, score in neighbors[:8]:
    print(f"  {surface}  {score:.4f}")

# 4. The raw kernel is available directly for spot checks.
a, b = renderer.render_shared([inventory[0], inventory[1]])
print(f"\nncc({inventory[0]}, {inventory[1]}) = {ncc(a, b):.4f}")

# 5. Persist and reload. The file is line-delimited JSON with a header that
#    pins the font hash and canvas, so a reload can detect a font swap.
db_path = out / "demo_db.jsonl"
save_db(db, db_path)
reloaded = load_db(db_path)
assert reloaded.entries == db.entries
print(f"\nsaved and reloaded {db_path} ({db_path.stat().st_size} bytes)")

table = out / "demo_table.txt"
table.write_text(export_table(db, top_k=3), encoding="utf-8")
print(f"top-3 neighbor table written to {table}")
