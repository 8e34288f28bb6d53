"""Deterministic geometric test font covering the Tibetan block.

Real Tibetan typefaces are large external artifacts. For tests, demos and
offline development this module synthesizes a small TrueType font whose
glyphs are abstract bar patterns engineered so that visual similarity has a
known structure:

  - the 42 consonants fall into groups of 5 sharing a 3-bar base shape and
    differing only in a small tick, so same-group pairs land well inside a
    (0.8, 1) similarity band while cross-group pairs stay far below it;
  - U+0F6B and U+0F6C map to one shared glyph, giving two distinct code
    points that render pixel-identically (for strict score<1 exclusion);
  - ten vowel signs are distinct two-block marks with zero advance so the
    shaper positions them as combining marks.

The bar bases are the 12 lines of the affine plane of order 3 over 9 bar
slots: every pair of slots occurs in exactly one line, so any two bases
share at most one bar. Everything is pure geometry; builds are bit-exact.
"""

from __future__ import annotations

import itertools
from pathlib import Path

from fontTools.fontBuilder import FontBuilder
from fontTools.pens.ttGlyphPen import TTGlyphPen

UPM = 1000
FAMILY_NAME = "GlyphAdv Test"

# U+0F48 is unassigned
CONSONANTS = tuple(cp for cp in range(0x0F40, 0x0F6B) if cp != 0x0F48)
IDENTICAL_PAIR = (0x0F6B, 0x0F6C)  # two code points, one glyph
VOWELS = (0x0F71, 0x0F72, 0x0F74, 0x0F7A, 0x0F7B, 0x0F7C, 0x0F7D, 0x0F7E, 0x0F80, 0x0F84)
GROUP_SIZE = 5

_H_SLOTS = (40, 200, 360, 520)  # y of horizontal bars
_V_SLOTS = (0, 140, 280, 420, 560)  # x of vertical bars
_TICK_SLOTS = (20, 152, 284, 416, 548)  # x of the group-member tick
_BOX_W = 680


def _rect(pen: TTGlyphPen, x0: int, y0: int, x1: int, y1: int) -> None:
    pen.moveTo((x0, y0))
    pen.lineTo((x1, y0))
    pen.lineTo((x1, y1))
    pen.lineTo((x0, y1))
    pen.closePath()


def base_combos() -> list[tuple[int, int, int]]:
    """12 bar triples over 9 slots, pairwise sharing at most one slot."""
    return [
        (0, 1, 2), (3, 4, 5), (6, 7, 8),
        (0, 3, 6), (1, 4, 7), (2, 5, 8),
        (0, 4, 8), (1, 5, 6), (2, 3, 7),
        (0, 5, 7), (1, 3, 8), (2, 4, 6),
    ]


def _draw_bar(pen: TTGlyphPen, slot: int) -> None:
    if slot < 4:
        y = _H_SLOTS[slot]
        _rect(pen, 0, y, _BOX_W, y + 120)
    else:
        x = _V_SLOTS[slot - 4]
        _rect(pen, x, 0, x + 120, 700)


def _draw_consonant(pen: TTGlyphPen, combo: tuple[int, int, int], member: int) -> None:
    for slot in combo:
        _draw_bar(pen, slot)
    tx = _TICK_SLOTS[member]
    _rect(pen, tx, 740, tx + 110, 860)


def _draw_vowel(pen: TTGlyphPen, idx: int) -> None:
    # 2 blocks out of 5 x-slots in a high band; C(5,2)=10 distinct shapes
    pairs = list(itertools.combinations(range(5), 2))
    a, b = pairs[idx]
    for s in (a, b):
        x = 20 + s * 132
        _rect(pen, x, 880, x + 110, 990)


def build_font(path: str | Path) -> Path:
    """Write the test font to `path` and return it."""
    glyph_order = [".notdef", "space", "tsheg", "tshegb", "shad", "sharedpair"]
    cmap: dict[int, str] = {
        0x20: "space",
        0x0F0B: "tsheg",
        0x0F0C: "tshegb",
        0x0F0D: "shad",
        IDENTICAL_PAIR[0]: "sharedpair",
        IDENTICAL_PAIR[1]: "sharedpair",
    }
    glyphs = {}
    advances = {}

    pen = TTGlyphPen(None)
    _rect(pen, 50, 0, 550, 900)
    _rect(pen, 120, 70, 480, 830)
    glyphs[".notdef"] = pen.glyph()
    advances[".notdef"] = 600

    glyphs["space"] = TTGlyphPen(None).glyph()
    advances["space"] = 400

    pen = TTGlyphPen(None)
    _rect(pen, 20, 640, 120, 740)
    glyphs["tsheg"] = pen.glyph()
    advances["tsheg"] = 160

    pen = TTGlyphPen(None)
    _rect(pen, 20, 600, 120, 700)
    _rect(pen, 20, 760, 120, 860)
    glyphs["tshegb"] = pen.glyph()
    advances["tshegb"] = 160

    pen = TTGlyphPen(None)
    _rect(pen, 40, 0, 160, 860)
    glyphs["shad"] = pen.glyph()
    advances["shad"] = 220

    combos = base_combos()
    for i, cp in enumerate(CONSONANTS):
        name = f"uni{cp:04X}"
        glyph_order.append(name)
        cmap[cp] = name
        pen = TTGlyphPen(None)
        _draw_consonant(pen, combos[i // GROUP_SIZE], i % GROUP_SIZE)
        glyphs[name] = pen.glyph()
        advances[name] = 760

    pen = TTGlyphPen(None)
    _draw_consonant(pen, combos[len(CONSONANTS) // GROUP_SIZE + 1], 2)
    glyphs["sharedpair"] = pen.glyph()
    advances["sharedpair"] = 640

    for j, cp in enumerate(VOWELS):
        name = f"uni{cp:04X}"
        glyph_order.append(name)
        cmap[cp] = name
        pen = TTGlyphPen(None)
        _draw_vowel(pen, j)
        glyphs[name] = pen.glyph()
        advances[name] = 0

    fb = FontBuilder(UPM, isTTF=True)
    fb.setupGlyphOrder(glyph_order)
    fb.setupCharacterMap(cmap)
    fb.setupGlyf(glyphs)
    glyf = fb.font["glyf"]
    metrics = {}
    for name in glyph_order:
        adv = advances.get(name, 640)
        g = glyf[name]
        lsb = g.xMin if g.numberOfContours else 0
        metrics[name] = (adv, lsb)
    fb.setupHorizontalMetrics(metrics)
    fb.setupHorizontalHeader(ascent=1050, descent=-150)
    fb.setupNameTable(
        {
            "familyName": FAMILY_NAME,
            "styleName": "Regular",
            "fullName": f"{FAMILY_NAME} Regular",
            "psName": "GlyphAdvTest-Regular",
        }
    )
    fb.setupOS2(sTypoAscender=1050, sTypoDescender=-150, usWinAscent=1100, usWinDescent=200)
    fb.setupPost()
    # pin the head timestamps, else every build embeds the wall clock and
    # two builds of the same font hash differently
    fb.font.recalcTimestamp = False
    head = fb.font["head"]
    head.created = head.modified = 3600000000
    path = Path(path)
    fb.save(str(path))
    return path


def consonant_groups() -> list[list[str]]:
    """Consonants partitioned into same-base-shape groups of 5."""
    chars = [chr(cp) for cp in CONSONANTS]
    return [chars[i : i + GROUP_SIZE] for i in range(0, len(chars), GROUP_SIZE)]


def inventory(n: int) -> list[str]:
    """The first `n` syllables of a deterministic synthetic inventory.

    Order: bare consonants, then consonant+vowel, then consonant+vowel+vowel
    (larger-class-first mark pairs so the shaper's reordering keeps them
    distinct as written). All entries render with the test font.
    """
    out: list[str] = [chr(c) for c in CONSONANTS]
    for c in CONSONANTS:
        for v in VOWELS:
            out.append(chr(c) + chr(v))
    for c in CONSONANTS:
        for v1, v2 in itertools.combinations(VOWELS, 2):
            out.append(chr(c) + chr(v1) + chr(v2))
    if n > len(out):
        raise ValueError(f"synthetic inventory holds {len(out)} syllables, {n} requested")
    return out[:n]


def write_inventory(path: str | Path, n: int) -> Path:
    path = Path(path)
    path.write_text("".join(s + "\n" for s in inventory(n)), encoding="utf-8")
    return path
