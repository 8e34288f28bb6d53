"""Syllable and word segmentation for abugida text.

Tibetan syllables are delimited by the tsheg mark; anything that is not a
Tibetan letter (tsheg, shad, whitespace, digits, Latin, ...) acts as a
separator and is passed through untouched, so that joining all units always
reproduces the input exactly.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

TSHEG = "་"
TSHEG_VARIANTS = frozenset({"་", "༌"})

_TIBETAN_LO = 0x0F00
_TIBETAN_HI = 0x0FFF
# Letters proper plus combining vowel/subjoined signs. Punctuation, digits
# and symbols inside the block are treated as separators, like anything
# outside the block.
_LETTER_CATEGORIES = frozenset({"Lo", "Mn", "Mc"})


class Granularity(str, Enum):
    SYLLABLE = "syllable"
    WORD = "word"


class UnitKind(str, Enum):
    ATTACKABLE = "attackable"
    SEPARATOR = "separator"


@dataclass(frozen=True)
class Unit:
    surface: str
    kind: UnitKind
    index: int | None = None  # position among attackable units, None for separators

    @property
    def attackable(self) -> bool:
        return self.kind is UnitKind.ATTACKABLE


@dataclass(frozen=True)
class TokenizedText:
    units: tuple[Unit, ...]
    granularity: Granularity

    def attackable_units(self) -> list[Unit]:
        return [u for u in self.units if u.attackable]

    def attackable_surfaces(self) -> list[str]:
        return [u.surface for u in self.units if u.attackable]

    def with_surface(self, index: int, surface: str) -> "TokenizedText":
        """Copy with the attackable unit at `index` replaced by `surface`."""
        hit = False
        new_units = []
        for u in self.units:
            if u.attackable and u.index == index:
                new_units.append(replace(u, surface=surface))
                hit = True
            else:
                new_units.append(u)
        if not hit:
            raise IndexError(f"no attackable unit with index {index}")
        return TokenizedText(units=tuple(new_units), granularity=self.granularity)


def is_tibetan_letter(ch: str) -> bool:
    cp = ord(ch)
    if not _TIBETAN_LO <= cp <= _TIBETAN_HI:
        return False
    return unicodedata.category(ch) in _LETTER_CATEGORIES


def segment_syllables(text: str) -> TokenizedText:
    """Split text into syllable units at tshegs and any non-letter code point.

    Maximal runs of Tibetan letters become attackable units; maximal runs of
    everything else become separator units.
    """
    units: list[Unit] = []
    index = 0
    run_start = 0
    run_is_letter: bool | None = None
    for pos, ch in enumerate(text):
        letter = is_tibetan_letter(ch)
        if run_is_letter is None:
            run_is_letter = letter
            continue
        if letter != run_is_letter:
            units.append(_make_unit(text[run_start:pos], run_is_letter, index))
            if run_is_letter:
                index += 1
            run_start = pos
            run_is_letter = letter
    if run_is_letter is not None:
        units.append(_make_unit(text[run_start:], run_is_letter, index))
    return TokenizedText(units=tuple(units), granularity=Granularity.SYLLABLE)


def _make_unit(surface: str, attackable: bool, index: int) -> Unit:
    if attackable:
        return Unit(surface=surface, kind=UnitKind.ATTACKABLE, index=index)
    return Unit(surface=surface, kind=UnitKind.SEPARATOR)


def segment_words(text: str, lexicon: frozenset[str] | set[str]) -> TokenizedText:
    """Group syllables into words by forward maximum matching against `lexicon`.

    Lexicon entries are tsheg-joined syllable strings. Longest match wins;
    unmatched syllables stand as single-syllable words. Words never span a
    separator other than a single tsheg, and the original separator characters
    are kept inside the word surface so the round trip stays exact.
    """
    syl = segment_syllables(text)
    max_len = 1
    for entry in lexicon:
        max_len = max(max_len, entry.count(TSHEG) + 1)

    units: list[Unit] = []
    word_index = 0
    pos = 0
    for chain in _syllable_chains(syl.units):
        i = 0
        while i < len(chain):
            matched = 1
            for k in range(min(max_len, len(chain) - i), 1, -1):
                key = TSHEG.join(syl.units[j].surface for j in chain[i : i + k])
                if key in lexicon:
                    matched = k
                    break
            first, last = chain[i], chain[i + matched - 1]
            # emit separators between the previous word and this one
            while pos < first:
                units.append(syl.units[pos])
                pos += 1
            surface = "".join(u.surface for u in syl.units[first : last + 1])
            units.append(Unit(surface=surface, kind=UnitKind.ATTACKABLE, index=word_index))
            word_index += 1
            i += matched
            pos = last + 1
    while pos < len(syl.units):
        units.append(syl.units[pos])
        pos += 1
    return TokenizedText(units=tuple(units), granularity=Granularity.WORD)


def _syllable_chains(units: Sequence[Unit]) -> list[list[int]]:
    """Runs of syllable unit positions linked by single-tsheg separators."""
    chains: list[list[int]] = []
    current: list[int] = []
    i = 0
    n = len(units)
    while i < n:
        u = units[i]
        if not u.attackable:
            i += 1
            continue
        current.append(i)
        # chain continues when exactly one tsheg separates this syllable
        # from the next one
        if (
            i + 2 < n
            and units[i + 1].surface in TSHEG_VARIANTS
            and units[i + 2].attackable
        ):
            i += 2
            continue
        chains.append(current)
        current = []
        i += 1
    if current:
        chains.append(current)
    return chains


def detokenize(tokens: TokenizedText) -> str:
    """Inverse of segmentation: concatenate all unit surfaces."""
    return "".join(u.surface for u in tokens.units)


def syllables_of(surface: str) -> list[str]:
    """Syllable surfaces inside a (word) surface, separators dropped."""
    return segment_syllables(surface).attackable_surfaces()


def load_lexicon(path: str | Path) -> frozenset[str]:
    """Word list: UTF-8, one word per line, '#' starts a comment line."""
    words: set[str] = set()
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        words.add(line)
    return frozenset(words)
