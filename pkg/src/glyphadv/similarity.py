"""Visual similarity scores and the thresholded neighbor database.

The score is the mean-centered normalized cross-correlation of two equal
size grayscale bitmaps (the Pearson correlation of their pixel values),
range [-1, 1]. The database stores, for every inventory syllable, all other
syllables whose score falls strictly inside (threshold, 1): near-identical
looks, but never pixel-identical renders.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .errors import DBFormatError
from .rendering import FontRenderer, GlyphBitmap

DB_FORMAT = "glyphadv-simdb"
DB_VERSION = 1

Neighbor = tuple[str, float]


def _as_array(x: GlyphBitmap | np.ndarray) -> np.ndarray:
    if isinstance(x, GlyphBitmap):
        return x.to_array()
    return np.asarray(x, dtype=np.float64)


def ncc(a: GlyphBitmap | np.ndarray, b: GlyphBitmap | np.ndarray) -> float:
    """Pearson correlation of two equal-size bitmaps, in [-1, 1].

    Identical inputs score exactly 1.0. A constant (zero-variance) image has
    no correlation direction: against anything not pixel-identical to it the
    score is defined as 0.0.
    """
    aa = _as_array(a)
    bb = _as_array(b)
    if aa.shape != bb.shape:
        raise ValueError(f"bitmap dimensions differ: {aa.shape} vs {bb.shape}")
    if np.array_equal(aa, bb):
        return 1.0
    ac = aa - aa.mean()
    bc = bb - bb.mean()
    den = math.sqrt(float((ac * ac).sum()) * float((bc * bc).sum()))
    if den == 0.0:
        return 0.0
    return float((ac * bc).sum() / den)


@dataclass(frozen=True)
class DBHeader:
    font_name: str
    font_sha256: str
    font_size_px: int
    canvas_width: int
    canvas_height: int
    pen_x: int
    pen_y: int
    threshold: float
    inventory_size: int


@dataclass(frozen=True)
class SimilarityDB:
    """Per-syllable neighbor lists, sorted by score descending.

    entries holds every inventory syllable (possibly with an empty list);
    unknown syllables simply query to an empty list.
    """

    header: DBHeader
    entries: dict[str, tuple[Neighbor, ...]]

    def query(self, syllable: str) -> tuple[Neighbor, ...]:
        return self.entries.get(syllable, ())

    def __contains__(self, syllable: str) -> bool:
        return syllable in self.entries


def query(db: SimilarityDB, syllable: str) -> tuple[Neighbor, ...]:
    return db.query(syllable)


def build_db(
    inventory: Sequence[str],
    renderer: FontRenderer,
    threshold: float = 0.8,
    jobs: int = 1,
    progress: Callable[[str, int, int], None] | None = None,
) -> SimilarityDB:
    """Score all syllable pairs and keep those strictly inside (threshold, 1).

    Each syllable is rendered once; its mean-centered, unit-normalized pixel
    vector is precomputed so every pair costs one dot product. Pairs are
    computed once (i < j) and mirrored, which also makes the stored scores
    exactly symmetric. Pixel-identical renders are detected by byte equality
    and never become neighbors regardless of rounding.
    """
    if not 0.0 <= threshold < 1.0:
        raise ValueError("threshold must be in [0, 1)")
    seen: set[str] = set()
    dupes: set[str] = set()
    for s in inventory:
        if s in seen:
            dupes.add(s)
        seen.add(s)
    if dupes:
        raise ValueError(f"inventory contains duplicates: {sorted(dupes)[:5]}")

    n = len(inventory)
    if jobs > 1 and n > 1:
        # each worker measures a slice with its own font handle; the canvas
        # is the union over slices, then everything is cropped to it, which
        # is identical to a single-threaded batch render
        bounds = [(i * n // jobs, (i + 1) * n // jobs) for i in range(jobs)]
        renderers = [FontRenderer(renderer.cfg) for _ in bounds]
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            slices = list(
                pool.map(
                    lambda i: renderers[i].measure_batch(inventory[bounds[i][0] : bounds[i][1]]),
                    range(len(bounds)),
                )
            )
        scratches = [sc for chunk in slices for sc in chunk]
        canvas = renderer.canvas_for(scratches)
        raw = [
            renderer.crop_scratch(sc, canvas, s).pixels
            for sc, s in zip(scratches, inventory)
        ]
    else:
        canvas, bitmaps = renderer.render_batch(inventory)
        raw = [bm.pixels for bm in bitmaps]
    if progress:
        progress("render", n, n)

    x = np.frombuffer(b"".join(raw), dtype=np.uint8).reshape(n, -1).astype(np.float64)
    x -= x.mean(axis=1, keepdims=True)
    norms = np.sqrt((x * x).sum(axis=1))
    nonzero = norms > 0.0
    u = np.zeros_like(x)
    u[nonzero] = x[nonzero] / norms[nonzero, None]

    by_pixels: dict[bytes, int] = {}
    twin_of = np.full(n, -1, dtype=np.int64)  # first index with identical pixels
    for i, px in enumerate(raw):
        twin_of[i] = by_pixels.setdefault(px, i)

    lists: dict[str, list[Neighbor]] = {s: [] for s in inventory}
    block = 256
    for lo in range(0, n, block):
        hi = min(lo + block, n)
        scores = u[lo:hi] @ u.T  # (hi-lo, n)
        for bi in range(hi - lo):
            i = lo + bi
            row = scores[bi]
            for j in np.nonzero(row > threshold)[0]:
                j = int(j)
                if j <= i:
                    continue
                s = float(row[j])
                if s >= 1.0 or twin_of[i] == twin_of[j]:
                    continue
                lists[inventory[i]].append((inventory[j], s))
                lists[inventory[j]].append((inventory[i], s))
        if progress:
            progress("pairs", hi, n)

    entries = {
        s: tuple(sorted(neigh, key=lambda t: (-t[1], t[0]))) for s, neigh in lists.items()
    }
    header = DBHeader(
        font_name=renderer.font_name,
        font_sha256=renderer.font_sha256,
        font_size_px=renderer.cfg.font_size_px,
        canvas_width=canvas.width,
        canvas_height=canvas.height,
        pen_x=canvas.pen_x,
        pen_y=canvas.pen_y,
        threshold=threshold,
        inventory_size=n,
    )
    return SimilarityDB(header=header, entries=entries)


def save_db(db: SimilarityDB, path: str | Path) -> None:
    """Line-delimited JSON: one header record, then one record per syllable.

    Scores serialize through Python float repr, which round-trips doubles
    bit-exactly, so save/load/save is byte-identical.
    """
    lines = [
        json.dumps(
            {"format": DB_FORMAT, "version": DB_VERSION, **asdict(db.header)},
            ensure_ascii=False,
            separators=(",", ":"),
        )
    ]
    for s, neigh in db.entries.items():
        rec = {"s": s, "n": [[t, sc] for t, sc in neigh]}
        lines.append(json.dumps(rec, ensure_ascii=False, separators=(",", ":")))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_db(path: str | Path) -> SimilarityDB:
    text = Path(path).read_text(encoding="utf-8")
    lines = text.splitlines()
    if not lines:
        raise DBFormatError(f"{path}: empty file")
    try:
        head = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise DBFormatError(f"{path}: bad header line: {exc}") from exc
    if not isinstance(head, dict) or head.get("format") != DB_FORMAT:
        raise DBFormatError(f"{path}: not a similarity database file")
    if head.get("version") != DB_VERSION:
        raise DBFormatError(
            f"{path}: unsupported version {head.get('version')!r} (expected {DB_VERSION})"
        )
    try:
        header = DBHeader(
            font_name=head["font_name"],
            font_sha256=head["font_sha256"],
            font_size_px=head["font_size_px"],
            canvas_width=head["canvas_width"],
            canvas_height=head["canvas_height"],
            pen_x=head["pen_x"],
            pen_y=head["pen_y"],
            threshold=head["threshold"],
            inventory_size=head["inventory_size"],
        )
    except KeyError as exc:
        raise DBFormatError(f"{path}: header missing field {exc}") from exc
    entries: dict[str, tuple[Neighbor, ...]] = {}
    for ln, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        try:
            rec = json.loads(line)
            entries[rec["s"]] = tuple((t, float(sc)) for t, sc in rec["n"])
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise DBFormatError(f"{path}:{ln}: corrupt record: {exc}") from exc
    if len(entries) != header.inventory_size:
        raise DBFormatError(
            f"{path}: header says {header.inventory_size} syllables, file has {len(entries)}"
        )
    return SimilarityDB(header=header, entries=entries)


def font_mismatch(db: SimilarityDB, renderer: FontRenderer) -> str | None:
    """Warning text when a renderer's font differs from the DB's, else None."""
    if renderer.font_sha256 != db.header.font_sha256:
        return (
            f"font hash mismatch: database built with {db.header.font_name} "
            f"({db.header.font_sha256[:12]}...), renderer uses {renderer.font_name} "
            f"({renderer.font_sha256[:12]}...)"
        )
    return None


def export_table(db: SimilarityDB, top_k: int = 5) -> str:
    """Human-readable top-k neighbor table, one line per syllable."""
    out = [
        f"# visually similar syllables, top {top_k} per entry",
        f"# font: {db.header.font_name}  size: {db.header.font_size_px}px  "
        f"threshold: {db.header.threshold}  inventory: {db.header.inventory_size}",
    ]
    for s, neigh in db.entries.items():
        cells = "  ".join(f"{t} ({sc:.4f})" for t, sc in neigh[:top_k])
        out.append(f"{s}\t{cells}" if cells else f"{s}\t-")
    return "\n".join(out) + "\n"
