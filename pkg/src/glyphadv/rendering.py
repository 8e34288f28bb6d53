"""Rasterize syllables and texts to fixed-canvas grayscale bitmaps.

All texts of one inventory are drawn with the same font, size and pen
position, then cropped to one shared canvas, so two bitmaps are directly
comparable pixel by pixel (baselines aligned, top-left origin). Shaping is
delegated to the Raqm layout engine; naive per-code-point drawing would
misplace combining vowel signs and is deliberately not implemented.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from fontTools.ttLib import TTFont
from PIL import Image, ImageDraw, ImageFont, features

from .errors import MissingGlyphError, RenderError

# one measured text: (scratch array, pen margin, ink bbox in scratch coords)
RawEntry = tuple[np.ndarray, int, "tuple[int, int, int, int] | None"]


@dataclass(frozen=True)
class RenderConfig:
    font_file: str
    font_size_px: int = 50
    padding_px: int = 2
    fg: int = 255
    bg: int = 0

    def __post_init__(self):
        if self.font_size_px <= 0:
            raise ValueError("font_size_px must be positive")
        if self.padding_px < 0:
            raise ValueError("padding_px must be >= 0")
        if self.bg != 0:
            raise ValueError("background must be 0 (ink detection relies on it)")
        if not 0 < self.fg <= 255:
            raise ValueError("foreground must be in 1..255")


@dataclass(frozen=True)
class CanvasSpec:
    """Shared drawing surface: dimensions plus the pen position.

    pen_x/pen_y locate the text drawing origin relative to the canvas
    top-left corner; they may be negative when glyph bearings push all ink
    right of or below the pen.
    """

    width: int
    height: int
    pen_x: int
    pen_y: int

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError("canvas dimensions must be positive")


@dataclass(frozen=True)
class GlyphBitmap:
    width: int
    height: int
    pixels: bytes  # row-major grayscale, len == width * height

    def __post_init__(self):
        if len(self.pixels) != self.width * self.height:
            raise ValueError("pixels length must equal width * height")

    def to_array(self) -> np.ndarray:
        """Float64 (height, width) view for numeric work."""
        return (
            np.frombuffer(self.pixels, dtype=np.uint8)
            .reshape(self.height, self.width)
            .astype(np.float64)
        )

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "GlyphBitmap":
        a = np.asarray(arr)
        if a.ndim != 2:
            raise ValueError("expected a 2-D array")
        return cls(width=a.shape[1], height=a.shape[0], pixels=a.astype(np.uint8).tobytes())


class FontRenderer:
    """Immutable font + config handle; all rendering goes through it."""

    def __init__(self, cfg: RenderConfig):
        self.cfg = cfg
        path = Path(cfg.font_file)
        if not path.is_file():
            raise RenderError(f"font file not found: {path}")
        if not features.check("raqm"):
            raise RenderError("Pillow lacks the Raqm layout engine; complex-script shaping is required")
        data = path.read_bytes()
        self.font_sha256 = hashlib.sha256(data).hexdigest()
        try:
            self._font = ImageFont.truetype(
                str(path), cfg.font_size_px, layout_engine=ImageFont.Layout.RAQM
            )
        except OSError as exc:
            raise RenderError(f"cannot load font {path}: {exc}") from exc
        try:
            tt = TTFont(str(path), fontNumber=0, lazy=True)
            cmap = tt.getBestCmap()
            self._coverage = frozenset(cmap.keys())
            name = tt["name"].getDebugName(4) or tt["name"].getDebugName(1)
            self.font_name = name or path.name
            tt.close()
        except Exception as exc:
            raise RenderError(f"cannot read font tables from {path}: {exc}") from exc

    # -- coverage ---------------------------------------------------------

    def missing_codepoints(self, text: str) -> list[int]:
        seen: list[int] = []
        for ch in text:
            cp = ord(ch)
            if cp not in self._coverage and cp not in seen:
                seen.append(cp)
        return seen

    def check_renderable(self, text: str) -> None:
        missing = self.missing_codepoints(text)
        if missing:
            raise MissingGlyphError(text, missing)

    # -- measurement ------------------------------------------------------

    def _scratch(self, text: str) -> tuple[np.ndarray, int, tuple[int, int, int, int] | None]:
        """Draw on a generous surface; return (array, pen margin, ink bbox).

        The bbox is in scratch coordinates (x0, y0, x1, y1 inclusive), None
        when the text leaves no ink. The surface grows until all ink sits
        strictly inside the border, so the bbox is never clipped.
        """
        size = self.cfg.font_size_px
        margin = 2 * size
        w = 2 * margin + size * (len(text) + 2)
        h = 2 * margin + 2 * size
        while True:
            img = Image.new("L", (w, h), 0)
            ImageDraw.Draw(img).text((margin, margin), text, fill=self.cfg.fg, font=self._font)
            arr = np.asarray(img, dtype=np.uint8)
            ys, xs = arr.nonzero()
            if ys.size == 0:
                return arr, margin, None
            bbox = (int(xs.min()), int(ys.min()), int(xs.max()), int(ys.max()))
            if bbox[0] > 0 and bbox[1] > 0 and bbox[2] < w - 1 and bbox[3] < h - 1:
                return arr, margin, bbox
            w *= 2
            h *= 2

    def ink_bbox(self, text: str) -> tuple[int, int, int, int] | None:
        """Ink bounding box relative to the pen position, or None if blank."""
        self.check_renderable(text)
        _, margin, bbox = self._scratch(text)
        if bbox is None:
            return None
        x0, y0, x1, y1 = bbox
        return (x0 - margin, y0 - margin, x1 - margin, y1 - margin)

    def compute_canvas(self, syllables: Sequence[str]) -> CanvasSpec:
        """Maximal ink bounding box over the inventory, padded on each side."""
        if not syllables:
            raise RenderError("cannot size a canvas for an empty inventory")
        return self.canvas_for(self.measure_batch(syllables))

    # -- rendering --------------------------------------------------------

    def render(self, text: str, canvas: CanvasSpec) -> GlyphBitmap:
        """Deterministic bitmap of `text` on `canvas`; all ink must fit."""
        self.check_renderable(text)
        return self.crop_scratch(self._scratch(text), canvas, text)

    def render_shared(self, texts: Sequence[str]) -> list[GlyphBitmap]:
        """Render texts on one auto-sized shared canvas (same pen, colors)."""
        return self.render_batch(texts)[1]

    def measure_batch(self, texts: Sequence[str]) -> list[RawEntry]:
        """One scratch drawing per text, reusable for canvas + final crop."""
        out = []
        for t in texts:
            self.check_renderable(t)
            out.append(self._scratch(t))
        return out

    def canvas_for(self, scratches: Sequence[RawEntry]) -> CanvasSpec:
        """Canvas fitting every measured text: union ink bbox plus padding."""
        x0 = y0 = x1 = y1 = None
        for _, margin, bbox in scratches:
            if bbox is None:
                continue
            bx0, by0, bx1, by1 = (b - margin for b in bbox)
            x0 = bx0 if x0 is None else min(x0, bx0)
            y0 = by0 if y0 is None else min(y0, by0)
            x1 = bx1 if x1 is None else max(x1, bx1)
            y1 = by1 if y1 is None else max(y1, by1)
        if x0 is None:
            raise RenderError("no text in the batch leaves any ink")
        pad = self.cfg.padding_px
        return CanvasSpec(
            width=(x1 - x0 + 1) + 2 * pad,
            height=(y1 - y0 + 1) + 2 * pad,
            pen_x=pad - x0,
            pen_y=pad - y0,
        )

    def render_batch(
        self, texts: Sequence[str], canvas: CanvasSpec | None = None
    ) -> tuple[CanvasSpec, list[GlyphBitmap]]:
        """Render many texts with a single drawing pass per text.

        Without a canvas, one is sized to the batch, and each text's scratch
        rendering is cropped to it: identical output to compute_canvas +
        render, at half the drawing work.
        """
        if not texts:
            raise RenderError("cannot render an empty batch")
        scratches = self.measure_batch(texts)
        if canvas is None:
            canvas = self.canvas_for(scratches)
        bitmaps = [
            self.crop_scratch(sc, canvas, text) for sc, text in zip(scratches, texts)
        ]
        return canvas, bitmaps

    def crop_scratch(self, scratch: RawEntry, canvas: CanvasSpec, text: str) -> GlyphBitmap:
        arr, margin, _ = scratch
        ink_total = int((arr > 0).sum())
        x0 = margin - canvas.pen_x
        y0 = margin - canvas.pen_y
        pad_l = max(0, -x0)
        pad_t = max(0, -y0)
        pad_r = max(0, x0 + canvas.width - arr.shape[1])
        pad_b = max(0, y0 + canvas.height - arr.shape[0])
        if pad_l or pad_t or pad_r or pad_b:
            arr = np.pad(arr, ((pad_t, pad_b), (pad_l, pad_r)))
            x0 += pad_l
            y0 += pad_t
        crop = arr[y0 : y0 + canvas.height, x0 : x0 + canvas.width]
        if int((crop > 0).sum()) != ink_total:
            raise RenderError(
                f"text does not fit the {canvas.width}x{canvas.height} canvas: {text!r}"
            )
        return GlyphBitmap.from_array(crop)

    @staticmethod
    def dump_png(bitmap: GlyphBitmap, path: str | Path) -> None:
        img = Image.frombytes("L", (bitmap.width, bitmap.height), bitmap.pixels)
        img.save(str(path))
