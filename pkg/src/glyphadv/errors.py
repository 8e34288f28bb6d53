"""Exception hierarchy shared across the package."""


class GlyphAdvError(Exception):
    """Base class for all package errors."""


class InputError(GlyphAdvError):
    """Malformed or missing input artifact (corpus, lexicon, inventory, model)."""


class RenderError(GlyphAdvError):
    """Font could not be loaded or text could not be rasterized."""


class MissingGlyphError(RenderError):
    """Text contains code points the font does not cover."""

    def __init__(self, text: str, codepoints: list[int]):
        self.text = text
        self.codepoints = codepoints
        cps = ", ".join(f"U+{cp:04X}" for cp in codepoints)
        super().__init__(f"font has no glyph for: {cps} (in {text!r})")


class DBFormatError(GlyphAdvError):
    """Similarity database file is corrupt, or its version is unsupported."""


class ClassifierError(GlyphAdvError):
    """Classifier transport or protocol failure."""


class BudgetExceededError(GlyphAdvError):
    """Submitting the next query batch would exceed the query budget."""

    def __init__(self, budget: int, used: int, requested: int):
        self.budget = budget
        self.used = used
        self.requested = requested
        super().__init__(
            f"query budget {budget} exhausted: {used} used, {requested} more requested"
        )
