"""Visually-imperceptible adversarial text attacks for abugida scripts.

The pipeline: segment text into syllables or words, look substitution
candidates up in a rendered-glyph similarity database, and greedily replace
the most salient units until a black-box classifier changes its label.
Evaluation covers accuracy drop, edit distance, visual similarity and
semantic similarity, plus a filtered benchmark export.
"""

from .attack import (
    AttackConfig,
    AttackResult,
    PositionScore,
    RunSummary,
    SubstitutionStep,
    attack,
    attack_corpus,
    best_substitution,
    replay_trace,
    saliency,
)
from .candidates import CandidateSet, syllable_candidates, word_candidates
from .classifiers import Classifier, HTTPClassifier, QueryCounter, predict_index
from .errors import (
    BudgetExceededError,
    ClassifierError,
    DBFormatError,
    GlyphAdvError,
    InputError,
    MissingGlyphError,
    RenderError,
)
from .metrics import (
    EvalReport,
    SyllableFrequencyEmbedder,
    evaluate_run,
    export_benchmark,
    levenshtein,
    load_benchmark,
    report_to_jsonl,
    report_to_text,
    semantic_similarity,
    visual_similarity,
)
from .nbayes import NaiveBayesClassifier
from .records import load_corpus, load_results, write_corpus, write_results
from .rendering import CanvasSpec, FontRenderer, GlyphBitmap, RenderConfig
from .segmentation import (
    Granularity,
    TokenizedText,
    Unit,
    detokenize,
    load_lexicon,
    segment_syllables,
    segment_words,
)
from .similarity import SimilarityDB, build_db, export_table, load_db, ncc, save_db

__version__ = "0.1.0"

__all__ = [
    "AttackConfig",
    "AttackResult",
    "BudgetExceededError",
    "CandidateSet",
    "CanvasSpec",
    "Classifier",
    "ClassifierError",
    "DBFormatError",
    "EvalReport",
    "FontRenderer",
    "GlyphAdvError",
    "GlyphBitmap",
    "Granularity",
    "HTTPClassifier",
    "InputError",
    "MissingGlyphError",
    "NaiveBayesClassifier",
    "PositionScore",
    "QueryCounter",
    "RenderConfig",
    "RenderError",
    "RunSummary",
    "SimilarityDB",
    "SubstitutionStep",
    "SyllableFrequencyEmbedder",
    "TokenizedText",
    "Unit",
    "attack",
    "attack_corpus",
    "best_substitution",
    "build_db",
    "detokenize",
    "evaluate_run",
    "export_benchmark",
    "export_table",
    "levenshtein",
    "load_benchmark",
    "load_corpus",
    "load_db",
    "load_lexicon",
    "load_results",
    "ncc",
    "predict_index",
    "replay_trace",
    "saliency",
    "save_db",
    "segment_syllables",
    "segment_words",
    "report_to_jsonl",
    "report_to_text",
    "semantic_similarity",
    "syllable_candidates",
    "visual_similarity",
    "word_candidates",
    "write_corpus",
    "write_results",
]
