"""Command-line surface for the attack pipeline.

Exit codes: 0 success, 1 usage error, 2 input error (missing or malformed
files), 3 classifier or transport failure. Completion of an attack run is
success even when no individual attack flipped a label.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .attack import AttackConfig, attack_corpus
from .classifiers import HTTPClassifier
from .errors import ClassifierError, GlyphAdvError, InputError
from .nbayes import NaiveBayesClassifier
from .records import (
    load_corpus,
    load_results,
    results_header,
    write_manifest,
    write_result_line,
)
from .rendering import FontRenderer, RenderConfig
from .segmentation import Granularity, load_lexicon
from .similarity import build_db, export_table, load_db, save_db


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors by default; this toolkit reserves 2
    # for input errors, so usage problems must exit 1
    def error(self, message):
        raise _UsageError(message)


def _load_inventory(path: str) -> list[str]:
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise InputError(f"cannot read inventory {path}: {exc}") from exc
    out = []
    for raw in lines:
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        out.append(line)
    if not out:
        raise InputError(f"{path}: inventory is empty")
    return out


def _make_classifier(spec: str):
    if spec.startswith("builtin:"):
        return NaiveBayesClassifier.load(spec[len("builtin:") :])
    if spec.startswith(("http://", "https://")):
        return HTTPClassifier(spec)
    if spec.startswith("http:"):
        return HTTPClassifier("http://" + spec[len("http:") :].lstrip("/"))
    raise InputError(
        f"unrecognized classifier {spec!r}: use builtin:<model_path> or http://<host:port>"
    )


def _require_file(path: str, what: str) -> Path:
    p = Path(path)
    if not p.is_file():
        raise InputError(f"{what} not found: {path}")
    return p


# -- subcommands ------------------------------------------------------------


def cmd_build_db(args) -> int:
    inventory = _load_inventory(args.inventory)
    _require_file(args.font, "font file")
    renderer = FontRenderer(RenderConfig(font_file=args.font, font_size_px=args.font_size))
    db = build_db(inventory, renderer, threshold=args.threshold, jobs=args.jobs)
    save_db(db, args.out)
    if args.export_table:
        Path(args.export_table).write_text(export_table(db, args.top_k), encoding="utf-8")
    if args.dump_glyphs:
        dump_dir = Path(args.dump_glyphs)
        dump_dir.mkdir(parents=True, exist_ok=True)
        canvas_syllables = inventory
        from .rendering import CanvasSpec

        canvas = CanvasSpec(
            width=db.header.canvas_width,
            height=db.header.canvas_height,
            pen_x=db.header.pen_x,
            pen_y=db.header.pen_y,
        )
        for i, s in enumerate(canvas_syllables):
            FontRenderer.dump_png(renderer.render(s, canvas), dump_dir / f"{i:05d}.png")
    write_manifest(
        args.out,
        "build-db",
        {
            "inventory": args.inventory,
            "font": args.font,
            "font_size": args.font_size,
            "threshold": args.threshold,
            "jobs": args.jobs,
        },
        inputs=[args.inventory, args.font],
        extra={"entries": len(db.entries)},
    )
    pairs = sum(len(v) for v in db.entries.values()) // 2
    print(f"built similarity db: {len(db.entries)} syllables, {pairs} neighbor pairs -> {args.out}")
    return 0


def cmd_attack(args) -> int:
    _require_file(args.db, "similarity database")
    db = load_db(args.db)
    samples = load_corpus(args.input)
    clf = _make_classifier(args.classifier)
    granularity = Granularity(args.granularity)
    lexicon = None
    if granularity is Granularity.WORD:
        if not args.lexicon:
            raise _UsageError("--granularity word requires --lexicon <word list file>")
        lexicon = load_lexicon(_require_file(args.lexicon, "lexicon"))
    cfg = AttackConfig(
        granularity=granularity,
        unk_token=args.unk,
        max_query_budget=args.budget,
        max_substitution_ratio=args.max_sub_ratio,
        lexicon=lexicon,
        product_cap=args.cap,
    )
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(results_header() + "\n")
        results, summary = attack_corpus(
            clf,
            samples,
            db,
            cfg,
            on_result=lambda res: write_result_line(fh, res),
            jobs=args.jobs,
        )
    write_manifest(
        args.out,
        "attack",
        {
            "db": args.db,
            "classifier": args.classifier,
            "input": args.input,
            "granularity": args.granularity,
            "budget": args.budget,
            "unk": args.unk,
            "max_sub_ratio": args.max_sub_ratio,
            "cap": args.cap,
            "jobs": args.jobs,
        },
        inputs=[args.db, args.input] + ([args.lexicon] if args.lexicon else []),
        extra={
            "total": summary.total,
            "skipped": summary.skipped,
            "attacked": summary.attacked,
            "succeeded": summary.succeeded,
            "failed": summary.failed,
            "total_queries": summary.total_queries,
        },
    )
    print(
        f"attacked {summary.attacked}/{summary.total} samples "
        f"({summary.skipped} skipped as misclassified): {summary.succeeded} flipped, "
        f"{summary.failed} failed, {summary.total_queries} queries -> {args.out}"
    )
    return 0


def cmd_evaluate(args) -> int:
    from .metrics import evaluate_run, report_to_jsonl, report_to_text

    results = load_results(_require_file(args.results, "results file"))
    renderer = None
    if args.font:
        _require_file(args.font, "font file")
        renderer = FontRenderer(RenderConfig(font_file=args.font, font_size_px=args.font_size))
    embedder = None
    if args.embedder and args.embedder != "none":
        if args.embedder == "freq":
            from .metrics import SyllableFrequencyEmbedder

            embedder = SyllableFrequencyEmbedder()
        elif args.embedder.startswith(("http://", "https://", "http:")):
            spec = args.embedder
            if not spec.startswith(("http://", "https://")):
                spec = "http://" + spec[len("http:") :].lstrip("/")
            embedder = HTTPClassifier(spec)
        else:
            raise InputError(
                f"unrecognized embedder {args.embedder!r}: use freq, none, or http://<host:port>"
            )
    report = evaluate_run(
        results,
        clf_accuracy_pre=args.pre_accuracy,
        renderer=renderer,
        embedder=embedder,
    )
    Path(args.out).write_text(report_to_jsonl(report), encoding="utf-8")
    write_manifest(
        args.out,
        "evaluate",
        {
            "results": args.results,
            "font": args.font,
            "font_size": args.font_size,
            "embedder": args.embedder,
            "pre_accuracy": args.pre_accuracy,
        },
        inputs=[args.results] + ([args.font] if args.font else []),
    )
    sys.stdout.write(report_to_text(report))
    return 0


def cmd_export_benchmark(args) -> int:
    from .metrics import export_benchmark

    results = load_results(_require_file(args.results, "results file"))
    renderer = None
    if args.font:
        _require_file(args.font, "font file")
        renderer = FontRenderer(RenderConfig(font_file=args.font, font_size_px=args.font_size))
    records = export_benchmark(
        results,
        args.out,
        rel_ld_threshold=args.threshold,
        len_mode=args.len_mode,
        renderer=renderer,
        method=args.method_id,
    )
    write_manifest(
        args.out,
        "export-benchmark",
        {
            "results": args.results,
            "threshold": args.threshold,
            "len_mode": args.len_mode,
            "method_id": args.method_id,
            "font": args.font,
        },
        inputs=[args.results] + ([args.font] if args.font else []),
        extra={"records": len(records)},
    )
    print(f"kept {len(records)} low-perturbation adversarial texts -> {args.out}")
    return 0


def cmd_train_builtin(args) -> int:
    samples = load_corpus(args.corpus)
    model = NaiveBayesClassifier.train(samples)
    model.save(args.out)
    acc = model.accuracy(samples)
    write_manifest(
        args.out,
        "train-builtin",
        {"corpus": args.corpus},
        inputs=[args.corpus],
        extra={"training_accuracy": acc, "labels": list(model.labels)},
    )
    print(f"trained on {len(samples)} samples, labels {list(model.labels)}, "
          f"training accuracy {acc:.4f} -> {args.out}")
    return 0


# -- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="glyphadv",
        description="Visually-imperceptible adversarial text attacks for abugida scripts.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "build-db",
        help="render an inventory and build the visual-similarity database",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    p.add_argument("inventory", help="syllable list: UTF-8, one per line, # comments")
    p.add_argument("font", help="font file covering the inventory")
    p.add_argument("--font-size", type=int, default=50, help="render size in pixels")
    p.add_argument("--threshold", type=float, default=0.8, help="lower similarity bound")
    p.add_argument("--out", required=True, help="database output path")
    p.add_argument("--export-table", default=None, help="also write a top-k neighbor table")
    p.add_argument("--top-k", type=int, default=5, help="neighbors per row in the table")
    p.add_argument("--jobs", type=int, default=1, help="parallel render workers")
    p.add_argument("--dump-glyphs", default=None, help="debug: dump per-syllable PNGs here")
    p.set_defaults(func=cmd_build_db)

    p = sub.add_parser(
        "attack",
        help="run the substitution attack over a corpus",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    p.add_argument("--db", required=True, help="similarity database path")
    p.add_argument("--classifier", required=True, help="builtin:<model_path> or http://<host:port>")
    p.add_argument("--input", required=True, help='corpus: JSON lines {"text","label"}')
    p.add_argument("--out", required=True, help="results output path (JSON lines)")
    p.add_argument(
        "--granularity", choices=["syllable", "word"], default="syllable", help="attack unit"
    )
    p.add_argument("--lexicon", default=None, help="word list for word granularity")
    p.add_argument("--budget", type=int, default=None, help="max classifier queries per attack")
    p.add_argument("--unk", default="[UNK]", help="mask token for saliency probing")
    p.add_argument(
        "--max-sub-ratio", type=float, default=None, help="cap substitutions at this fraction of units"
    )
    p.add_argument("--cap", type=int, default=10_000, help="word candidate product cap")
    p.add_argument("--jobs", type=int, default=1, help="concurrent attacks")
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser(
        "evaluate",
        help="aggregate attack results into the metric report",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    p.add_argument("--results", required=True, help="attack results path")
    p.add_argument("--out", required=True, help="report output path (JSON lines)")
    p.add_argument("--font", default=None, help="font for visual similarity (else absent)")
    p.add_argument("--font-size", type=int, default=50, help="render size in pixels")
    p.add_argument(
        "--embedder",
        default="none",
        help="semantic similarity source: none, freq, or http://<host:port>",
    )
    p.add_argument(
        "--pre-accuracy",
        type=float,
        default=None,
        help="override pre-attack accuracy (else derived from skip markers)",
    )
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser(
        "export-benchmark",
        help="export successful low-perturbation texts as a benchmark file",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    p.add_argument("--results", required=True, help="attack results path")
    p.add_argument("--out", required=True, help="benchmark output path (JSON lines)")
    p.add_argument("--threshold", type=float, default=0.1, help="strict relative edit-distance bound")
    p.add_argument(
        "--len-mode", choices=["codepoints", "syllables"], default="codepoints",
        help="denominator for relative edit distance",
    )
    p.add_argument("--font", default=None, help="font for per-record visual similarity")
    p.add_argument("--font-size", type=int, default=50, help="render size in pixels")
    p.add_argument("--method-id", default="visual-substitution", help="source method field")
    p.set_defaults(func=cmd_export_benchmark)

    p = sub.add_parser(
        "train-builtin",
        help="train the built-in bag-of-syllables classifier",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    p.add_argument("--corpus", required=True, help='JSON lines {"text","label"}')
    p.add_argument("--out", required=True, help="model output path")
    p.set_defaults(func=cmd_train_builtin)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except ClassifierError as exc:
        print(f"classifier error: {exc}", file=sys.stderr)
        return 3
    except (InputError, GlyphAdvError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
