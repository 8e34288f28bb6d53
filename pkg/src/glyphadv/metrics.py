"""Evaluation metrics over attack runs, and the filtered benchmark export.

Accuracy accounting: a skipped sample (already misclassified) counts as
incorrect both pre- and post-attack; a failed attack on a correctly
classified sample stays correct post-attack; a successful attack flips a
correct sample to incorrect. The accuracy drop is pre minus post. Mean edit
distance, visual similarity and semantic similarity are computed over
successful attacks only.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Protocol, Sequence

from .attack import AttackResult
from .errors import InputError
from .rendering import FontRenderer
from .segmentation import segment_syllables
from .similarity import ncc

BENCHMARK_FORMAT = "glyphadv-benchmark"
BENCHMARK_VERSION = 1


def levenshtein(a: str, b: str) -> int:
    """Edit distance where every Unicode scalar is one letter."""
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    if len(b) < len(a):
        a, b = b, a
    prev = list(range(len(a) + 1))
    for j, cb in enumerate(b, start=1):
        cur = [j]
        for i, ca in enumerate(a, start=1):
            cur.append(
                min(
                    prev[i] + 1,  # deletion
                    cur[i - 1] + 1,  # insertion
                    prev[i - 1] + (ca != cb),  # substitution
                )
            )
        prev = cur
    return prev[len(a)]


def visual_similarity(a: str, b: str, renderer: FontRenderer) -> float:
    """Correlation of the two texts rendered on one shared canvas."""
    bitmaps = renderer.render_shared([a, b])
    return ncc(bitmaps[0], bitmaps[1])


class Embedder(Protocol):
    def embed(self, texts: Sequence[str]) -> list[list[float]]: ...


class SyllableFrequencyEmbedder:
    """Fallback embedding: syllable term-frequency vectors.

    The basis is the union of syllables across the batch; cosine between two
    texts does not depend on the extra zero dimensions, so vectors are
    comparable within one embed() call.
    """

    def embed(self, texts: Sequence[str]) -> list[list[float]]:
        token_lists = [segment_syllables(t).attackable_surfaces() for t in texts]
        basis = sorted({tok for toks in token_lists for tok in toks})
        index = {tok: i for i, tok in enumerate(basis)}
        out = []
        for toks in token_lists:
            vec = [0.0] * len(basis)
            for tok in toks:
                vec[index[tok]] += 1.0
            out.append(vec)
        return out


def cosine(u: Sequence[float], v: Sequence[float]) -> float:
    if len(u) != len(v):
        raise ValueError(f"vector dimensions differ: {len(u)} vs {len(v)}")
    if list(u) == list(v):
        return 1.0
    nu = math.sqrt(sum(x * x for x in u))
    nv = math.sqrt(sum(x * x for x in v))
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return sum(x * y for x, y in zip(u, v)) / (nu * nv)


def semantic_similarity(a: str, b: str, embedder: Embedder) -> float:
    vecs = embedder.embed([a, b])
    return cosine(vecs[0], vecs[1])


@dataclass(frozen=True)
class EvalRow:
    original_text: str
    adversarial_text: str
    gold_label: str | None
    original_label: str
    final_label: str
    success: bool
    skipped: bool
    queries: int
    ld: int | None = None  # successful attacks only
    rel_ld: float | None = None
    vs: float | None = None
    cs: float | None = None


@dataclass(frozen=True)
class EvalReport:
    n_total: int
    n_skipped: int
    n_attacked: int
    n_success: int
    pre_accuracy: float
    post_accuracy: float
    accuracy_drop: float
    mean_ld: float | None
    mean_rel_ld: float | None
    mean_vs: float | None
    mean_cs: float | None
    rows: tuple[EvalRow, ...]
    notes: tuple[str, ...]


def evaluate_run(
    results: Sequence[AttackResult],
    clf_accuracy_pre: float | None = None,
    renderer: FontRenderer | None = None,
    embedder: Embedder | None = None,
) -> EvalReport:
    """Aggregate a result list into the standard report.

    Visual similarity needs a renderer and semantic similarity an embedder;
    when one is missing the metric is reported absent (None), never faked.
    `clf_accuracy_pre` overrides the pre-attack accuracy derived from the
    skip markers (useful when it was measured on a larger sample).
    """
    if not results:
        raise InputError("no attack results to evaluate")
    n = len(results)
    skipped = sum(1 for r in results if r.skipped)
    succeeded = sum(1 for r in results if r.success)
    attacked = n - skipped
    derived_pre = attacked / n
    pre = clf_accuracy_pre if clf_accuracy_pre is not None else derived_pre
    post = (attacked - succeeded) / n
    rows = []
    lds: list[int] = []
    rel_lds: list[float] = []
    vss: list[float] = []
    css: list[float] = []
    for r in results:
        ld = rel_ld = vs = cs = None
        if r.success:
            ld = levenshtein(r.original_text, r.adversarial_text)
            rel_ld = ld / len(r.original_text) if r.original_text else 0.0
            lds.append(ld)
            rel_lds.append(rel_ld)
            if renderer is not None:
                vs = visual_similarity(r.original_text, r.adversarial_text, renderer)
                vss.append(vs)
            if embedder is not None:
                cs = semantic_similarity(r.original_text, r.adversarial_text, embedder)
                css.append(cs)
        rows.append(
            EvalRow(
                original_text=r.original_text,
                adversarial_text=r.adversarial_text,
                gold_label=r.gold_label,
                original_label=r.original_label,
                final_label=r.final_label,
                success=r.success,
                skipped=r.skipped,
                queries=r.queries,
                ld=ld,
                rel_ld=rel_ld,
                vs=vs,
                cs=cs,
            )
        )
    notes = [
        "mean ld/vs/cs are over successful attacks only",
        "skipped samples count as incorrect pre- and post-attack",
        "failed attacks on correctly classified samples stay correct post-attack",
    ]
    if clf_accuracy_pre is not None:
        notes.append(
            f"pre-attack accuracy overridden to {clf_accuracy_pre} "
            f"(derived from results: {derived_pre:.6f})"
        )
    return EvalReport(
        n_total=n,
        n_skipped=skipped,
        n_attacked=attacked,
        n_success=succeeded,
        pre_accuracy=pre,
        post_accuracy=post,
        accuracy_drop=pre - post,
        mean_ld=sum(lds) / len(lds) if lds else None,
        mean_rel_ld=sum(rel_lds) / len(rel_lds) if rel_lds else None,
        mean_vs=sum(vss) / len(vss) if vss else None,
        mean_cs=sum(css) / len(css) if css else None,
        rows=tuple(rows),
        notes=tuple(notes),
    )


def report_to_text(report: EvalReport) -> str:
    def fmt(x: float | None) -> str:
        return "absent" if x is None else f"{x:.4f}"

    lines = [
        f"samples:          {report.n_total} "
        f"(skipped {report.n_skipped}, attacked {report.n_attacked}, "
        f"flipped {report.n_success})",
        f"pre-attack acc:   {report.pre_accuracy:.4f}",
        f"post-attack acc:  {report.post_accuracy:.4f}",
        f"accuracy drop:    {report.accuracy_drop:.4f}",
        f"mean edit dist:   {fmt(report.mean_ld)}",
        f"mean relative ld: {fmt(report.mean_rel_ld)}",
        f"mean visual sim:  {fmt(report.mean_vs)}",
        f"mean semantic:    {fmt(report.mean_cs)}",
    ]
    for note in report.notes:
        lines.append(f"note: {note}")
    return "\n".join(lines) + "\n"


def report_to_jsonl(report: EvalReport) -> str:
    head = asdict(report)
    rows = head.pop("rows")
    head["record"] = "summary"
    lines = [json.dumps(head, ensure_ascii=False, separators=(",", ":"))]
    for row in rows:
        row["record"] = "sample"
        lines.append(json.dumps(row, ensure_ascii=False, separators=(",", ":")))
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class BenchmarkRecord:
    original: str
    adversarial: str
    gold_label: str | None
    method: str
    ld: int
    rel_ld: float
    vs: float | None
    annotation: str = "pending"


def _text_length(text: str, len_mode: str) -> int:
    if len_mode == "codepoints":
        return len(text)
    if len_mode == "syllables":
        return len(segment_syllables(text).attackable_surfaces())
    raise ValueError(f"unknown len_mode {len_mode!r} (use 'codepoints' or 'syllables')")


def export_benchmark(
    results: Sequence[AttackResult],
    path: str | Path,
    rel_ld_threshold: float = 0.1,
    len_mode: str = "codepoints",
    renderer: FontRenderer | None = None,
    method: str = "visual-substitution",
) -> list[BenchmarkRecord]:
    """Write successful, low-perturbation adversarial texts as a benchmark.

    A record is kept when levenshtein(original, adversarial) divided by the
    original's length is strictly below the threshold. Human quality ratings
    are a separate later stage; every record carries annotation="pending".
    """
    header = {
        "format": BENCHMARK_FORMAT,
        "version": BENCHMARK_VERSION,
        "rel_ld_threshold": rel_ld_threshold,
        "len_mode": len_mode,
        "method": method,
    }
    records: list[BenchmarkRecord] = []
    for r in results:
        if not r.success:
            continue
        length = _text_length(r.original_text, len_mode)
        if length == 0:
            continue
        ld = levenshtein(r.original_text, r.adversarial_text)
        rel = ld / length
        if not rel < rel_ld_threshold:
            continue
        vs = (
            visual_similarity(r.original_text, r.adversarial_text, renderer)
            if renderer is not None
            else None
        )
        records.append(
            BenchmarkRecord(
                original=r.original_text,
                adversarial=r.adversarial_text,
                gold_label=r.gold_label,
                method=method,
                ld=ld,
                rel_ld=rel,
                vs=vs,
            )
        )
    lines = [json.dumps(header, ensure_ascii=False, separators=(",", ":"))]
    lines.extend(
        json.dumps(asdict(rec), ensure_ascii=False, separators=(",", ":")) for rec in records
    )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return records


def load_benchmark(path: str | Path) -> tuple[dict, list[BenchmarkRecord]]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise InputError(f"{path}: empty benchmark file")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: bad header: {exc}") from exc
    if not isinstance(header, dict) or header.get("format") != BENCHMARK_FORMAT:
        raise InputError(f"{path}: not a benchmark file")
    if header.get("version") != BENCHMARK_VERSION:
        raise InputError(f"{path}: unsupported benchmark version {header.get('version')!r}")
    records = []
    for ln, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        try:
            d = json.loads(line)
            records.append(
                BenchmarkRecord(
                    original=d["original"],
                    adversarial=d["adversarial"],
                    gold_label=d.get("gold_label"),
                    method=d["method"],
                    ld=int(d["ld"]),
                    rel_ld=float(d["rel_ld"]),
                    vs=None if d.get("vs") is None else float(d["vs"]),
                    annotation=d.get("annotation", "pending"),
                )
            )
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise InputError(f"{path}:{ln}: corrupt benchmark record: {exc}") from exc
    return header, records
