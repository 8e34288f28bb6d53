"""File formats for corpora and attack results, plus run manifests.

Corpus: line-delimited JSON objects {"text": ..., "label": ...}.
Results: a header record, then one JSON object per attack result, written
in input order so files are reproducible. Manifests are sidecar files
(<output>.manifest.json) carrying timestamps and input hashes; keeping
timestamps out of the outputs themselves makes reruns byte-identical.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict
from datetime import datetime, timezone
from pathlib import Path
from typing import IO, Iterable, Sequence

from .attack import AttackResult, PositionScore, SubstitutionStep
from .errors import InputError
from .segmentation import Granularity

RESULTS_FORMAT = "glyphadv-results"
RESULTS_VERSION = 1


# -- corpus ---------------------------------------------------------------


def load_corpus(path: str | Path) -> list[tuple[str, str]]:
    samples: list[tuple[str, str]] = []
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise InputError(f"cannot read corpus {path}: {exc}") from exc
    for ln, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
            samples.append((obj["text"], obj["label"]))
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise InputError(
                f'{path}:{ln}: expected {{"text": ..., "label": ...}}: {exc}'
            ) from exc
    if not samples:
        raise InputError(f"{path}: corpus is empty")
    return samples


def write_corpus(path: str | Path, samples: Iterable[tuple[str, str]]) -> None:
    lines = [
        json.dumps({"text": t, "label": l}, ensure_ascii=False, separators=(",", ":"))
        for t, l in samples
    ]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


# -- attack results -------------------------------------------------------


def result_to_dict(res: AttackResult) -> dict:
    d = asdict(res)
    d["granularity"] = res.granularity.value
    return d


def result_from_dict(d: dict) -> AttackResult:
    return AttackResult(
        original_text=d["original_text"],
        adversarial_text=d["adversarial_text"],
        success=d["success"],
        original_label=d["original_label"],
        final_label=d["final_label"],
        trace=tuple(SubstitutionStep(**step) for step in d["trace"]),
        queries=d["queries"],
        granularity=Granularity(d["granularity"]),
        gold_label=d.get("gold_label"),
        skipped=d.get("skipped", False),
        failure_reason=d.get("failure_reason"),
        position_scores=tuple(PositionScore(**ps) for ps in d.get("position_scores", ())),
        truncated_positions=tuple(d.get("truncated_positions", ())),
    )


def results_header() -> str:
    return json.dumps(
        {"format": RESULTS_FORMAT, "version": RESULTS_VERSION},
        ensure_ascii=False,
        separators=(",", ":"),
    )


def write_result_line(fh: IO[str], res: AttackResult) -> None:
    fh.write(json.dumps(result_to_dict(res), ensure_ascii=False, separators=(",", ":")))
    fh.write("\n")


def write_results(path: str | Path, results: Sequence[AttackResult]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(results_header() + "\n")
        for res in results:
            write_result_line(fh, res)


def load_results(path: str | Path) -> list[AttackResult]:
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise InputError(f"cannot read results {path}: {exc}") from exc
    if not lines:
        raise InputError(f"{path}: empty results file")
    try:
        head = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: bad results header: {exc}") from exc
    if not isinstance(head, dict) or head.get("format") != RESULTS_FORMAT:
        raise InputError(f"{path}: not an attack results file")
    if head.get("version") != RESULTS_VERSION:
        raise InputError(f"{path}: unsupported results version {head.get('version')!r}")
    out = []
    for ln, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        try:
            out.append(result_from_dict(json.loads(line)))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise InputError(f"{path}:{ln}: corrupt result record: {exc}") from exc
    return out


# -- manifests ------------------------------------------------------------


def sha256_file(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(
    out_path: str | Path,
    command: str,
    args: dict,
    inputs: Sequence[str | Path] = (),
    extra: dict | None = None,
) -> Path:
    """Sidecar <out_path>.manifest.json describing how the output was made."""
    manifest = {
        "command": command,
        "created_utc": datetime.now(timezone.utc).isoformat(),
        "args": args,
        "inputs": {str(p): sha256_file(p) for p in inputs if Path(p).is_file()},
        "output": str(out_path),
    }
    if Path(out_path).is_file():
        manifest["output_sha256"] = sha256_file(out_path)
    if extra:
        manifest["extra"] = extra
    side = Path(str(out_path) + ".manifest.json")
    side.write_text(
        json.dumps(manifest, ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
    )
    return side
