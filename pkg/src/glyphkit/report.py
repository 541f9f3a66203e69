"""Join benchmark cases with OCR predictions and embeddings into a report.

The generator and its OCR/encoder stages are external; they hand back a
prediction JSONL (recognized words per case) and optional embedding files.
This module lines those up with the emitted cases and produces the final
scores. A case without a prediction is scored against empty OCR output,
the worst case, and tallied so silent drops cannot inflate accuracy.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .benchmark import BUCKET_NAMES
from .embeddings import EmbeddingSet, read_embeddings
from .errors import DimensionMismatch
from .metrics import CaseResult, aggregate, clip_score, evaluate_case, fid


def reading_order(words: Sequence[Mapping]) -> list[str]:
    """Recognized strings sorted by their quads' top edge, then left edge.

    Entries without quads keep their given position at the end of the sort
    key space, preserving relative order.
    """
    def key(item):
        i, w = item
        quad = w.get("quad")
        if quad:
            xs = [float(p[0]) for p in quad]
            ys = [float(p[1]) for p in quad]
            return (min(ys), min(xs), i)
        return (float("inf"), float("inf"), i)

    ordered = sorted(enumerate(words), key=key)
    return [str(w["text"]) for _, w in ordered]


def load_cases(path: Path | str) -> list[dict]:
    cases = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                cases.append(json.loads(line))
    return cases


def load_predictions(path: Path | str) -> dict[str, list[str]]:
    """Map case_id -> recognized words in reading order."""
    preds = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            preds[str(obj["case_id"])] = reading_order(obj.get("words", []))
    return preds


def evaluate_cases(
    cases: Iterable[Mapping], predictions: Mapping[str, Sequence[str]]
) -> tuple[dict[str, list[CaseResult]], int]:
    """Score every case, grouping by bucket; returns also the missing count."""
    grouped: dict[str, list[CaseResult]] = {}
    missing = 0
    for case in cases:
        case_id = str(case["case_id"])
        bucket = str(case.get("bucket", "all"))
        gt_words = str(case["word"]).split()
        pred = predictions.get(case_id)
        if pred is None:
            pred = []
            missing += 1
        grouped.setdefault(bucket, []).append(evaluate_case(case_id, gt_words, list(pred)))
    ordered = {}
    for name in BUCKET_NAMES:
        if name in grouped:
            ordered[name] = grouped.pop(name)
    for name in sorted(grouped):
        ordered[name] = grouped[name]
    return ordered, missing


def build_report(
    cases: Sequence[Mapping],
    predictions: Mapping[str, Sequence[str]],
    clip_image: EmbeddingSet | None = None,
    clip_text: EmbeddingSet | None = None,
    fid_real: EmbeddingSet | None = None,
    fid_gen: EmbeddingSet | None = None,
) -> dict:
    grouped, missing = evaluate_cases(cases, predictions)
    report = aggregate(grouped)

    out = report.to_dict()
    out["metadata"] = {
        "cases": len(cases),
        "missing_predictions": missing,
        "acc_note": "a case is exact iff its word error rate is 0; contains_rate is the lenient contains-word view",
        "clip_score_note": "unclamped 100x cosine similarity",
    }
    per_case = [r.to_dict() for results in grouped.values() for r in results]

    if clip_image is not None or clip_text is not None:
        if clip_image is None or clip_text is None:
            raise DimensionMismatch("clip scoring needs both image and text embeddings")
        if clip_image.count != len(cases):
            raise DimensionMismatch(
                f"clip image embeddings hold {clip_image.count} rows for {len(cases)} cases"
            )
        scores, mean = clip_score(clip_image, clip_text)
        out["clip_score"] = mean
        by_id = {c["case_id"]: float(s) for c, s in zip(cases, scores)}
        for entry in per_case:
            if entry["case_id"] in by_id:
                entry["clip_score"] = by_id[entry["case_id"]]

    if fid_real is not None or fid_gen is not None:
        if fid_real is None or fid_gen is None:
            raise DimensionMismatch("fid needs both a real and a generated embedding set")
        out["fid"] = fid(fid_real, fid_gen)

    out["cases"] = per_case
    return out


def run_file_eval(
    cases_path: Path | str,
    predictions_path: Path | str,
    clip_image_path: Path | str | None = None,
    clip_text_path: Path | str | None = None,
    fid_real_path: Path | str | None = None,
    fid_gen_path: Path | str | None = None,
) -> dict:
    cases = load_cases(cases_path)
    predictions = load_predictions(predictions_path)
    return build_report(
        cases,
        predictions,
        clip_image=read_embeddings(clip_image_path) if clip_image_path else None,
        clip_text=read_embeddings(clip_text_path) if clip_text_path else None,
        fid_real=read_embeddings(fid_real_path) if fid_real_path else None,
        fid_gen=read_embeddings(fid_gen_path) if fid_gen_path else None,
    )
