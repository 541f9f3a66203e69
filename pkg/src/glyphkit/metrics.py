"""Scoring of generated visual text.

OCR-side metrics compare ground-truth words against recognized words:
exact match (case-sensitive and case-insensitive), and the average
per-ground-truth-word character edit distance to the aligned recognized
word. Embedding-side metrics are the cosine image-text score and the
Fréchet distance between Gaussians fitted to two feature sets.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .embeddings import EmbeddingSet
from .errors import (
    DimensionMismatch,
    EmptyBucket,
    EmptyGroundTruth,
    IndefiniteBeyondTolerance,
    NotSymmetric,
    TooFewSamples,
    ZeroVector,
)


def levenshtein(a: str, b: str) -> int:
    """Unit-cost insert/delete/substitute edit distance over Unicode scalars."""
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        append = cur.append
        for j, cb in enumerate(b, start=1):
            append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def _word_alignment(
    gt: Sequence[str], pred: Sequence[str], case_sensitive: bool
) -> tuple[int, list[str | None]]:
    """Word-level edit distance plus, per gt word, its aligned prediction.

    The DP backtrace prefers diagonal steps over deletions over insertions
    so alignment is deterministic. A gt word consumed by a deletion has no
    aligned prediction.
    """

    def norm(w: str) -> str:
        return w if case_sensitive else w.casefold()

    g = [norm(w) for w in gt]
    p = [norm(w) for w in pred]
    m, n = len(g), len(p)
    dp = [[0] * (n + 1) for _ in range(m + 1)]
    for i in range(m + 1):
        dp[i][0] = i
    for j in range(n + 1):
        dp[0][j] = j
    for i in range(1, m + 1):
        for j in range(1, n + 1):
            cost = 0 if g[i - 1] == p[j - 1] else 1
            dp[i][j] = min(dp[i - 1][j - 1] + cost, dp[i - 1][j] + 1, dp[i][j - 1] + 1)

    aligned: list[str | None] = [None] * m
    i, j = m, n
    while i > 0 or j > 0:
        if i > 0 and j > 0 and dp[i][j] == dp[i - 1][j - 1] + (0 if g[i - 1] == p[j - 1] else 1):
            aligned[i - 1] = pred[j - 1]
            i -= 1
            j -= 1
        elif i > 0 and dp[i][j] == dp[i - 1][j] + 1:
            i -= 1
        else:
            j -= 1
    return dp[m][n], aligned


def word_error_rate(gt: Sequence[str], pred: Sequence[str], case_sensitive: bool = True) -> float:
    """Word-level edit distance divided by the ground-truth length."""
    if not gt:
        raise EmptyGroundTruth("ground truth has no words")
    distance, _ = _word_alignment(gt, pred, case_sensitive)
    return distance / len(gt)


@dataclass(frozen=True)
class CaseResult:
    case_id: str
    exact: bool
    exact_ci: bool
    ld: float
    matched: tuple[tuple[str, str | None], ...]
    wer: float
    contains: bool

    def to_dict(self) -> dict:
        return {
            "case_id": self.case_id,
            "exact": self.exact,
            "exact_ci": self.exact_ci,
            "ld": self.ld,
            "wer": self.wer,
            "contains": self.contains,
            "matched": [[g, p] for g, p in self.matched],
        }


def evaluate_case(case_id: str, gt_words: Sequence[str], pred_words: Sequence[str]) -> CaseResult:
    """Score one generated image's recognized words against ground truth.

    `pred_words` must already be in reading order. The character distance
    is computed per ground-truth word against its aligned prediction from
    the word-level backtrace; an unmatched ground-truth word contributes
    its own length. `contains` is the lenient view: every ground-truth
    word appears verbatim somewhere in the prediction.
    """
    if not gt_words:
        raise EmptyGroundTruth(f"case {case_id}: ground truth has no words")
    distance, aligned = _word_alignment(gt_words, pred_words, case_sensitive=True)
    wer = distance / len(gt_words)
    distance_ci, _ = _word_alignment(gt_words, pred_words, case_sensitive=False)
    char_total = 0
    matched = []
    for g, p in zip(gt_words, aligned):
        char_total += levenshtein(g, p) if p is not None else len(g)
        matched.append((g, p))
    pred_set = set(pred_words)
    return CaseResult(
        case_id=case_id,
        exact=distance == 0,
        exact_ci=distance_ci == 0,
        ld=char_total / len(gt_words),
        matched=tuple(matched),
        wer=wer,
        contains=all(g in pred_set for g in gt_words),
    )


@dataclass(frozen=True)
class BucketScores:
    acc: float
    acc_ci: float
    ld: float
    contains_rate: float
    case_count: int

    def to_dict(self) -> dict:
        return {
            "acc": self.acc,
            "acc_ci": self.acc_ci,
            "ld": self.ld,
            "contains_rate": self.contains_rate,
            "case_count": self.case_count,
        }


@dataclass(frozen=True)
class EvalReport:
    per_bucket: dict[str, BucketScores]
    overall: BucketScores
    clip_score_mean: float | None = None
    fid_value: float | None = None

    def to_dict(self) -> dict:
        out = {
            "per_bucket": {name: s.to_dict() for name, s in self.per_bucket.items()},
            "overall": self.overall.to_dict(),
        }
        if self.clip_score_mean is not None:
            out["clip_score"] = self.clip_score_mean
        if self.fid_value is not None:
            out["fid"] = self.fid_value
        return out


def aggregate(results_by_bucket: Mapping[str, Sequence[CaseResult]]) -> EvalReport:
    """Per-bucket means, then an unweighted mean of the bucket means."""
    per_bucket = {}
    for name in results_by_bucket:
        results = list(results_by_bucket[name])
        if not results:
            raise EmptyBucket(f"bucket {name!r} has no cases")
        count = len(results)
        per_bucket[name] = BucketScores(
            acc=sum(r.exact for r in results) / count,
            acc_ci=sum(r.exact_ci for r in results) / count,
            ld=sum(r.ld for r in results) / count,
            contains_rate=sum(r.contains for r in results) / count,
            case_count=count,
        )
    if not per_bucket:
        raise EmptyBucket("no buckets to aggregate")
    buckets = list(per_bucket.values())
    n = len(buckets)
    overall = BucketScores(
        acc=sum(b.acc for b in buckets) / n,
        acc_ci=sum(b.acc_ci for b in buckets) / n,
        ld=sum(b.ld for b in buckets) / n,
        contains_rate=sum(b.contains_rate for b in buckets) / n,
        case_count=sum(b.case_count for b in buckets),
    )
    return EvalReport(per_bucket=per_bucket, overall=overall)


def clip_score(image_embeddings: EmbeddingSet, text_embeddings: EmbeddingSet) -> tuple[np.ndarray, float]:
    """100x cosine similarity per paired row, plus the mean."""
    a = image_embeddings.features
    b = text_embeddings.features
    if a.shape != b.shape:
        raise DimensionMismatch(f"embedding shapes differ: {a.shape} vs {b.shape}")
    norm_a = np.linalg.norm(a, axis=1)
    norm_b = np.linalg.norm(b, axis=1)
    zero = np.nonzero((norm_a == 0) | (norm_b == 0))[0]
    if zero.size:
        raise ZeroVector(f"row {int(zero[0])} has zero norm")
    scores = 100.0 * np.einsum("ij,ij->i", a, b) / (norm_a * norm_b)
    return scores, float(scores.mean())


SYMMETRY_TOL = 1e-8
EIGENVALUE_TOL = -1e-8


def matrix_sqrt_psd(C: np.ndarray) -> np.ndarray:
    """Symmetric PSD square root via eigendecomposition.

    Eigenvalues in [-1e-8, 0) are treated as rounding noise and clamped to
    zero; anything lower is a real indefiniteness and rejected.
    """
    C = np.asarray(C, dtype=np.float64)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise NotSymmetric(f"expected a square matrix, got shape {C.shape}")
    asym = np.abs(C - C.T).max() if C.size else 0.0
    if asym > SYMMETRY_TOL:
        raise NotSymmetric(f"asymmetry {asym:.3e} exceeds {SYMMETRY_TOL:.0e}")
    sym = (C + C.T) / 2.0
    eigvals, eigvecs = np.linalg.eigh(sym)
    if eigvals.size and eigvals.min() < EIGENVALUE_TOL:
        raise IndefiniteBeyondTolerance(f"eigenvalue {eigvals.min():.3e} below {EIGENVALUE_TOL:.0e}")
    roots = np.sqrt(np.clip(eigvals, 0.0, None))
    S = (eigvecs * roots) @ eigvecs.T
    return (S + S.T) / 2.0


def fid(real: EmbeddingSet, gen: EmbeddingSet) -> float:
    """Fréchet distance between Gaussians fitted to the two feature sets.

    Uses unbiased covariances and the PSD-sandwich form
    sqrt(C1^1/2 C2 C1^1/2) so the inner square root stays symmetric.
    Tiny negative totals from rounding are clamped to zero.
    """
    if real.count < 2 or gen.count < 2:
        raise TooFewSamples("each embedding set needs at least 2 rows for a covariance")
    if real.dim != gen.dim:
        raise DimensionMismatch(f"dimensions differ: {real.dim} vs {gen.dim}")
    mu1 = real.features.mean(axis=0)
    mu2 = gen.features.mean(axis=0)
    C1 = np.atleast_2d(np.cov(real.features, rowvar=False))
    C2 = np.atleast_2d(np.cov(gen.features, rowvar=False))
    S1 = matrix_sqrt_psd(C1)
    inner = S1 @ C2 @ S1
    cross = matrix_sqrt_psd(inner)
    diff = mu1 - mu2
    value = float(diff @ diff + np.trace(C1) + np.trace(C2) - 2.0 * np.trace(cross))
    if -1e-6 <= value < 0.0:
        return 0.0
    return value
