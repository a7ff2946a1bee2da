"""Score aggregation: bootstrap standard errors, byte-perplexity, linear CKA."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

_LN2 = math.log(2.0)


@dataclass
class EvalReport:
    metric: str
    score: float
    stderr: float
    n: int
    config: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "metric": self.metric,
            "score": self.score,
            "stderr": self.stderr,
            "n": self.n,
            "config": self.config,
        }


def accuracy_with_stderr(
    per_item_scores: Sequence[float], bootstrap_iters: int = 1000, seed: int = 0
) -> EvalReport:
    """Mean of per-item scores with a bootstrap standard error.

    The stderr is the standard deviation of bootstrap-resampled means; it is
    exactly 0 when all per-item scores are equal.
    """
    scores = np.asarray(per_item_scores, dtype=float)
    if scores.ndim != 1 or scores.size < 1:
        raise ValueError("per-item scores must be a non-empty 1-d sequence")
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, scores.size, size=(bootstrap_iters, scores.size))
    means = scores[idx].mean(axis=1)
    return EvalReport(
        metric="accuracy",
        score=float(scores.mean()),
        stderr=float(means.std()),
        n=int(scores.size),
        config={"bootstrap_iters": bootstrap_iters, "seed": seed},
    )


def _check_logprob_record(rec: Mapping) -> None:
    if rec["byte_count"] <= 0:
        raise ValueError(f"document {rec.get('id', '?')} has non-positive byte_count")
    for lp in rec["token_logprobs"]:
        if not math.isfinite(lp) or lp > 0:
            raise ValueError(
                f"document {rec.get('id', '?')} has invalid token logprob {lp!r}"
            )


def byte_ppl(records: Iterable[Mapping]) -> float:
    """Byte-level perplexity pooled over all given documents.

    Computed as 2 ** bits-per-byte, i.e. exp of total negative log-likelihood
    divided by total reference bytes; comparable across tokenizers because the
    denominator is bytes, not tokens.
    """
    total_nll = 0.0
    total_bytes = 0
    logprobs: list = []
    for rec in records:
        _check_logprob_record(rec)
        logprobs.extend(rec["token_logprobs"])
        total_bytes += rec["byte_count"]
    if total_bytes == 0:
        raise ValueError("byte_ppl needs at least one document with a positive byte count")
    total_nll = -math.fsum(logprobs)
    bits_per_byte = total_nll / total_bytes / _LN2
    return 2.0 ** bits_per_byte


def byte_ppl_by_lang(records: Iterable[Mapping]) -> dict:
    groups: dict[str, list] = {}
    for rec in records:
        groups.setdefault(rec["lang"], []).append(rec)
    return {lang: byte_ppl(recs) for lang, recs in sorted(groups.items())}


def linear_cka(x, y) -> float:
    """Linear centered-kernel-alignment similarity between two representation
    matrices with matching rows (examples); columns may differ.

    Invariant to orthogonal transforms and isotropic scaling of either matrix.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 2 or y.ndim != 2:
        raise ValueError("inputs must be 2-d matrices")
    if x.shape[0] != y.shape[0]:
        raise ValueError(f"row counts differ: {x.shape[0]} vs {y.shape[0]}")
    if x.shape[0] < 2:
        raise ValueError("need at least 2 rows")
    if np.isnan(x).any() or np.isnan(y).any():
        raise ValueError("inputs must not contain NaN")
    xc = x - x.mean(axis=0)
    yc = y - y.mean(axis=0)
    x_norm = np.linalg.norm(xc.T @ xc)
    y_norm = np.linalg.norm(yc.T @ yc)
    if x_norm == 0.0 or y_norm == 0.0:
        raise ValueError("zero-variance matrix has no defined alignment")
    num = np.linalg.norm(yc.T @ xc) ** 2
    return float(num / (x_norm * y_norm))
