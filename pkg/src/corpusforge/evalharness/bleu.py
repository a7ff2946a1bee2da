"""BLEU with 13a pre-tokenization and exponential smoothing.

Matches the standard scorer configuration used for translation evaluation:
mixed case, 13a tokenization, n-grams 1-4, exp smoothing for zero counts,
multiplicative brevity penalty. Corpus scores use the full n-gram order
(eff:no); sentence scores cap the geometric mean at the highest order the
segment actually has (effective order), which is the usual convention for
single segments and keeps short identical pairs at 100.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

MAX_NGRAM_ORDER = 4

# 13a tokenization: split out punctuation; period/comma only outside numbers;
# dash after a digit.
_13A_RULES = [
    (re.compile(r"([\{-\~\[-\` -\&\(-\+\:-\@\/])"), r" \1 "),
    (re.compile(r"([^0-9])([\.,])"), r"\1 \2 "),
    (re.compile(r"([\.,])([^0-9])"), r" \1 \2"),
    (re.compile(r"([0-9])(-)"), r"\1 \2 "),
]


def tokenize_13a(line: str) -> list[str]:
    line = line.replace("<skipped>", "")
    line = line.replace("-\n", "")
    line = line.replace("\n", " ")
    if "&" in line:
        line = line.replace("&quot;", '"')
        line = line.replace("&amp;", "&")
        line = line.replace("&lt;", "<")
        line = line.replace("&gt;", ">")
    line = f" {line} "
    for pattern, repl in _13A_RULES:
        line = pattern.sub(repl, line)
    return line.split()


@dataclass(frozen=True)
class SegmentPair:
    candidate: str
    references: tuple

    def __post_init__(self):
        if not self.references:
            raise ValueError("a segment needs at least one reference")


@dataclass
class BleuResult:
    score: float
    precisions: list = field(default_factory=list)
    brevity_penalty: float = 1.0
    sys_len: int = 0
    ref_len: int = 0
    config: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "score": self.score,
            "precisions": self.precisions,
            "brevity_penalty": self.brevity_penalty,
            "sys_len": self.sys_len,
            "ref_len": self.ref_len,
            "config": self.config,
        }


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def _closest_ref_len(hyp_len: int, ref_lens: Sequence[int]) -> int:
    # ties go to the shorter reference
    return min(ref_lens, key=lambda rl: (abs(rl - hyp_len), rl))


def corpus_bleu(segments: Iterable[SegmentPair], effective_order: bool = False) -> BleuResult:
    """Corpus-level BLEU over 13a-tokenized segments.

    Statistics (clipped matches, totals, lengths) are summed over segments, so
    the score is invariant to segment order.
    """
    segments = list(segments)
    if not segments:
        raise ValueError("corpus_bleu requires a non-empty corpus")

    correct = [0] * MAX_NGRAM_ORDER
    total = [0] * MAX_NGRAM_ORDER
    sys_len = 0
    ref_len = 0
    for seg in segments:
        hyp = tokenize_13a(seg.candidate)
        refs = [tokenize_13a(r) for r in seg.references]
        sys_len += len(hyp)
        ref_len += _closest_ref_len(len(hyp), [len(r) for r in refs])
        for n in range(1, MAX_NGRAM_ORDER + 1):
            hyp_counts = _ngrams(hyp, n)
            if not hyp_counts:
                continue
            max_ref: Counter = Counter()
            for ref in refs:
                for gram, cnt in _ngrams(ref, n).items():
                    if cnt > max_ref[gram]:
                        max_ref[gram] = cnt
            total[n - 1] += sum(hyp_counts.values())
            correct[n - 1] += sum(min(cnt, max_ref[gram]) for gram, cnt in hyp_counts.items())

    precisions = [0.0] * MAX_NGRAM_ORDER
    smooth_factor = 1.0
    eff_order = MAX_NGRAM_ORDER
    for n in range(1, MAX_NGRAM_ORDER + 1):
        if total[n - 1] == 0:
            break
        if effective_order:
            eff_order = n
        if correct[n - 1] == 0:
            # smoothing rescues zero counts at the higher orders only; a
            # candidate with no unigram match at all scores 0, not epsilon
            if n > 1:
                smooth_factor *= 2.0
                precisions[n - 1] = 100.0 / (smooth_factor * total[n - 1])
        else:
            precisions[n - 1] = 100.0 * correct[n - 1] / total[n - 1]

    if sys_len == 0:
        bp = 0.0
    elif sys_len < ref_len:
        bp = math.exp(1.0 - ref_len / sys_len)
    else:
        bp = 1.0

    used = precisions[:eff_order]
    if any(p == 0.0 for p in used):
        score = 0.0
    elif all(p == used[0] for p in used):
        # geometric mean of equal values is that value; keeps identity at 100.0
        score = bp * used[0]
    else:
        score = bp * math.exp(sum(math.log(p) for p in used) / eff_order)

    return BleuResult(
        score=score,
        precisions=precisions,
        brevity_penalty=bp,
        sys_len=sys_len,
        ref_len=ref_len,
        config={
            "case": "mixed",
            "tok": "13a",
            "smooth": "exp",
            "eff": "yes" if effective_order else "no",
            "nrefs": max(len(s.references) for s in segments),
        },
    )


def sentence_bleu(candidate: str, references: Sequence[str]) -> float:
    """Single-segment BLEU (effective order), e.g. for per-example filters."""
    pair = SegmentPair(candidate, tuple(references))
    return corpus_bleu([pair], effective_order=True).score
