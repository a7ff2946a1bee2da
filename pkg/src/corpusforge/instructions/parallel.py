"""Parallel-data operations: translation instructions, copy filtering,
sentence concatenation, and translation-tuning sampling."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from ..evalharness.bleu import sentence_bleu
from ..sampler import _sub_rng
from .chat import ChatExample
from .translate import translation_chat_example


@dataclass(frozen=True)
class ParallelPair:
    src_lang: str
    tgt_lang: str
    src_text: str
    tgt_text: str

    def reverse(self) -> "ParallelPair":
        return ParallelPair(self.tgt_lang, self.src_lang, self.tgt_text, self.src_text)

    def to_record(self) -> dict:
        return {
            "src_lang": self.src_lang,
            "tgt_lang": self.tgt_lang,
            "src_text": self.src_text,
            "tgt_text": self.tgt_text,
        }

    @staticmethod
    def from_record(rec: Mapping) -> "ParallelPair":
        return ParallelPair(rec["src_lang"], rec["tgt_lang"], rec["src_text"], rec["tgt_text"])


def add_translation_instructions(
    pairs_by_pair: Mapping[str, Sequence[ParallelPair]],
    per_direction: int = 250,
    seed: int = 0,
) -> tuple[list, dict]:
    """Emit translation-task chat examples for both directions of every pair.

    Each sentence pair serves one direction only, so a pair contributes up to
    2 * per_direction examples; when fewer are available everything is taken
    and the shortfall reported (never an error). For an odd take, the listed
    direction gets the extra example.
    """
    examples: list[ChatExample] = []
    report: dict = {}
    total = 0
    for pair_key in sorted(pairs_by_pair):
        pool = list(pairs_by_pair[pair_key])
        requested = 2 * per_direction
        take = min(requested, len(pool))
        idx = _sub_rng(seed, "trinst", pair_key).sample(range(len(pool)), take)
        forward = take - take // 2
        for j, i in enumerate(idx):
            pair = pool[i] if j < forward else pool[i].reverse()
            examples.append(translation_chat_example(pair, source="trinst"))
        report[pair_key] = {
            "requested": requested,
            "emitted": take,
            "shortfall": requested - take,
        }
        total += take
    report["TOTAL"] = total
    return examples, report


def filter_copied_translations(
    pairs: Iterable[ParallelPair], threshold: float = 70.0
) -> tuple[list, list]:
    """Drop pairs whose translation is (near-)copied from the source.

    A pair is dropped when the single-segment BLEU of the translation against
    the original exceeds the threshold; the boundary value itself is kept.
    Returns (kept, dropped).
    """
    kept: list = []
    dropped: list = []
    for pair in pairs:
        score = sentence_bleu(pair.tgt_text, [pair.src_text])
        (dropped if score > threshold else kept).append(pair)
    return kept, dropped


def concat_sentences(
    pairs: Sequence[ParallelPair],
    fraction: float = 0.5,
    chunk_range: tuple = (2, 6),
    seed: int = 0,
) -> list:
    """Merge a seeded subset of sentence pairs into multi-sentence pairs.

    Each sentence joins the concatenation pool i.i.d. with the given fraction;
    pooled sentences are grouped in input order into chunks of uniformly drawn
    size, source and target sides joined with a single space. Everything else
    passes through unchanged, and a short trailing chunk is emitted as is.
    """
    if not pairs:
        return []
    directions = {(p.src_lang, p.tgt_lang) for p in pairs}
    if len(directions) > 1:
        raise ValueError(f"pairs must share one direction, got {sorted(directions)}")
    lo, hi = chunk_range
    if lo < 1 or hi < lo:
        raise ValueError(f"bad chunk range {chunk_range}")
    rng = _sub_rng(seed, "concat")
    out: list = []
    buffer: list = []
    target_size = None

    def flush():
        nonlocal buffer, target_size
        if buffer:
            first = buffer[0]
            out.append(
                ParallelPair(
                    first.src_lang,
                    first.tgt_lang,
                    " ".join(p.src_text for p in buffer),
                    " ".join(p.tgt_text for p in buffer),
                )
            )
        buffer = []
        target_size = None

    for pair in pairs:
        if rng.random() >= fraction:
            out.append(pair)
            continue
        if target_size is None:
            target_size = rng.randint(lo, hi)
        buffer.append(pair)
        if len(buffer) == target_size:
            flush()
    flush()
    return out


def sample_translation_tuning(
    pairs_by_pair: Mapping[str, Sequence[ParallelPair]],
    cap: int = 100_000,
    seed: int = 0,
) -> tuple[list, dict]:
    """Sample up to `cap` sentence pairs per language pair, seeded uniform."""
    out: list = []
    report: dict = {}
    total = 0
    for pair_key in sorted(pairs_by_pair):
        pool = list(pairs_by_pair[pair_key])
        take = min(cap, len(pool))
        idx = _sub_rng(seed, "trtuning", pair_key).sample(range(len(pool)), take)
        out.extend(pool[i] for i in idx)
        report[pair_key] = take
        total += take
    report["TOTAL"] = total
    return out, report
