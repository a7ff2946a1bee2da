"""Scoring and evaluation utilities: BLEU, bootstrap accuracy, byte-perplexity,
representation similarity, prompt rendering, fallback judging, byte tokenizer."""

from .bleu import SegmentPair, corpus_bleu, sentence_bleu, tokenize_13a
from .bytetok import EOD_ID, EOS_ID, byte_decode, byte_encode
from .metrics import EvalReport, accuracy_with_stderr, byte_ppl, byte_ppl_by_lang, linear_cka

__all__ = [
    "SegmentPair",
    "corpus_bleu",
    "sentence_bleu",
    "tokenize_13a",
    "EOD_ID",
    "EOS_ID",
    "byte_encode",
    "byte_decode",
    "EvalReport",
    "accuracy_with_stderr",
    "byte_ppl",
    "byte_ppl_by_lang",
    "linear_cka",
]
