"""Instruction-tuning data: chat/translation rendering with loss masks,
mixture building, and translation-instruction filters."""

from .chat import ChatExample, RenderedExample, Turn, parse_chat, render_chat
from .mixture import MixtureSpec, build_mixture
from .parallel import (
    ParallelPair,
    add_translation_instructions,
    concat_sentences,
    filter_copied_translations,
    sample_translation_tuning,
)
from .translate import render_translation, translation_chat_example

__all__ = [
    "Turn",
    "ChatExample",
    "RenderedExample",
    "render_chat",
    "parse_chat",
    "render_translation",
    "translation_chat_example",
    "MixtureSpec",
    "build_mixture",
    "ParallelPair",
    "add_translation_instructions",
    "filter_copied_translations",
    "concat_sentences",
    "sample_translation_tuning",
]
