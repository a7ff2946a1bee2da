"""Translation-instruction formatting.

One system line naming the direction in English, the source text as the user
turn, the target text as the assistant turn. Rendering goes through the chat
serializer so both formats share one grammar; an empty target still gets its
"</s>" terminator (the loss span then covers just the marker).
"""

from __future__ import annotations

from ..registry import display_name
from .chat import ChatExample, RenderedExample, Turn, _render

SYSTEM_TEMPLATE = "Translate the following {src_lang} text into {tgt_lang}."


def translation_chat_example(pair, source: str = "", lang: str = "") -> ChatExample:
    """Build the chat-form example for one translation pair."""
    system = SYSTEM_TEMPLATE.format(
        src_lang=display_name(pair.src_lang), tgt_lang=display_name(pair.tgt_lang)
    )
    return ChatExample(
        turns=(
            Turn("system", system),
            Turn("user", pair.src_text),
            Turn("assistant", pair.tgt_text),
        ),
        source=source,
        lang=lang or pair.tgt_lang,
    )


def render_translation(pair) -> RenderedExample:
    example = translation_chat_example(pair)
    return _render(example.turns, force_complete_final=True)
