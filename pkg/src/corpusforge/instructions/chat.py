"""Bit-exact chat serialization with byte-level loss-mask spans.

Grammar (canonical form, frozen by golden files):

    <|role|> LF  turn text  [</s> for completed assistant turns]  LF-separator

Turns are separated by exactly one LF; assistant turns are terminated by
"</s>" immediately after their text; a final assistant turn with empty text is
a generation prompt and renders as the bare header plus LF. Loss spans are
half-open byte intervals over the UTF-8 encoding, covering each assistant
response including its "</s>".

Role-header lines and "</s>" are reserved: turn texts must not contain them.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

ROLES = ("system", "user", "assistant")
HEADERS = {role: f"<|{role}|>" for role in ROLES}
EOS = "</s>"

_HEADER_RE = re.compile(r"(?m)^<\|(system|user|assistant)\|>$")


class ChatFormatError(ValueError):
    pass


@dataclass(frozen=True)
class Turn:
    role: str
    text: str


@dataclass(frozen=True)
class ChatExample:
    turns: tuple
    source: str = ""
    lang: str = ""

    def __post_init__(self):
        object.__setattr__(self, "turns", tuple(self.turns))
        self.validate()

    def validate(self) -> None:
        turns = self.turns
        if not turns:
            raise ChatFormatError("a chat example needs at least one turn")
        for t in turns:
            if t.role not in ROLES:
                raise ChatFormatError(f"unknown role {t.role!r}")
        body = list(turns)
        if body[0].role == "system":
            body = body[1:]
        if any(t.role == "system" for t in body):
            raise ChatFormatError("system turn is only allowed at the start")
        expected = "user"
        for t in body:
            if t.role != expected:
                raise ChatFormatError(
                    f"roles must alternate user/assistant; expected {expected}, got {t.role}"
                )
            expected = "assistant" if expected == "user" else "user"
        if not any(t.role == "assistant" for t in turns):
            raise ChatFormatError("a chat example needs at least one assistant turn")


@dataclass(frozen=True)
class RenderedExample:
    text: str
    loss_spans: tuple  # ((byte_start, byte_end), ...) half-open, sorted, disjoint

    def loss_bytes(self) -> bytes:
        raw = self.text.encode("utf-8")
        return b"".join(raw[s:e] for s, e in self.loss_spans)

    def to_record(self) -> dict:
        return {"text": self.text, "loss_spans": [list(span) for span in self.loss_spans]}


def _render(turns, force_complete_final: bool) -> RenderedExample:
    parts: list = []
    spans: list = []
    pos = 0

    def emit(piece: str) -> int:
        nonlocal pos
        parts.append(piece)
        pos += len(piece.encode("utf-8"))
        return pos

    last = len(turns) - 1
    for i, turn in enumerate(turns):
        emit(HEADERS[turn.role] + "\n")
        if turn.role == "assistant":
            is_generation_prompt = (
                i == last and turn.text == "" and not force_complete_final
            )
            if not is_generation_prompt:
                start = pos
                emit(turn.text + EOS)
                spans.append((start, pos))
        else:
            emit(turn.text)
        if i != last:
            emit("\n")
    return RenderedExample(text="".join(parts), loss_spans=tuple(spans))


def render_chat(example: ChatExample) -> RenderedExample:
    """Serialize a chat example; a final empty assistant turn is a generation prompt."""
    example.validate()
    return _render(example.turns, force_complete_final=False)


def parse_chat(text: str, source: str = "", lang: str = "") -> ChatExample:
    """Inverse of render_chat: recover turns from the canonical serialization."""
    matches = list(_HEADER_RE.finditer(text))
    if not matches or matches[0].start() != 0:
        raise ChatFormatError("serialized chat must start with a role header line")
    turns: list = []
    for i, m in enumerate(matches):
        role = m.group(1)
        after = m.end()
        if after >= len(text) or text[after] != "\n":
            raise ChatFormatError(f"role header {m.group(0)} must be followed by LF")
        content_start = after + 1
        if i + 1 < len(matches):
            sep = matches[i + 1].start() - 1
            if sep < content_start or text[sep] != "\n":
                raise ChatFormatError("turns must be separated by exactly one LF")
            content = text[content_start:sep]
            is_last = False
        else:
            content = text[content_start:]
            is_last = True
        if role == "assistant":
            if content.endswith(EOS):
                turns.append(Turn(role, content[: -len(EOS)]))
            elif is_last and content == "":
                turns.append(Turn(role, ""))  # generation prompt
            else:
                raise ChatFormatError("assistant turn must be terminated by </s>")
        else:
            turns.append(Turn(role, content))
    return ChatExample(turns=tuple(turns), source=source, lang=lang)
