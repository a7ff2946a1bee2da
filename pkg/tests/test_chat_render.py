import json
import random

import pytest

from conftest import GOLDENS
from corpusforge.instructions import ChatExample, Turn, parse_chat, render_chat
from corpusforge.instructions.chat import ChatFormatError


def figure_example():
    return ChatExample(
        turns=(
            Turn("user", "Tere!"),
            Turn("assistant", "Tere! Kas saaksin teid kuidagi aidata?"),
            Turn("user", "Kuidas alustada kirja kirjutamist?"),
            Turn("assistant", ""),
        )
    )


def test_two_turn_greeting_matches_golden_bytes():
    rendered = render_chat(figure_example())
    golden = (GOLDENS / "chat_two_turn.txt").read_bytes()
    assert rendered.text.encode("utf-8") == golden
    spans = json.loads((GOLDENS / "chat_two_turn.spans.json").read_text())
    assert [list(s) for s in rendered.loss_spans] == spans
    assert rendered.loss_bytes() == "Tere! Kas saaksin teid kuidagi aidata?</s>".encode("utf-8")


def test_generation_prompt_shape():
    ex = ChatExample(turns=(Turn("user", "Tere!"), Turn("assistant", "")))
    rendered = render_chat(ex)
    assert rendered.text.endswith("<|assistant|>\n")
    assert rendered.loss_spans == ()


def test_invalid_role_orders_rejected():
    with pytest.raises(ChatFormatError):
        ChatExample(turns=(Turn("assistant", "hi"),))
    with pytest.raises(ChatFormatError):
        ChatExample(turns=(Turn("user", "a"), Turn("user", "b"), Turn("assistant", "c")))
    with pytest.raises(ChatFormatError):
        ChatExample(turns=(Turn("user", "a"), Turn("system", "s"), Turn("assistant", "c")))
    with pytest.raises(ChatFormatError):
        ChatExample(turns=(Turn("user", "a"),))  # no assistant turn
    with pytest.raises(ChatFormatError):
        ChatExample(turns=(Turn("user", "a"), Turn("monkey", "b")))


WORDS = ["tere", "kiri", "päike", "vesi", "ūomõg", "лун", "ёрт", "ja", "kas", "on", "word"]


def random_example(rng):
    turns = []
    if rng.random() < 0.3:
        turns.append(Turn("system", _text(rng)))
    rounds = rng.randint(1, 4)
    for i in range(rounds):
        turns.append(Turn("user", _text(rng)))
        last = i == rounds - 1
        if last and rng.random() < 0.25:
            turns.append(Turn("assistant", ""))  # generation prompt
        else:
            turns.append(Turn("assistant", _text(rng)))
    return ChatExample(turns=tuple(turns))


def _text(rng):
    # reserved header lines and </s> never appear in turn texts
    n = rng.randint(1, 12)
    words = [rng.choice(WORDS) for _ in range(n)]
    if rng.random() < 0.2:
        words.insert(rng.randrange(len(words)), "\n")
    return " ".join(words).replace(" \n ", "\n")


def test_round_trip_identity_on_fuzz_corpus():
    rng = random.Random(17)
    for _ in range(1000):
        ex = random_example(rng)
        rendered = render_chat(ex)
        parsed = parse_chat(rendered.text)
        assert parsed.turns == ex.turns


def test_loss_mask_soundness_on_fuzz_corpus():
    rng = random.Random(23)
    for _ in range(1000):
        ex = random_example(rng)
        rendered = render_chat(ex)
        expected = "".join(
            t.text + "</s>"
            for i, t in enumerate(ex.turns)
            if t.role == "assistant" and not (i == len(ex.turns) - 1 and t.text == "")
        )
        assert rendered.loss_bytes().decode("utf-8") == expected
        # spans are sorted, disjoint, inside the text
        raw_len = len(rendered.text.encode("utf-8"))
        prev_end = 0
        for start, end in rendered.loss_spans:
            assert prev_end <= start < end <= raw_len
            prev_end = end


def test_parse_rejects_malformed_serializations():
    with pytest.raises(ChatFormatError):
        parse_chat("no header at all")
    with pytest.raises(ChatFormatError):
        parse_chat("<|user|>\nhi\n<|assistant|>\nunterminated")
    with pytest.raises(ChatFormatError):
        parse_chat("<|user|>")  # header not followed by LF
