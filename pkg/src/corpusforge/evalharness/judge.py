"""Fallback judging of non-conforming model outputs via an external text endpoint.

The judge is pluggable: any callable mapping a prompt string to a response
string works. A deterministic mock is bundled for tests and offline runs; the
HTTP client speaks plain JSON {"prompt": ...} -> {"text": ...}.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import requests

from .prompts import render_judge_prompt

YES = "yes"
NO = "no"
UNPARSEABLE = "unparseable"

_WORD = re.compile(r"[A-Za-z]+")


def parse_verdict(response: str) -> str:
    """First case-insensitive Yes/No token wins; anything else is unparseable."""
    for match in _WORD.finditer(response):
        word = match.group(0).lower()
        if word == "yes":
            return YES
        if word == "no":
            return NO
    return UNPARSEABLE


class MockJudge:
    """Scripted judge: a fixed list of responses, or a prompt->response callable."""

    def __init__(self, script: Sequence[str] | Callable[[str], str]):
        self._script = script
        self._cursor = 0

    def __call__(self, prompt: str) -> str:
        if callable(self._script):
            return self._script(prompt)
        if self._cursor >= len(self._script):
            raise RuntimeError("mock judge script exhausted")
        response = self._script[self._cursor]
        self._cursor += 1
        return response


class HttpJudge:
    def __init__(self, url: str, timeout: float = 30.0):
        self.url = url
        self.timeout = timeout

    def __call__(self, prompt: str) -> str:
        resp = requests.post(self.url, json={"prompt": prompt}, timeout=self.timeout)
        resp.raise_for_status()
        return resp.json()["text"]


@dataclass
class JudgeOutcome:
    verdicts: list = field(default_factory=list)  # parallel to the input items
    counts: dict = field(default_factory=lambda: {YES: 0, NO: 0, UNPARSEABLE: 0})

    def to_dict(self) -> dict:
        return {"verdicts": list(self.verdicts), "counts": dict(self.counts)}


def judge_fallback(
    nonconforming: Iterable[Mapping],
    judge: Callable[[str], str],
    max_retries: int = 2,
) -> JudgeOutcome:
    """Ask the judge whether each output matches its expected class.

    Items need "expected_class" and "output_text". Transport failures are
    retried a bounded number of times, then the item is counted unparseable;
    nothing is ever silently scored.
    """
    outcome = JudgeOutcome()
    for item in nonconforming:
        prompt = render_judge_prompt(item["expected_class"], item["output_text"])
        verdict = UNPARSEABLE
        for _attempt in range(max_retries + 1):
            try:
                verdict = parse_verdict(judge(prompt))
            except Exception:
                continue
            break
        outcome.verdicts.append(verdict)
        outcome.counts[verdict] += 1
    return outcome
