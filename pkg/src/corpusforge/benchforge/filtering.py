"""Conversation candidate filtering and final benchmark assembly."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

CATEGORIES = ("math", "reasoning", "writing", "general")


@dataclass(frozen=True)
class Conversation:
    id: str
    turns: tuple  # alternating (role, text), user first
    redacted: bool = False
    moderation_flagged: bool = False
    user_token_counts: Optional[tuple] = None  # one count per user turn

    def user_turns(self) -> list:
        return [text for role, text in self.turns if role == "user"]


def _is_two_round(turns: Sequence) -> bool:
    if len(turns) != 4:
        return False
    expected = ("user", "assistant", "user", "assistant")
    return tuple(role for role, _ in turns) == expected


def filter_candidates(
    conversations: Iterable[Conversation], max_user_tokens: int = 50
) -> list:
    """Keep exactly the unflagged, unredacted two-round conversations whose
    user prompts all fit the token limit. Missing token counts are an error."""
    kept: list = []
    for conv in conversations:
        n_user = len(conv.user_turns())
        if conv.user_token_counts is None or len(conv.user_token_counts) != n_user:
            raise ValueError(f"conversation {conv.id}: token counts missing or wrong length")
        if conv.redacted or conv.moderation_flagged:
            continue
        if not _is_two_round(conv.turns):
            continue
        if any(c > max_user_tokens for c in conv.user_token_counts):
            continue
        kept.append(conv)
    return kept


@dataclass(frozen=True)
class MtBenchItem:
    id: str
    category: str
    prompts: tuple  # 1-2 user turns
    translations: dict = field(default_factory=dict)  # lang -> list of prompts

    def __post_init__(self):
        if self.category not in CATEGORIES:
            raise ValueError(f"unknown category {self.category!r}")
        if not 1 <= len(self.prompts) <= 2:
            raise ValueError(f"item {self.id}: needs 1-2 prompts, got {len(self.prompts)}")

    @property
    def multiturn(self) -> bool:
        return len(self.prompts) == 2

    def to_record(self) -> dict:
        return {
            "id": self.id,
            "category": self.category,
            "turns": list(self.prompts),
            "translations": {k: list(v) for k, v in sorted(self.translations.items())},
        }


def finalize_benchmark(
    items: Iterable[MtBenchItem], per_category: int = 20
) -> tuple[list, dict]:
    """Assemble the final benchmark: exactly per_category items per category.

    Items are deduplicated-checked by id and sorted, so the output is
    invariant to input order. Shortfalls fail with per-category counts.
    """
    items = list(items)
    seen: set = set()
    for item in items:
        if item.id in seen:
            raise ValueError(f"duplicate item id {item.id!r}")
        seen.add(item.id)
    by_category: dict = {c: [] for c in CATEGORIES}
    for item in items:
        by_category[item.category].append(item)
    short = {
        c: len(group) for c, group in by_category.items() if len(group) < per_category
    }
    if short:
        detail = ", ".join(f"{c}: {n}/{per_category}" for c, n in sorted(short.items()))
        raise ValueError(f"category shortfall: {detail}")
    final: list = []
    for c in CATEGORIES:
        final.extend(sorted(by_category[c], key=lambda it: it.id)[:per_category])
    final.sort(key=lambda it: it.id)
    manifest = {
        "total": len(final),
        "per_category": {c: per_category for c in CATEGORIES},
        "multiturn": sum(1 for it in final if it.multiturn),
    }
    return final, manifest
