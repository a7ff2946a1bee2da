"""Extend sentence-aligned benchmarks to new languages.

Topic-classification items pick up the target-language sentence by id;
reading-comprehension passages are rebuilt by space-joining the member
sentence translations, with separately supplied question/answer translations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .filtering import CATEGORIES  # noqa: F401  (same closed-set discipline)

SIB_LABELS = (
    "science/technology",
    "travel",
    "politics",
    "sports",
    "health",
    "entertainment",
    "geography",
)


@dataclass(frozen=True)
class FloresItem:
    sentence_id: int
    texts: dict  # lang -> sentence

    def to_record(self) -> dict:
        return {"kind": "flores", "sentence_id": self.sentence_id, "texts": dict(self.texts)}


@dataclass(frozen=True)
class SibItem:
    id: str
    sentence_id: int
    label: str
    texts: dict  # lang -> sentence

    def to_record(self) -> dict:
        return {
            "kind": "sib",
            "id": self.id,
            "sentence_id": self.sentence_id,
            "label": self.label,
            "texts": dict(self.texts),
        }


@dataclass(frozen=True)
class BelebeleItem:
    id: str
    passage_sentence_ids: tuple
    correct_index: int  # 1-4
    per_lang: dict  # lang -> {"passage", "question", "answers": [4]}

    def to_record(self) -> dict:
        return {
            "kind": "belebele",
            "id": self.id,
            "passage_sentence_ids": list(self.passage_sentence_ids),
            "correct_index": self.correct_index,
            "per_lang": {k: dict(v) for k, v in sorted(self.per_lang.items())},
        }


@dataclass
class AlignedBenchmark:
    flores: list = field(default_factory=list)
    sib: list = field(default_factory=list)
    belebele: list = field(default_factory=list)

    def counts(self) -> dict:
        return {"flores": len(self.flores), "sib": len(self.sib), "belebele": len(self.belebele)}


def _lookup(translations: Mapping, lang: str, sentence_id: int) -> str:
    by_id = translations[lang]
    if sentence_id not in by_id:
        raise ValueError(f"missing translation for sentence id {sentence_id} in lang {lang!r}")
    return by_id[sentence_id]


def align_flores_extensions(
    flores_translations: Mapping[str, Mapping[int, str]],
    sib_source: Sequence[Mapping],
    belebele_source: Sequence[Mapping],
    translated_questions: Mapping[str, Mapping[str, Mapping]],
) -> AlignedBenchmark:
    """Build the three aligned benchmarks from per-language sentence translations.

    flores_translations: lang -> sentence_id -> text. sib_source rows carry
    {id, sentence_id, label}; belebele_source rows carry {id,
    passage_sentence_ids, correct_index} plus per-language question/answer
    translations in translated_questions[lang][item_id].
    """
    langs = sorted(flores_translations)
    out = AlignedBenchmark()
    if not langs:
        return out

    sentence_ids = sorted(set().union(*(set(flores_translations[lg]) for lg in langs)))
    for sid in sentence_ids:
        out.flores.append(
            FloresItem(sentence_id=sid, texts={lg: _lookup(flores_translations, lg, sid) for lg in langs})
        )

    for row in sib_source:
        if row["label"] not in SIB_LABELS:
            raise ValueError(f"sib item {row['id']}: unknown label {row['label']!r}")
        sid = row["sentence_id"]
        out.sib.append(
            SibItem(
                id=row["id"],
                sentence_id=sid,
                label=row["label"],
                texts={lg: _lookup(flores_translations, lg, sid) for lg in langs},
            )
        )

    for row in belebele_source:
        if row["correct_index"] not in (1, 2, 3, 4):
            raise ValueError(f"belebele item {row['id']}: correct_index must be in 1..4")
        member_ids = tuple(row["passage_sentence_ids"])
        per_lang = {}
        for lg in langs:
            qa = translated_questions.get(lg, {}).get(row["id"])
            if qa is None:
                raise ValueError(
                    f"belebele item {row['id']}: missing question/answer translation for {lg!r}"
                )
            if len(qa["answers"]) != 4:
                raise ValueError(f"belebele item {row['id']}: needs exactly 4 answers for {lg!r}")
            per_lang[lg] = {
                "passage": " ".join(_lookup(flores_translations, lg, sid) for sid in member_ids),
                "question": qa["question"],
                "answers": list(qa["answers"]),
            }
        out.belebele.append(
            BelebeleItem(
                id=row["id"],
                passage_sentence_ids=member_ids,
                correct_index=row["correct_index"],
                per_lang=per_lang,
            )
        )
    return out
