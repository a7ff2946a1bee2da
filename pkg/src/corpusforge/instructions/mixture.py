"""Instruction-mixture building: per-source/per-language sampling with a
composition report whose column sums equal the emitted counts."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from ..sampler import _sub_rng


@dataclass
class MixtureSpec:
    # source -> lang -> requested count
    requests: dict
    seed: int = 0

    def validate(self) -> "MixtureSpec":
        for source, by_lang in self.requests.items():
            for lang, count in by_lang.items():
                if count < 0:
                    raise ValueError(f"negative request for {source}/{lang}: {count}")
        return self

    @staticmethod
    def from_json(path: str | Path) -> "MixtureSpec":
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
        return MixtureSpec(requests=data["requests"], seed=data.get("seed", 0)).validate()


@dataclass
class MixtureReport:
    rows: dict = field(default_factory=dict)  # (source, lang) -> count

    def totals_by_lang(self) -> dict:
        out: dict = {}
        for (_source, lang), count in self.rows.items():
            out[lang] = out.get(lang, 0) + count
        return dict(sorted(out.items()))

    def to_dict(self) -> dict:
        table = {}
        for (source, lang), count in sorted(self.rows.items()):
            table.setdefault(source, {})[lang] = count
        return {"rows": table, "TOTAL": self.totals_by_lang()}


def build_mixture(
    spec: MixtureSpec, datasets: Mapping[str, Sequence]
) -> tuple[list, MixtureReport]:
    """Sample `requested` examples per (source, lang) uniformly without replacement.

    datasets maps source name to its examples (anything with a .lang attribute
    or a "lang" key). A shortfall is an error naming the dataset.
    """
    spec.validate()
    report = MixtureReport()
    out: list = []
    for source in sorted(spec.requests):
        if source not in datasets:
            raise ValueError(f"dataset {source!r} is not resolvable")
        by_lang: dict = {}
        for ex in datasets[source]:
            lang = ex.lang if hasattr(ex, "lang") else ex["lang"]
            by_lang.setdefault(lang, []).append(ex)
        for lang in sorted(spec.requests[source]):
            want = spec.requests[source][lang]
            pool = by_lang.get(lang, [])
            if len(pool) < want:
                raise ValueError(
                    f"dataset {source!r} lang {lang!r}: requested {want}, only {len(pool)} available"
                )
            idx = _sub_rng(spec.seed, "mixture", source, lang).sample(range(len(pool)), want)
            out.extend(pool[i] for i in idx)
            report.rows[(source, lang)] = want
    return out, report
