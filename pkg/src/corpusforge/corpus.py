"""Canonical document store: ingest raw corpora, compute statistics, carve held-out splits.

A document is the atom of every character budget downstream. "Characters"
always means Unicode scalar values, which is what ``len`` counts on a Python
str; it is encoding-stable and independent of byte width.

Store layout (one directory):
    documents.jsonl     one document per line, append-only
    heldout/<lang>.json reserved validation ids per language
"""

from __future__ import annotations

import hashlib
import json
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Optional

from . import jsonl
from .registry import check_lang

GRANULARITIES = ("document", "sentence")


def normalize_text(text: str) -> str:
    """Collapse CR/LF to LF and strip trailing whitespace per line; nothing else."""
    text = text.replace("\r\n", "\n").replace("\r", "\n")
    return "\n".join(line.rstrip() for line in text.split("\n"))


def char_count(text: str) -> int:
    return len(text)


def document_id(source: str, ordinal: int, text: str) -> str:
    # Content hash over (source, ordinal, text prefix): re-ingesting the same
    # source reproduces the same ids, so ingest is idempotent.
    h = hashlib.sha256()
    h.update(source.encode("utf-8"))
    h.update(b"\x1f")
    h.update(str(ordinal).encode("ascii"))
    h.update(b"\x1f")
    h.update(text[:128].encode("utf-8"))
    return h.hexdigest()[:16]


@dataclass(frozen=True)
class Document:
    id: str
    lang: str
    source: str
    granularity: str
    text: str

    @property
    def char_count(self) -> int:
        return char_count(self.text)

    def to_record(self) -> dict:
        return {
            "id": self.id,
            "lang": self.lang,
            "source": self.source,
            "granularity": self.granularity,
            "text": self.text,
        }

    @staticmethod
    def from_record(rec: dict) -> "Document":
        return Document(
            id=rec["id"],
            lang=rec["lang"],
            source=rec["source"],
            granularity=rec["granularity"],
            text=rec["text"],
        )


@dataclass(frozen=True)
class SourceSpec:
    path: str
    lang: str
    source: str
    granularity: str

    def validate(self) -> "SourceSpec":
        check_lang(self.lang)
        if self.granularity not in GRANULARITIES:
            raise ValueError(f"granularity must be one of {GRANULARITIES}, got {self.granularity!r}")
        return self


def load_manifest(path: str | Path) -> list[SourceSpec]:
    with open(path, "r", encoding="utf-8") as f:
        data = json.load(f)
    entries = data["sources"] if isinstance(data, dict) else data
    return [SourceSpec(**e).validate() for e in entries]


@dataclass
class IngestReport:
    documents: int = 0
    characters: int = 0
    skipped_undecodable: int = 0
    skipped_duplicate: int = 0

    def merge(self, other: "IngestReport") -> None:
        self.documents += other.documents
        self.characters += other.characters
        self.skipped_undecodable += other.skipped_undecodable
        self.skipped_duplicate += other.skipped_duplicate

    def to_dict(self) -> dict:
        return {
            "documents": self.documents,
            "characters": self.characters,
            "skipped_undecodable": self.skipped_undecodable,
            "skipped_duplicate": self.skipped_duplicate,
        }


@dataclass(frozen=True)
class StatRow:
    documents: int
    characters: int
    sentences: Optional[int]


@dataclass
class CorpusStats:
    by_source: dict = field(default_factory=dict)  # (lang, source) -> StatRow

    def by_lang(self) -> dict:
        out: dict[str, StatRow] = {}
        for (lang, _src), row in sorted(self.by_source.items()):
            prev = out.get(lang)
            if prev is None:
                out[lang] = row
            else:
                sents = None
                if prev.sentences is not None or row.sentences is not None:
                    sents = (prev.sentences or 0) + (row.sentences or 0)
                out[lang] = StatRow(
                    prev.documents + row.documents,
                    prev.characters + row.characters,
                    sents,
                )
        return out

    def total_characters(self) -> int:
        return sum(r.characters for r in self.by_source.values())

    def to_dict(self, by_source: bool = False) -> dict:
        if by_source:
            rows = {
                f"{lang}/{src}": {
                    "documents": r.documents,
                    "characters": r.characters,
                    "sentences": r.sentences,
                }
                for (lang, src), r in sorted(self.by_source.items())
            }
        else:
            rows = {
                lang: {
                    "documents": r.documents,
                    "characters": r.characters,
                    "sentences": r.sentences,
                }
                for lang, r in sorted(self.by_lang().items())
            }
        return rows


@dataclass(frozen=True)
class HeldoutSplit:
    lang: str
    examples: int
    characters: int
    selection_seed: int
    ids: tuple

    def to_dict(self) -> dict:
        return {
            "v": 1,
            "lang": self.lang,
            "examples": self.examples,
            "characters": self.characters,
            "selection_seed": self.selection_seed,
            "ids": list(self.ids),
        }


def _split_records(raw: bytes, granularity: str) -> list[bytes]:
    """Split a source file into raw records before decoding.

    Sentence granularity: one record per line. Document granularity: records
    are blocks separated by blank lines. Whitespace-only records are dropped.
    """
    lines = raw.split(b"\n")
    if granularity == "sentence":
        return [ln for ln in lines if ln.strip()]
    blocks: list[bytes] = []
    current: list[bytes] = []
    for ln in lines:
        if ln.strip():
            current.append(ln)
        elif current:
            blocks.append(b"\n".join(current))
            current = []
    if current:
        blocks.append(b"\n".join(current))
    return blocks


def _read_source(spec: SourceSpec) -> tuple[list[Document], int]:
    """Decode one source file into documents; returns (docs, undecodable count)."""
    raw = Path(spec.path).read_bytes()
    docs: list[Document] = []
    undecodable = 0
    for ordinal, rec in enumerate(_split_records(raw, spec.granularity)):
        try:
            text = rec.decode("utf-8")
        except UnicodeDecodeError:
            undecodable += 1
            continue
        text = normalize_text(text)
        if not text.strip():
            continue
        docs.append(
            Document(
                id=document_id(spec.source, ordinal, text),
                lang=spec.lang,
                source=spec.source,
                granularity=spec.granularity,
                text=text,
            )
        )
    return docs, undecodable


class DocumentStore:
    """Append-only JSON-lines document store with held-out bookkeeping."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.doc_path = self.root / "documents.jsonl"
        self.heldout_dir = self.root / "heldout"
        self._ids: set[str] = set()
        self._index: list[tuple[str, str, str, int]] = []  # (id, lang, source, chars)
        if self.doc_path.exists():
            for rec in jsonl.read_jsonl(self.doc_path):
                self._ids.add(rec["id"])
                self._index.append((rec["id"], rec["lang"], rec["source"], len(rec["text"])))

    def __len__(self) -> int:
        return len(self._ids)

    # -- ingest ------------------------------------------------------------

    def ingest(self, specs: Iterable[SourceSpec], max_workers: int = 4) -> IngestReport:
        """Ingest source files into the store.

        Files are read and decoded in parallel; the commit is a single-writer
        ordered merge so ids and stats do not depend on scheduling.
        """
        specs = [s.validate() for s in specs]
        report = IngestReport()
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            results = list(pool.map(_read_source, specs))
        self.root.mkdir(parents=True, exist_ok=True)
        with open(self.doc_path, "a", encoding="utf-8", newline="\n") as f:
            for docs, undecodable in results:
                report.skipped_undecodable += undecodable
                for doc in docs:
                    if doc.id in self._ids:
                        report.skipped_duplicate += 1
                        continue
                    f.write(jsonl.dumps(doc.to_record()))
                    f.write("\n")
                    self._ids.add(doc.id)
                    self._index.append((doc.id, doc.lang, doc.source, doc.char_count))
                    report.documents += 1
                    report.characters += doc.char_count
        return report

    def ingest_manifest(self, manifest_path: str | Path, max_workers: int = 4) -> IngestReport:
        return self.ingest(load_manifest(manifest_path), max_workers=max_workers)

    # -- reads ---------------------------------------------------------------

    def documents(self, lang: Optional[str] = None, pool: str = "all") -> Iterator[Document]:
        """Iterate documents in commit order. pool: all | train | heldout."""
        excluded: set[str] = set()
        only: Optional[set[str]] = None
        if pool == "train":
            excluded = self.all_heldout_ids()
        elif pool == "heldout":
            only = self.all_heldout_ids()
        elif pool != "all":
            raise ValueError(f"unknown pool {pool!r}")
        for rec in jsonl.read_jsonl(self.doc_path) if self.doc_path.exists() else ():
            if lang is not None and rec["lang"] != lang:
                continue
            if rec["id"] in excluded:
                continue
            if only is not None and rec["id"] not in only:
                continue
            yield Document.from_record(rec)

    def ids_for_lang(self, lang: str) -> list[str]:
        return [i for (i, lg, _s, _c) in self._index if lg == lang]

    def char_counts_for_lang(self, lang: str) -> dict:
        return {i: c for (i, lg, _s, c) in self._index if lg == lang}

    def languages(self) -> list[str]:
        return sorted({lg for (_i, lg, _s, _c) in self._index})

    # -- stats ---------------------------------------------------------------

    def stats(self) -> CorpusStats:
        rows: dict[tuple, list] = {}
        sentence_sources: dict[tuple, int] = {}
        for rec in jsonl.read_jsonl(self.doc_path) if self.doc_path.exists() else ():
            key = (rec["lang"], rec["source"])
            agg = rows.setdefault(key, [0, 0])
            agg[0] += 1
            agg[1] += len(rec["text"])
            if rec["granularity"] == "sentence":
                sentence_sources[key] = sentence_sources.get(key, 0) + 1
        stats = CorpusStats()
        for key, (docs, chars) in rows.items():
            stats.by_source[key] = StatRow(docs, chars, sentence_sources.get(key))
        return stats

    # -- held-out ------------------------------------------------------------

    def carve_heldout(self, lang: str, target_examples: int, seed: int) -> HeldoutSplit:
        """Reserve a uniform random sample of documents as held-out validation data.

        Selection is over the full language pool, so re-running with the same
        seed yields an identical id set regardless of prior carves.
        """
        check_lang(lang)
        ids = sorted(self.ids_for_lang(lang))
        if len(ids) < target_examples:
            raise ValueError(
                f"cannot carve {target_examples} held-out documents for {lang}: "
                f"only {len(ids)} available (short by {target_examples - len(ids)})"
            )
        rng = random.Random(seed)
        chosen = sorted(rng.sample(ids, target_examples))
        chars = self.char_counts_for_lang(lang)
        split = HeldoutSplit(
            lang=lang,
            examples=target_examples,
            characters=sum(chars[i] for i in chosen),
            selection_seed=seed,
            ids=tuple(chosen),
        )
        self.heldout_dir.mkdir(parents=True, exist_ok=True)
        with open(self.heldout_dir / f"{lang}.json", "w", encoding="utf-8") as f:
            json.dump(split.to_dict(), f, ensure_ascii=False, indent=2)
            f.write("\n")
        return split

    def heldout_split(self, lang: str) -> Optional[HeldoutSplit]:
        path = self.heldout_dir / f"{lang}.json"
        if not path.exists():
            return None
        with open(path, "r", encoding="utf-8") as f:
            d = json.load(f)
        return HeldoutSplit(
            lang=d["lang"],
            examples=d["examples"],
            characters=d["characters"],
            selection_seed=d["selection_seed"],
            ids=tuple(d["ids"]),
        )

    def all_heldout_ids(self) -> set:
        out: set[str] = set()
        if self.heldout_dir.exists():
            for path in sorted(self.heldout_dir.glob("*.json")):
                with open(path, "r", encoding="utf-8") as f:
                    out.update(json.load(f)["ids"])
        return out
