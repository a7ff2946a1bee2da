"""Budgeted multilingual mixture planning and execution.

Planning is exact: quotas are computed in rational arithmetic and floats only
appear in reports. The capped allocator works through keys in ascending order
of availability; with k keys left and budget B left, a key receives
min(B/k, N * available) and the remainder rolls forward. Uncapped keys
(available=None) sort last and absorb whatever remains.
"""

from __future__ import annotations

import hashlib
import random
import struct
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Optional, Sequence

from . import jsonl

UNCAPPED = None


def _sub_rng(seed: int, *scope) -> random.Random:
    """Independent RNG derived from (seed, scope); stable across runs and platforms."""
    key = "\x1f".join([str(seed), *map(str, scope)])
    digest = hashlib.sha256(key.encode("utf-8")).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


@dataclass(frozen=True)
class KeyAllocation:
    available: Optional[int]  # None = effectively unbounded
    allocated: Fraction

    @property
    def epochs(self) -> Optional[Fraction]:
        if self.available in (None, 0):
            return None
        return self.allocated / self.available


@dataclass
class Allocation:
    mode: str
    budget: int
    n: Optional[Fraction]
    entries: dict  # key -> KeyAllocation

    @property
    def total_allocated(self) -> Fraction:
        return sum((e.allocated for e in self.entries.values()), Fraction(0))

    def proportions(self) -> dict:
        total = self.total_allocated
        if total == 0:
            return {k: Fraction(0) for k in self.entries}
        return {k: e.allocated / total for k, e in self.entries.items()}

    def to_report(self) -> dict:
        props = self.proportions()
        keys = {}
        for k in sorted(self.entries):
            e = self.entries[k]
            alloc = e.allocated
            keys[k] = {
                "available": e.available,
                "allocated": int(alloc) if alloc.denominator == 1 else float(alloc),
                "epochs": None if e.epochs is None else float(e.epochs),
                "proportion": float(props[k]),
            }
        total = self.total_allocated
        return {
            "mode": self.mode,
            "budget": self.budget,
            "n": None if self.n is None else float(self.n),
            "keys": keys,
            "total_allocated": int(total) if total.denominator == 1 else float(total),
        }


def _check_available(available: Mapping[str, Optional[int]]) -> None:
    if not available:
        raise ValueError("allocation requires at least one key")
    for k, v in available.items():
        if v is not None and v <= 0:
            raise ValueError(f"available count for {k!r} must be positive, got {v}")


def unimax_allocate(
    available: Mapping[str, Optional[int]], budget: int, n: Fraction | int | float = 4
) -> Allocation:
    """Capped budget allocation: no key repeats its data more than n epochs.

    Keys are processed in ascending availability (ties broken lexicographically,
    uncapped keys last); each takes min(budget_left / keys_left, n * available).
    """
    _check_available(available)
    if budget <= 0:
        raise ValueError("budget must be positive")
    n = Fraction(n)
    if n < 1:
        raise ValueError(f"epoch cap must be >= 1, got {n}")

    capped = sorted(
        (k for k, v in available.items() if v is not None), key=lambda k: (available[k], k)
    )
    uncapped = sorted(k for k, v in available.items() if v is None)
    order = capped + uncapped

    entries = {}
    remaining = Fraction(budget)
    for i, key in enumerate(order):
        quota = remaining / (len(order) - i)
        cap = None if available[key] is None else n * available[key]
        take = quota if cap is None else min(quota, cap)
        if take < 0:
            take = Fraction(0)
        entries[key] = KeyAllocation(available[key], take)
        remaining -= take
    return Allocation("unimax", budget, n, entries)


def proportional_allocate(available: Mapping[str, int], budget: int) -> Allocation:
    """Allocate budget in proportion to availability; every key repeats equally."""
    _check_available(available)
    if any(v is None for v in available.values()):
        raise ValueError("proportional allocation requires finite availability for every key")
    if budget <= 0:
        raise ValueError("budget must be positive")
    total = sum(available.values())
    if total == 0:
        raise ValueError("total availability is zero")
    entries = {
        k: KeyAllocation(v, Fraction(budget) * v / total) for k, v in available.items()
    }
    return Allocation("proportional", budget, None, entries)


@dataclass
class PairAllocation:
    allocation: Allocation
    directions: dict  # (src, tgt) -> int sentence count

    def to_report(self) -> dict:
        rep = self.allocation.to_report()
        rep["directions"] = {f"{s}-{t}": c for (s, t), c in sorted(self.directions.items())}
        return rep


def pair_allocate(
    available_pairs: Mapping[str, Optional[int]],
    budget_sentences: int,
    n: Fraction | int = 1,
) -> PairAllocation:
    """Balance a sentence budget across language pairs, then split each pair 50/50
    between its two directions.

    Pair keys are "src-tgt" codes. Sentence counts are integral: fractional
    quotas are floored, and for an odd pair total the listed direction gets the
    extra sentence.
    """
    alloc = unimax_allocate(available_pairs, budget_sentences, n)
    entries = {}
    directions = {}
    for key, e in alloc.entries.items():
        whole = int(e.allocated)  # floor
        entries[key] = KeyAllocation(e.available, Fraction(whole))
        src, tgt = key.split("-", 1)
        directions[(src, tgt)] = whole - whole // 2
        directions[(tgt, src)] = whole // 2
    return PairAllocation(Allocation("pair", budget_sentences, alloc.n, entries), directions)


# -- stream execution ---------------------------------------------------------


@dataclass(frozen=True)
class CategoricalPolicy:
    """Per-document i.i.d. language choice; budget counted in documents."""

    weights: Mapping[str, float]
    budget_documents: int

    def validate(self) -> "CategoricalPolicy":
        total = sum(self.weights.values())
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"categorical weights must sum to 1, got {total}")
        return self


@dataclass
class StreamReport:
    per_key: dict  # key -> {"documents": int, "characters": int, "overshoot": int}

    def to_dict(self) -> dict:
        return {k: dict(v) for k, v in sorted(self.per_key.items())}


def _epoch_order(ids: Sequence[str], seed: int, key: str, epoch: int) -> list:
    order = list(ids)
    _sub_rng(seed, "epoch", key, epoch).shuffle(order)
    return order


def sample_allocation_stream(
    allocation: Allocation,
    char_counts: Mapping[str, Mapping[str, int]],
    seed: int,
) -> tuple[list, StreamReport]:
    """Materialize an allocation into a deterministic document-id stream.

    char_counts maps key -> {doc_id: characters} for the trainable pool. Each
    key's documents are re-shuffled per epoch (seeded) and emitted until its
    character allocation is consumed; a document crossing the boundary is
    included whole and the overshoot recorded. Keys are interleaved by one
    final seeded shuffle so the stream is not blocked by language.
    """
    per_key_instances: list = []
    report = StreamReport(per_key={})
    for key in sorted(allocation.entries):
        target = allocation.entries[key].allocated
        docs = char_counts.get(key)
        if not docs:
            raise ValueError(f"allocation references {key!r} but no documents are available")
        ids = sorted(docs)
        consumed = 0
        taken = []
        epoch = 0
        while consumed < target:
            for doc_id in _epoch_order(ids, seed, key, epoch):
                taken.append(doc_id)
                consumed += docs[doc_id]
                if consumed >= target:
                    break
            epoch += 1
        overshoot = consumed - target
        report.per_key[key] = {
            "documents": len(taken),
            "characters": consumed,
            "overshoot": int(overshoot) if overshoot.denominator == 1 else float(overshoot),
        }
        per_key_instances.extend((key, doc_id) for doc_id in taken)
    _sub_rng(seed, "interleave").shuffle(per_key_instances)
    return [doc_id for (_k, doc_id) in per_key_instances], report


def sample_categorical_stream(
    policy: CategoricalPolicy,
    ids_by_key: Mapping[str, Sequence[str]],
    seed: int,
) -> tuple[list, StreamReport]:
    """Draw languages i.i.d. per document until the document budget is reached."""
    policy.validate()
    for key in policy.weights:
        if not ids_by_key.get(key):
            raise ValueError(f"policy references {key!r} but no documents are available")
    keys = sorted(policy.weights)
    cumulative = []
    acc = 0.0
    for k in keys:
        acc += policy.weights[k]
        cumulative.append((acc, k))
    chooser = _sub_rng(seed, "categorical")
    queues = {k: iter(()) for k in keys}
    epochs = {k: 0 for k in keys}
    counts = {k: 0 for k in keys}
    stream = []
    for _ in range(policy.budget_documents):
        u = chooser.random()
        key = next(k for threshold, k in cumulative if u <= threshold)
        doc_id = next(queues[key], None)
        if doc_id is None:
            queues[key] = iter(_epoch_order(sorted(ids_by_key[key]), seed, key, epochs[key]))
            epochs[key] += 1
            doc_id = next(queues[key])
        stream.append(doc_id)
        counts[key] += 1
    report = StreamReport(
        per_key={k: {"documents": c, "characters": 0, "overshoot": 0} for k, c in counts.items()}
    )
    return stream, report


# -- packing -------------------------------------------------------------------


def pack(
    documents: Iterable[Sequence[int]],
    context_length: int = 2048,
    eod_id: int = 256,
) -> Iterator[list]:
    """Concatenate-and-chunk packing for fixed-context pretraining.

    Documents are joined with a single end-of-document token between them and
    the flat stream is cut into consecutive context_length blocks; the last
    block may be short. Concatenating the output reproduces the joined stream
    exactly.
    """
    if context_length < 2:
        raise ValueError("context_length must be >= 2")
    buf: list = []
    first = True
    for doc in documents:
        if not first:
            buf.append(eod_id)
        first = False
        buf.extend(doc)
        while len(buf) >= context_length:
            yield buf[:context_length]
            buf = buf[context_length:]
    if buf:
        yield buf


def write_packed_jsonl(sequences: Iterable[Sequence[int]], path: str | Path) -> int:
    return jsonl.write_jsonl(path, (list(s) for s in sequences))


def write_packed_bin(
    sequences: Iterable[Sequence[int]], path: str | Path, index_path: str | Path
) -> int:
    """Flat little-endian int32 token file plus a JSON sidecar of sequence offsets."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    offsets = []
    lengths = []
    pos = 0
    with open(path, "wb") as f:
        for seq in sequences:
            f.write(struct.pack(f"<{len(seq)}i", *seq))
            offsets.append(pos)
            lengths.append(len(seq))
            pos += len(seq)
    index_path = Path(index_path)
    index_path.parent.mkdir(parents=True, exist_ok=True)
    with open(index_path, "w", encoding="utf-8") as f:
        import json

        json.dump({"dtype": "int32le", "offsets": offsets, "lengths": lengths}, f)
        f.write("\n")
    return len(lengths)


def read_packed_bin(path: str | Path, index_path: str | Path) -> list:
    import json

    with open(index_path, "r", encoding="utf-8") as f:
        index = json.load(f)
    raw = Path(path).read_bytes()
    out = []
    for off, length in zip(index["offsets"], index["lengths"]):
        out.append(list(struct.unpack_from(f"<{length}i", raw, off * 4)))
    return out
