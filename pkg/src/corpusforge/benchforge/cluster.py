"""Greedy community detection over sentence embeddings, and the iterative
curation loop that shrinks a candidate pool threshold by threshold."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np


@dataclass(frozen=True)
class Cluster:
    representative: str
    members: tuple  # ids, sorted; cosine(member, representative) >= threshold
    threshold: float

    @property
    def size(self) -> int:
        return len(self.members)


def fast_cluster(
    embeddings: Mapping[str, Sequence[float]],
    threshold: float,
    min_community_size: int = 2,
) -> list:
    """Find local groups of highly similar points.

    A point seeds a community if at least min_community_size points (itself
    included) have cosine similarity >= threshold to it. Candidate communities
    are taken largest first (ties: smaller representative id first); claimed
    points are removed from later candidates, and a candidate is kept only if
    it still reaches the minimum size and its representative is unclaimed.
    """
    ids = list(embeddings)
    if not ids:
        return []
    matrix = np.asarray([embeddings[i] for i in ids], dtype=float)
    if matrix.ndim != 2:
        raise ValueError("embedding vectors must share one dimension")
    norms = np.linalg.norm(matrix, axis=1, keepdims=True)
    if (norms == 0).any():
        raise ValueError("zero vectors cannot be clustered")
    unit = matrix / norms
    sims = unit @ unit.T

    candidates = []
    for row, id_ in enumerate(ids):
        members = np.nonzero(sims[row] >= threshold)[0]
        if len(members) >= min_community_size:
            candidates.append((len(members), id_, row, members))
    candidates.sort(key=lambda c: (-c[0], c[1]))

    claimed: set = set()
    clusters: list = []
    for _size, rep_id, rep_row, members in candidates:
        if rep_row in claimed:
            continue
        free = [m for m in members if m not in claimed]
        if len(free) < min_community_size:
            continue
        claimed.update(free)
        clusters.append(
            Cluster(
                representative=rep_id,
                members=tuple(sorted(ids[m] for m in free)),
                threshold=threshold,
            )
        )
    return clusters


@dataclass
class CurationRound:
    threshold: float
    clusters: list
    pool_before: int
    pool_after: int

    def worklist(self, texts: Mapping[str, str] | None = None) -> list:
        """Rows for human review: (cluster id = representative, its text, keep?)."""
        rows = []
        for c in self.clusters:
            text = texts.get(c.representative, "") if texts else ""
            rows.append({"cluster_id": c.representative, "representative_text": text, "keep": None})
        return rows


def iterative_curation(
    embeddings: Mapping[str, Sequence[float]],
    thresholds: Sequence[float],
    min_community_size: int = 2,
) -> list:
    """Cluster, export, remove, recluster with a smaller threshold.

    Each round claims the clusters found at its threshold and removes every
    member from the pool; stops when the pool is empty or thresholds run out.
    """
    if list(thresholds) != sorted(thresholds, reverse=True) or len(set(thresholds)) != len(
        list(thresholds)
    ):
        raise ValueError("thresholds must be strictly descending")
    pool = dict(embeddings)
    rounds: list = []
    for t in thresholds:
        if not pool:
            break
        before = len(pool)
        clusters = fast_cluster(pool, t, min_community_size)
        for c in clusters:
            for member in c.members:
                pool.pop(member, None)
        rounds.append(
            CurationRound(threshold=t, clusters=clusters, pool_before=before, pool_after=len(pool))
        )
    return rounds
