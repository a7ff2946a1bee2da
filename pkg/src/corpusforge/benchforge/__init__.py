"""Benchmark construction: candidate filtering, embedding clustering with
iterative curation, category balancing, and benchmark alignment."""

from .align import AlignedBenchmark, align_flores_extensions
from .cluster import Cluster, CurationRound, fast_cluster, iterative_curation
from .filtering import Conversation, MtBenchItem, filter_candidates, finalize_benchmark

__all__ = [
    "Conversation",
    "MtBenchItem",
    "filter_candidates",
    "finalize_benchmark",
    "Cluster",
    "CurationRound",
    "fast_cluster",
    "iterative_curation",
    "AlignedBenchmark",
    "align_flores_extensions",
]
