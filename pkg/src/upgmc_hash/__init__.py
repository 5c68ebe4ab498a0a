"""Centroid-linkage clustering with a residue-hashed distance set."""

from .distset import (
    DuplicateEntry,
    EntryNotFound,
    HashedDistanceSet,
    InvariantError,
    SlotMode,
    slot_index,
)
from .engine import (
    EngineKind,
    HashedEngine,
    NaiveEngine,
    cluster,
    cluster_hashed,
    cluster_naive,
    dendrogram_checksum,
)
from .model import (
    Cluster,
    Dendrogram,
    DistanceEntry,
    EngineStats,
    MergeRecord,
    centroid_merge,
    euclidean_distance,
)

__all__ = [
    "Cluster",
    "Dendrogram",
    "DistanceEntry",
    "DuplicateEntry",
    "EngineKind",
    "EngineStats",
    "EntryNotFound",
    "HashedDistanceSet",
    "HashedEngine",
    "InvariantError",
    "MergeRecord",
    "NaiveEngine",
    "SlotMode",
    "centroid_merge",
    "cluster",
    "cluster_hashed",
    "cluster_naive",
    "dendrogram_checksum",
    "euclidean_distance",
    "slot_index",
]
