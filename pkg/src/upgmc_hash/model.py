"""Domain types shared by the clustering engines.

Ids follow the linkage-matrix convention: the ``n`` input points are
``0..n-1`` and the cluster produced at merge step ``t`` is ``n + t - 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence, Tuple

Point = Tuple[float, ...]


def as_point(coords: Sequence[float]) -> Point:
    """Convert ``coords`` to a tuple of floats, rejecting empty or non-finite input."""
    p = tuple(float(c) for c in coords)
    if not p:
        raise ValueError("a point needs at least one coordinate")
    if not all(math.isfinite(c) for c in p):
        raise ValueError(f"non-finite coordinate in {p!r}")
    return p


def euclidean_distance(p: Point, q: Point) -> float:
    if len(p) != len(q):
        raise ValueError(f"dimension mismatch: {len(p)} vs {len(q)}")
    return math.dist(p, q)


@dataclass(frozen=True)
class Cluster:
    id: int
    centroid: Point
    size: int = 1

    @property
    def dim(self) -> int:
        return len(self.centroid)


def centroid_merge(a: Cluster, b: Cluster, new_id: int) -> Cluster:
    """Merge two clusters into their mass center.

    The centroid is the size-weighted mean, so a cluster built by repeated
    merges keeps the plain mean of all its original points.
    """
    if a.id == b.id:
        raise ValueError(f"cannot merge cluster {a.id} with itself")
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    size = a.size + b.size
    centroid = tuple(
        (a.size * x + b.size * y) / size for x, y in zip(a.centroid, b.centroid)
    )
    return Cluster(new_id, centroid, size)


class DistanceEntry(NamedTuple):
    """A stored pairwise distance ``(id_m, id_s, d)`` with ``id_m < id_s``."""

    id_m: int
    id_s: int
    d: float


def make_entry(a: int, b: int, d: float) -> DistanceEntry:
    if a == b:
        raise ValueError(f"entry needs two distinct ids, got {a} twice")
    if not (d >= 0.0 and math.isfinite(d)):
        raise ValueError(f"distance must be finite and non-negative, got {d!r}")
    return DistanceEntry(a, b, d) if a < b else DistanceEntry(b, a, d)


class MergeRecord(NamedTuple):
    step: int
    left: int
    right: int
    distance: float
    new_id: int
    new_size: int


@dataclass(frozen=True)
class Dendrogram:
    n: int
    records: Tuple[MergeRecord, ...]

    def __post_init__(self):
        if len(self.records) != self.n - 1:
            raise ValueError(
                f"expected {self.n - 1} merge records, got {len(self.records)}"
            )
        for t, rec in enumerate(self.records):
            if rec.step != t + 1 or rec.new_id != self.n + t or rec.left >= rec.right:
                raise ValueError(f"malformed merge record at position {t}: {rec}")

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def pairs(self):
        return [(r.left, r.right, r.new_id) for r in self.records]


@dataclass
class EngineStats:
    """Exact operation counters for one engine run. ``wall_time`` is in ns."""

    distance_computations: int = 0
    slot_probes: int = 0
    scan_comparisons: int = 0
    wall_time: int = 0
