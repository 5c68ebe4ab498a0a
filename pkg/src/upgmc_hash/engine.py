"""Centroid-linkage (UPGMC) agglomerative clustering.

Two engines produce the same dendrogram:

* ``NaiveEngine`` recomputes every pairwise centroid distance among the live
  clusters at each step, ``C(n+1, 3)`` distance computations in total.
* ``HashedEngine`` computes the ``C(n, 2)`` initial distances once and keeps
  them in a :class:`HashedDistanceSet`; after each merge it only computes the
  distances from the new cluster to the survivors, ``(n-1)**2`` in total.

Both pick the pair with the smallest distance, breaking ties by the smaller
``(id_m, id_s)``.
"""

from __future__ import annotations

import hashlib
import math
import time
from dataclasses import dataclass
from itertools import repeat
from typing import Dict, List, Optional, Sequence, Tuple

from .distset import HashedDistanceSet, SlotMode
from .model import (
    Cluster,
    Dendrogram,
    EngineStats,
    MergeRecord,
    as_point,
    centroid_merge,
)

# Identical to model.euclidean_distance; dimensions are validated up front.
_dist = math.dist


@dataclass(frozen=True)
class EngineKind:
    name: str
    l: Optional[int] = None
    mode: Optional[SlotMode] = None

    def __post_init__(self):
        if self.name not in ("naive", "hashed"):
            raise ValueError(f"unknown engine {self.name!r}")
        if self.name == "hashed":
            if self.l is None or isinstance(self.l, bool) or not isinstance(self.l, int) or self.l < 1:
                raise ValueError(f"hashed engine needs a positive slot count, got {self.l!r}")
            object.__setattr__(self, "mode", SlotMode(self.mode or SlotMode.FIRST_SORTED))

    @classmethod
    def naive(cls) -> "EngineKind":
        return cls("naive")

    @classmethod
    def hashed(cls, l: int, mode: SlotMode = SlotMode.FIRST_SORTED) -> "EngineKind":
        return cls("hashed", l, mode)


def _prepare(points) -> List[Cluster]:
    pts = [as_point(p) for p in points]
    if len(pts) < 2:
        raise ValueError(f"need at least 2 points, got {len(pts)}")
    dim = len(pts[0])
    for i, p in enumerate(pts):
        if len(p) != dim:
            raise ValueError(f"point {i} has dimension {len(p)}, expected {dim}")
    return [Cluster(i, p, 1) for i, p in enumerate(pts)]


class _Engine:
    def __init__(self, points: Sequence[Sequence[float]]):
        clusters = _prepare(points)
        self.n = len(clusters)
        self.stats = EngineStats()
        self.records: List[MergeRecord] = []
        # id -> Cluster; dict order stays ascending because new ids grow
        self._live: Dict[int, Cluster] = {c.id: c for c in clusters}
        self._started = False

    def live_clusters(self) -> List[Cluster]:
        return list(self._live.values())

    @property
    def done(self) -> bool:
        return len(self.records) == self.n - 1

    def _setup(self):
        pass

    def _select(self) -> Tuple[float, int, int]:
        raise NotImplementedError

    def _merged(self, left: int, right: int, new: Cluster):
        pass

    def step(self) -> MergeRecord:
        if self.done:
            raise RuntimeError("clustering already complete")
        t0 = time.perf_counter_ns()
        if not self._started:
            self._setup()
            self._started = True
        d, left, right = self._select()
        new_id = self.n + len(self.records)
        new = centroid_merge(self._live.pop(left), self._live.pop(right), new_id)
        self._merged(left, right, new)
        self._live[new_id] = new
        rec = MergeRecord(len(self.records) + 1, left, right, d, new_id, new.size)
        self.records.append(rec)
        self.stats.wall_time += time.perf_counter_ns() - t0
        return rec

    def run(self) -> Tuple[Dendrogram, EngineStats]:
        while not self.done:
            self.step()
        return Dendrogram(self.n, tuple(self.records)), self.stats


class NaiveEngine(_Engine):
    """Recomputes the full (shrinking) distance matrix before every merge."""

    def _select(self):
        live = list(self._live.values())
        ids = [c.id for c in live]
        cents = [c.centroid for c in live]
        m = len(live)
        best = None
        computed = 0
        for i in range(m - 1):
            ds = list(map(_dist, repeat(cents[i], m - 1 - i), cents[i + 1:]))
            computed += len(ds)
            cand = min(zip(ds, repeat(ids[i]), ids[i + 1:]))
            if best is None or cand < best:
                best = cand
        self.stats.distance_computations += computed
        self.stats.scan_comparisons += computed
        return best


class HashedEngine(_Engine):
    """Keeps live distances in a residue-hashed slot structure."""

    def __init__(self, points, l: Optional[int] = None,
                 mode: SlotMode = SlotMode.FIRST_SORTED):
        super().__init__(points)
        self.distances = HashedDistanceSet(self.n if l is None else l, mode, self.stats)

    def _setup(self):
        live = list(self._live.values())
        add = self.distances.add
        for i, a in enumerate(live):
            for b in live[i + 1:]:
                add(a.id, b.id, _dist(a.centroid, b.centroid))
                self.stats.distance_computations += 1

    def _select(self):
        e = self.distances.min_entry()
        return e.d, e.id_m, e.id_s

    def _merged(self, left, right, new):
        # left/right already popped from the registry
        survivors = list(self._live)
        self.distances.remove_cluster(left, [right] + survivors)
        self.distances.remove_cluster(right, survivors)
        add = self.distances.add
        for x in survivors:
            add(x, new.id, _dist(self._live[x].centroid, new.centroid))
            self.stats.distance_computations += 1


def make_engine(points, kind: EngineKind) -> _Engine:
    if kind.name == "naive":
        return NaiveEngine(points)
    return HashedEngine(points, kind.l, kind.mode)


def cluster(points, kind: EngineKind) -> Tuple[Dendrogram, EngineStats]:
    return make_engine(points, kind).run()


def cluster_naive(points) -> Tuple[Dendrogram, EngineStats]:
    return NaiveEngine(points).run()


def cluster_hashed(points, l: Optional[int] = None,
                   mode: SlotMode = SlotMode.FIRST_SORTED) -> Tuple[Dendrogram, EngineStats]:
    return HashedEngine(points, l, mode).run()


def dendrogram_checksum(dendro: Dendrogram) -> str:
    """Short SHA-256 digest of the merge-pair sequence (distances excluded)."""
    h = hashlib.sha256()
    for left, right, new_id in dendro.pairs():
        h.update(f"{left},{right},{new_id};".encode())
    return h.hexdigest()[:16]


def naive_distance_count(n: int) -> int:
    return math.comb(n + 1, 3)


def hashed_distance_count(n: int) -> int:
    return (n - 1) ** 2
