"""Residue-hashed set of pairwise distances.

Entries ``(id_m, id_s, d)`` live in one of ``l`` slots, chosen by
``(id_m + id_s) mod l``.  Each slot is a Python list kept sorted by
``id_m`` so the run of entries sharing a first id can be located with two
binary searches.  In ``FULLY_SORTED`` mode the run is also sorted by
``id_s`` and the key inside the run is found by a third binary search;
in ``FIRST_SORTED`` mode the run is scanned sequentially and new entries
go to the front of their run.
"""

from __future__ import annotations

import enum
import math
from typing import Iterable, Iterator, List, Optional, Tuple

from .model import DistanceEntry, EngineStats


class SlotMode(enum.Enum):
    FIRST_SORTED = "first"
    FULLY_SORTED = "full"


class EntryNotFound(KeyError):
    pass


class DuplicateEntry(ValueError):
    pass


class InvariantError(AssertionError):
    pass


def slot_index(id_m: int, id_s: int, l: int) -> int:
    if id_m >= id_s:
        raise ValueError(f"slot_index needs id_m < id_s, got ({id_m}, {id_s})")
    if l < 1:
        raise ValueError(f"slot count must be positive, got {l}")
    return (id_m + id_s) % l


_INF = math.inf
# NamedTuple's generated __new__ is Python code; skip it on the hot path
_new_entry = tuple.__new__


class HashedDistanceSet:
    def __init__(self, l: int, mode: SlotMode = SlotMode.FIRST_SORTED,
                 stats: Optional[EngineStats] = None):
        if isinstance(l, bool) or not isinstance(l, int) or l < 1:
            raise ValueError(f"slot count must be a positive integer, got {l!r}")
        self.l = l
        self.mode = SlotMode(mode)
        self._full = self.mode is SlotMode.FULLY_SORTED
        self.stats = stats if stats is not None else EngineStats()
        self.slots: List[List[DistanceEntry]] = [[] for _ in range(l)]
        # distance column of each slot, index-aligned with ``slots``
        self._dists: List[List[float]] = [[] for _ in range(l)]
        self._count = 0

    def __repr__(self):
        return f"HashedDistanceSet(l={self.l}, mode={self.mode.name}, entries={self._count})"

    def __len__(self) -> int:
        return self._count

    def entry_count(self) -> int:
        return self._count

    def __iter__(self) -> Iterator[DistanceEntry]:
        for slot in self.slots:
            yield from slot

    iterate = __iter__

    def __contains__(self, key) -> bool:
        return self.lookup(*key) is not None

    # -- slot search ----------------------------------------------------

    def _locate(self, id_m: int, id_s: int) -> Tuple[int, int, int, bool]:
        """Find key ``(id_m, id_s)``; return ``(j, run_start, pos, found)``.

        The run of entries with first id ``id_m`` is the half-open range
        ``[run_start, run_end)`` bounded by a lower- and an upper-bound
        binary search; the second search is skipped when the element at
        ``run_start`` already has another first id (empty run).  ``pos`` is
        the key's index when ``found``, otherwise its insertion point under
        ``FULLY_SORTED`` order.  Every element inspected adds one slot probe.
        """
        if id_m >= id_s:
            raise ValueError(f"pair needs id_m < id_s, got ({id_m}, {id_s})")
        j = (id_m + id_s) % self.l
        slot = self.slots[j]
        size = len(slot)
        probes = 0
        lo, hi = 0, size
        while lo < hi:
            mid = (lo + hi) >> 1
            probes += 1
            if slot[mid][0] < id_m:
                lo = mid + 1
            else:
                hi = mid
        start = lo
        if lo < size:
            probes += 1
            if slot[lo][0] == id_m:
                lo += 1
                hi = size
                while lo < hi:
                    mid = (lo + hi) >> 1
                    probes += 1
                    if slot[mid][0] <= id_m:
                        lo = mid + 1
                    else:
                        hi = mid
        end = lo

        if self._full:
            lo, hi = start, end
            while lo < hi:
                mid = (lo + hi) >> 1
                probes += 1
                if slot[mid][1] < id_s:
                    lo = mid + 1
                else:
                    hi = mid
            found = lo < end and slot[lo][1] == id_s
            self.stats.slot_probes += probes + (lo < end)
            return j, start, lo, found

        for pos in range(start, end):
            probes += 1
            if slot[pos][1] == id_s:
                self.stats.slot_probes += probes
                return j, start, pos, True
        self.stats.slot_probes += probes
        return j, start, end, False

    # -- mutation and lookup ----------------------------------------------

    def insert(self, entry: DistanceEntry) -> None:
        """Store ``entry``; a key already present raises :class:`DuplicateEntry`.

        ``FIRST_SORTED`` puts the entry at the front of its ``id_m`` run (or
        where that run would start); ``FULLY_SORTED`` keeps the run ordered
        by ``id_s``.
        """
        id_m, id_s, d = entry
        if id_m >= id_s:
            raise ValueError(f"entry needs id_m < id_s, got ({id_m}, {id_s})")
        self.add(id_m, id_s, d)

    def add(self, id_a: int, id_b: int, d: float) -> None:
        """Insert the distance between two ids given in either order."""
        if id_a > id_b:
            id_a, id_b = id_b, id_a
        if not (d >= 0.0 and d != _INF):
            raise ValueError(f"distance must be finite and non-negative, got {d!r}")
        j, start, pos, found = self._locate(id_a, id_b)
        if found:
            raise DuplicateEntry(f"pair ({id_a}, {id_b}) already stored")
        if not self._full:
            pos = start
        self.slots[j].insert(pos, _new_entry(DistanceEntry, (id_a, id_b, d)))
        self._dists[j].insert(pos, d)
        self._count += 1

    def lookup(self, id_m: int, id_s: int) -> Optional[DistanceEntry]:
        if id_m > id_s:
            id_m, id_s = id_s, id_m
        j, _, pos, found = self._locate(id_m, id_s)
        return self.slots[j][pos] if found else None

    def delete(self, id_m: int, id_s: int) -> DistanceEntry:
        if id_m > id_s:
            id_m, id_s = id_s, id_m
        j, _, pos, found = self._locate(id_m, id_s)
        if not found:
            raise EntryNotFound((id_m, id_s))
        self._count -= 1
        del self._dists[j][pos]
        return self.slots[j].pop(pos)

    def remove_cluster(self, dead: int, live_ids: Iterable[int]) -> None:
        """Delete every entry pairing ``dead`` with one of ``live_ids``."""
        locate, slots, dists = self._locate, self.slots, self._dists
        for x in live_ids:
            if x == dead:
                raise ValueError(f"live ids must not contain the removed id {dead}")
            key = (dead, x) if dead < x else (x, dead)
            j, _, pos, found = locate(*key)
            if not found:
                raise EntryNotFound(key)
            del dists[j][pos]
            del slots[j][pos]
            self._count -= 1

    def min_entry(self) -> DistanceEntry:
        """Smallest entry by distance, ties broken by ``(id_m, id_s)``.

        Full scan over every slot: one pass reads each entry's distance, then
        only the slots holding the minimal distance are re-read to apply the
        id tie-break.  Every entry read counts as one scan comparison.
        """
        if not self._count:
            raise ValueError("min_entry of an empty distance set")
        inf = math.inf
        slot_mins = [min(ds) if ds else inf for ds in self._dists]
        best = min(slot_mins)
        tied = [self.slots[j] for j, d in enumerate(slot_mins) if d == best]
        self.stats.scan_comparisons += self._count + sum(map(len, tied))
        # entries with equal d compare by (id_m, id_s) under tuple order
        return min(e for s in tied for e in s if e[2] == best)

    # -- checking ---------------------------------------------------------

    def check_invariants(self) -> None:
        seen = set()
        total = 0
        for j, slot in enumerate(self.slots):
            for i, e in enumerate(slot):
                if not e.id_m < e.id_s:
                    raise InvariantError(f"slot {j}[{i}]: ids out of order in {e}")
                if (e.id_m + e.id_s) % self.l != j:
                    raise InvariantError(f"slot {j}[{i}]: {e} hashes elsewhere")
                key = (e.id_m, e.id_s)
                if key in seen:
                    raise InvariantError(f"duplicate key {key}")
                seen.add(key)
                if i:
                    prev = slot[i - 1]
                    if self.mode is SlotMode.FULLY_SORTED:
                        ok = (prev.id_m, prev.id_s) < key
                    else:
                        ok = prev.id_m <= e.id_m
                    if not ok:
                        raise InvariantError(f"slot {j}: {prev} before {e} breaks {self.mode.name}")
            if self._dists[j] != [e.d for e in slot]:
                raise InvariantError(f"slot {j}: distance column out of sync")
            total += len(slot)
        if total != self._count:
            raise InvariantError(f"entry count {self._count} but {total} stored")
