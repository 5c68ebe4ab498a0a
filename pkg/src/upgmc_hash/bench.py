"""Benchmark sweep over point count, slot count and slot mode.

Every row's counters are checked against the closed forms
``C(n+1, 3)`` (naive) and ``(n-1)**2`` (hashed) before it is emitted, and
all runs on the same dataset must produce the same dendrogram checksum.
"""

from __future__ import annotations

import csv
import math
import random
import statistics
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .distset import SlotMode
from .engine import (
    EngineKind,
    dendrogram_checksum,
    hashed_distance_count,
    make_engine,
    naive_distance_count,
)

ENGINES = ("naive", "hashed")


class BenchError(RuntimeError):
    """A run disagreed with a closed-form count or with another run."""


def generate_dataset(n: int, d: int, seed: int) -> List[Tuple[float, ...]]:
    """``n`` points with ``d`` coordinates drawn uniformly from [0, 1).

    Uses the stdlib Mersenne Twister seeded with the integer ``seed``;
    ``random.Random(seed).random()`` is guaranteed stable across Python
    versions and platforms.  Coordinates are drawn row by row.
    """
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    if d < 1:
        raise ValueError(f"d must be at least 1, got {d}")
    rng = random.Random(seed)
    return [tuple(rng.random() for _ in range(d)) for _ in range(n)]


def next_prime(n: int) -> int:
    """Smallest prime >= n."""
    k = max(n, 2)
    while any(k % p == 0 for p in range(2, math.isqrt(k) + 1)):
        k += 1
    return k


def default_l_sweep(n: int) -> List[int]:
    return _dedupe([math.ceil(n / 4), n, 4 * n, next_prime(n)])


def _dedupe(values):
    out = []
    for v in values:
        if v not in out:
            out.append(v)
    return out


LValue = Union[int, str]


@dataclass
class BenchConfig:
    n_values: Sequence[int]
    # None selects default_l_sweep(n); "auto" stands for l = n
    l_values: Optional[Sequence[LValue]] = None
    d: int = 16
    modes: Sequence[SlotMode] = (SlotMode.FIRST_SORTED,)
    seeds: Sequence[int] = (1,)
    repetitions: int = 1
    engines: Sequence[str] = ENGINES
    warmup: bool = True
    timed: bool = True
    workers: int = 1

    def validate(self) -> None:
        for name in ("n_values", "modes", "seeds", "engines"):
            if not list(getattr(self, name)):
                raise ValueError(f"{name} must not be empty")
        if self.l_values is not None and not list(self.l_values):
            raise ValueError("l_values must not be empty")
        for n in self.n_values:
            if isinstance(n, bool) or not isinstance(n, int) or n < 2:
                raise ValueError(f"every n must be an integer >= 2, got {n!r}")
        for l in self.l_values or ():
            if l != "auto" and (isinstance(l, bool) or not isinstance(l, int) or l < 1):
                raise ValueError(f"slot counts must be positive integers or 'auto', got {l!r}")
        for e in self.engines:
            if e not in ENGINES:
                raise ValueError(f"unknown engine {e!r}")
        if self.d < 1:
            raise ValueError(f"d must be at least 1, got {self.d}")
        if self.repetitions < 1:
            raise ValueError(f"repetitions must be at least 1, got {self.repetitions}")
        if self.workers < 1:
            raise ValueError(f"workers must be at least 1, got {self.workers}")
        if self.workers > 1 and self.timed:
            raise ValueError("parallel workers are only allowed for untimed runs")
        self.modes = [SlotMode(m) for m in self.modes]

    def slot_counts(self, n: int) -> List[int]:
        if self.l_values is None:
            return default_l_sweep(n)
        return _dedupe([n if l == "auto" else l for l in self.l_values])


@dataclass
class BenchRow:
    engine: str
    n: int
    l: Optional[int]
    mode: Optional[str]
    d: int
    seed: int
    repetition: int
    wall_time_ns: Optional[int]
    distance_computations: int
    slot_probes: int
    scan_comparisons: int
    checksum: str


CSV_FIELDS = [f.name for f in fields(BenchRow)]


def _combinations(config: BenchConfig):
    for n in config.n_values:
        for seed in config.seeds:
            for engine in config.engines:
                if engine == "naive":
                    yield n, seed, EngineKind.naive()
                    continue
                for l in config.slot_counts(n):
                    for mode in config.modes:
                        yield n, seed, EngineKind.hashed(l, mode)


def _run_once(job) -> Tuple[int, int, int, int, str]:
    n, d, seed, kind = job
    engine = make_engine(generate_dataset(n, d, seed), kind)
    dendro, stats = engine.run()
    return (stats.wall_time, stats.distance_computations, stats.slot_probes,
            stats.scan_comparisons, dendrogram_checksum(dendro))


def _check_row(row: BenchRow, checksums: Dict[Tuple[int, int], str]) -> None:
    if row.engine == "naive":
        expected = naive_distance_count(row.n)
        if row.scan_comparisons != expected:
            raise BenchError(f"{row}: scan_comparisons != C(n+1,3) = {expected}")
    else:
        expected = hashed_distance_count(row.n)
    if row.distance_computations != expected:
        raise BenchError(
            f"{row.engine} n={row.n} l={row.l}: {row.distance_computations} distance "
            f"computations, expected {expected}"
        )
    ref = checksums.setdefault((row.n, row.seed), row.checksum)
    if row.checksum != ref:
        raise BenchError(
            f"{row.engine} n={row.n} l={row.l} mode={row.mode} seed={row.seed}: "
            f"dendrogram checksum {row.checksum} differs from {ref}"
        )


def run_bench(config: BenchConfig, progress=None) -> List[BenchRow]:
    """Run every (n, seed, engine, l, mode) combination ``repetitions`` times.

    Timed runs execute sequentially with one discarded warm-up run per
    combination.  Untimed runs may be spread over ``config.workers``
    processes; their ``wall_time_ns`` is left empty.
    """
    config.validate()
    jobs = []
    for n, seed, kind in _combinations(config):
        for rep in range(config.repetitions):
            jobs.append((n, config.d, seed, kind, rep))

    if config.timed:
        results = []
        warmed = set()
        for n, d, seed, kind, rep in jobs:
            if config.warmup and (n, seed, kind) not in warmed:
                _run_once((n, d, seed, kind))
                warmed.add((n, seed, kind))
            results.append(_run_once((n, d, seed, kind)))
            if progress:
                progress(n, seed, kind, rep)
    elif config.workers > 1:
        with ProcessPoolExecutor(config.workers) as pool:
            results = list(pool.map(_run_once, [j[:4] for j in jobs]))
    else:
        results = [_run_once(j[:4]) for j in jobs]

    rows = []
    checksums: Dict[Tuple[int, int], str] = {}
    for (n, d, seed, kind, rep), (wall, dist, probes, scans, checksum) in zip(jobs, results):
        row = BenchRow(
            engine=kind.name,
            n=n,
            l=kind.l,
            mode=kind.mode.value if kind.mode else None,
            d=d,
            seed=seed,
            repetition=rep,
            wall_time_ns=wall if config.timed else None,
            distance_computations=dist,
            slot_probes=probes,
            scan_comparisons=scans,
            checksum=checksum,
        )
        _check_row(row, checksums)
        rows.append(row)
    return rows


def write_csv(rows: Iterable[BenchRow], out=None) -> None:
    out = out or sys.stdout
    writer = csv.DictWriter(out, fieldnames=CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: ("" if v is None else v) for k, v in asdict(row).items()})


@dataclass
class Summary:
    engine: str
    n: int
    l: Optional[int]
    mode: Optional[str]
    seed: int
    median_ns: float
    times_ns: List[int] = field(default_factory=list)


def summarize(rows: Iterable[BenchRow]) -> List[Summary]:
    """Median wall time per (engine, n, l, mode, seed) combination."""
    groups: Dict[tuple, List[int]] = {}
    for r in rows:
        if r.wall_time_ns is not None:
            groups.setdefault((r.engine, r.n, r.l, r.mode, r.seed), []).append(r.wall_time_ns)
    return [Summary(*key, statistics.median(ts), ts) for key, ts in groups.items()]


def format_summary(summaries: Iterable[Summary]) -> str:
    lines = []
    for s in summaries:
        where = "" if s.l is None else f" l={s.l} mode={s.mode}"
        lines.append(
            f"{s.engine:6s} n={s.n} seed={s.seed}{where}: median {s.median_ns / 1e9:.4f} s"
            f" over {len(s.times_ns)} run(s)"
        )
    return "\n".join(lines)
