"""Acceptance criteria, one test per criterion.

Criteria 7 and 8 time the engines at n=500/1000 and take several minutes
in CPython; deselect them with ``-m "not slow"`` for a quick run.
"""

import math
import random
import time

import pytest

from upgmc_hash.bench import BenchConfig, generate_dataset, next_prime, run_bench, summarize
from upgmc_hash.cli import main
from upgmc_hash.distset import DuplicateEntry, EntryNotFound, HashedDistanceSet, SlotMode
from upgmc_hash.engine import (
    HashedEngine,
    cluster_hashed,
    cluster_naive,
    dendrogram_checksum,
)


def best_of(repeats, check):
    """Run ``check`` ``repeats`` times; return all its findings and the fastest time.

    The host's speed drifts by up to 2x between runs, so the runtime bound is
    held against the best of a few complete executions, as ``timeit`` does.
    """
    findings, times = [], []
    for _ in range(repeats):
        t0 = time.perf_counter()
        findings.extend(check())
        times.append(time.perf_counter() - t0)
    return findings, min(times)


def test_c1_naive_distance_count(criterion):
    def check():
        for n in range(2, 51):
            _, stats = cluster_naive(generate_dataset(n, 2, n))
            if stats.distance_computations != math.comb(n + 1, 3):
                yield n, stats.distance_computations

    bad, elapsed = best_of(3, lambda: list(check()))
    ok = criterion("C1 naive distance computations = C(n+1,3), n=2..50",
                   not bad and elapsed < 1.0, f"mismatches={bad} best-of-3 time={elapsed:.3f}s (<1s)")
    assert ok


def test_c2_hashed_distance_count(criterion):
    def check():
        for n in range(2, 51):
            pts = generate_dataset(n, 2, n)
            for l in (1, 7, n, 4 * n):
                _, stats = cluster_hashed(pts, l)
                if stats.distance_computations != (n - 1) ** 2:
                    yield n, l, stats.distance_computations

    bad, elapsed = best_of(3, lambda: list(check()))
    ok = criterion("C2 hashed distance computations = (n-1)^2, n=2..50, l in {1,7,n,4n}",
                   not bad and elapsed < 1.0, f"mismatches={bad} best-of-3 time={elapsed:.3f}s (<1s)")
    assert ok


def _random_datasets(count, n_range, d_range, seed):
    rng = random.Random(seed)
    for i in range(count):
        n = rng.randint(*n_range)
        d = rng.randint(*d_range)
        pts = generate_dataset(n, d, seed * 1000 + i)
        if i % 4 == 0:
            # copy points onto each other so distances tie exactly
            for _ in range(max(1, n // 2)):
                pts[rng.randrange(n)] = pts[rng.randrange(n)]
        elif i % 4 == 1:
            # coarse grid: many equal but non-zero distances
            pts = [tuple(float(rng.randint(0, 2)) for _ in range(d)) for _ in range(n)]
        yield pts


def test_c3_engine_equivalence(criterion):
    t0 = time.perf_counter()
    failures = []
    ties = 0
    for pts in _random_datasets(100, (2, 40), (1, 8), seed=3):
        a, _ = cluster_naive(pts)
        b, _ = cluster_hashed(pts)
        ties += len(set(pts)) < len(pts)
        if a.pairs() != b.pairs():
            failures.append(("pairs", len(pts)))
            continue
        for ra, rb in zip(a, b):
            if abs(ra.distance - rb.distance) > 1e-12 * max(abs(ra.distance), abs(rb.distance)):
                failures.append(("distance", ra, rb))
    elapsed = time.perf_counter() - t0
    ok = criterion("C3 naive/hashed merge sequences identical on 100 datasets",
                   not failures and ties > 0 and elapsed < 10.0,
                   f"failures={failures[:3]} datasets_with_duplicates={ties} time={elapsed:.2f}s (<10s)")
    assert ok


def test_c4_slot_count_invariance(criterion):
    t0 = time.perf_counter()
    failures = []
    for pts in _random_datasets(20, (2, 40), (1, 8), seed=4):
        n = len(pts)
        sums = {
            (l, mode): dendrogram_checksum(cluster_hashed(pts, l, mode)[0])
            for l in (1, 3, n, next_prime(n))
            for mode in SlotMode
        }
        if len(set(sums.values())) != 1:
            failures.append((n, sums))
    elapsed = time.perf_counter() - t0
    ok = criterion("C4 checksum identical across l in {1,3,n,next_prime(n)} and both modes",
                   not failures and elapsed < 5.0,
                   f"failures={len(failures)} time={elapsed:.2f}s (<5s)")
    assert ok


def test_c5_structure_invariants(criterion):
    t0 = time.perf_counter()
    ops = 0
    for l in (1, 2, 17, 256):
        mode = SlotMode.FIRST_SORTED if l % 2 else SlotMode.FULLY_SORTED
        rng = random.Random(l)
        s = HashedDistanceSet(l, mode)
        ref = {}
        for _ in range(2500):
            a, b = sorted(rng.sample(range(48), 2))
            r = rng.random()
            if r < 0.45:
                if (a, b) in ref:
                    with pytest.raises(DuplicateEntry):
                        s.add(a, b, 1.0)
                else:
                    ref[(a, b)] = rng.choice([0.25, rng.random()])
                    s.add(a, b, ref[(a, b)])
            elif r < 0.8:
                if (a, b) in ref:
                    assert s.delete(a, b) == (a, b, ref.pop((a, b)))
                else:
                    with pytest.raises(EntryNotFound):
                        s.delete(a, b)
            else:
                got = s.lookup(a, b)
                assert (None if got is None else got.d) == ref.get((a, b))
            ops += 1
            # residue, ordering, uniqueness, distance column
            s.check_invariants()
            assert len(s) == len(ref)
        assert {(e.id_m, e.id_s): e.d for e in s} == ref
    elapsed = time.perf_counter() - t0
    ok = criterion("C5 residue/ordering/uniqueness/reference-map hold after every op",
                   ops >= 10_000 and elapsed < 10.0, f"ops={ops} time={elapsed:.2f}s (<10s)")
    assert ok


def test_c6_entry_count_trajectory(criterion):
    t0 = time.perf_counter()
    n = 30
    engine = HashedEngine(generate_dataset(n, 4, 6))
    counts = []
    while not engine.done:
        engine.step()
        counts.append(engine.distances.entry_count())
    elapsed = time.perf_counter() - t0
    want = [math.comb(n - t, 2) for t in range(1, n)]
    ok = criterion("C6 after step t the set holds C(30-t,2) entries",
                   counts == want and elapsed < 1.0, f"time={elapsed:.3f}s (<1s)")
    assert ok


@pytest.mark.slow
def test_c7_hashed_faster_than_naive(criterion):
    rows = run_bench(BenchConfig(
        n_values=[500, 1000], l_values=["auto"], d=16, seeds=[1], repetitions=5, warmup=False,
    ))
    medians = {(s.engine, s.n): s.median_ns for s in summarize(rows)}
    verdicts = []
    for n in (500, 1000):
        naive, hashed = medians[("naive", n)], medians[("hashed", n)]
        verdicts.append((n, hashed < naive, naive / hashed, naive / 1e9, hashed / 1e9))
    detail = "; ".join(
        f"n={n}: naive {nv:.2f}s hashed {hv:.2f}s ratio {r:.2f}x" for n, _, r, nv, hv in verdicts
    )
    ok = criterion("C7 median-of-5 hashed (l=n) < naive at n=500, 1000 (d=16)",
                   all(v[1] for v in verdicts), detail)
    assert ok


@pytest.mark.slow
def test_c8_slot_sweep(criterion):
    rows = run_bench(BenchConfig(
        n_values=[1000], l_values=[10, 1000, 100000], d=16, seeds=[1],
        engines=["hashed"], repetitions=1, warmup=False,
    ))
    times = {r.l: r.wall_time_ns / 1e9 for r in rows}
    order = " < ".join(f"l={l}" for l in sorted(times, key=times.get))
    ok = criterion("C8 hashed wall time sweep at n=1000 over l in {10,1000,100000}",
                   sorted(times) == [10, 1000, 100000] and len({r.checksum for r in rows}) == 1,
                   ", ".join(f"l={l}: {t:.2f}s" for l, t in times.items()) + f"; fastest first: {order}")
    assert ok


def test_c9_cli_fixture(criterion, tmp_path, capsys):
    t0 = time.perf_counter()
    path = tmp_path / "points.csv"
    path.write_text("0\n1\n5\n")
    want = "step,left,right,distance,new_id,new_size\n1,0,1,1.0,3,2\n2,2,3,4.5,4,3\n"
    outputs = []
    for engine in ("hashed", "naive"):
        out = tmp_path / f"{engine}.csv"
        code = main(["cluster", str(path), "--engine", engine, "--slots", "auto", "-o", str(out)])
        outputs.append((code, out.read_bytes()))
    capsys.readouterr()
    elapsed = time.perf_counter() - t0
    ok = criterion("C9 CLI linkage is byte-exact for both engines",
                   outputs == [(0, want.encode())] * 2 and elapsed < 1.0,
                   f"time={elapsed:.3f}s (<1s)")
    assert ok
