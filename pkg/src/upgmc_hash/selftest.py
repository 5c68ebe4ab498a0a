"""Quick built-in checks run by ``upgmc-hash selftest``."""

from __future__ import annotations

import random
import sys

from .bench import generate_dataset, next_prime
from .distset import HashedDistanceSet, SlotMode
from .engine import (
    cluster_hashed,
    cluster_naive,
    dendrogram_checksum,
    hashed_distance_count,
    naive_distance_count,
)


def check_naive_counts():
    for n in range(2, 21):
        _, stats = cluster_naive(generate_dataset(n, 3, n))
        assert stats.distance_computations == naive_distance_count(n), f"naive n={n}"


def check_hashed_counts():
    for n in range(2, 21):
        for l in (1, 7, n, 4 * n):
            _, stats = cluster_hashed(generate_dataset(n, 3, n), l)
            assert stats.distance_computations == hashed_distance_count(n), f"hashed n={n} l={l}"


def check_hand_trace():
    dendro, _ = cluster_naive([[0.0], [1.0], [5.0]])
    got = [tuple(r) for r in dendro.records]
    assert got == [(1, 0, 1, 1.0, 3, 2), (2, 2, 3, 4.5, 4, 3)], got


def _datasets():
    rng = random.Random(2024)
    for i in range(25):
        n = rng.randint(2, 25)
        d = rng.randint(1, 6)
        pts = generate_dataset(n, d, 1000 + i)
        if i % 3 == 0:
            # duplicate some points to exercise the tie-break
            for _ in range(n // 2):
                pts[rng.randrange(n)] = pts[rng.randrange(n)]
        yield pts


def check_engine_equivalence():
    for pts in _datasets():
        a, _ = cluster_naive(pts)
        b, _ = cluster_hashed(pts)
        assert a.pairs() == b.pairs(), f"merge pairs differ for n={len(pts)}"
        for ra, rb in zip(a, b):
            assert abs(ra.distance - rb.distance) <= 1e-12 * max(1.0, abs(ra.distance)), (ra, rb)


def check_slot_invariance():
    for pts in _datasets():
        n = len(pts)
        ref = dendrogram_checksum(cluster_hashed(pts, 1)[0])
        for l in (3, n, next_prime(n)):
            for mode in SlotMode:
                assert dendrogram_checksum(cluster_hashed(pts, l, mode)[0]) == ref, (n, l, mode)


def check_structure():
    rng = random.Random(7)
    for l in (1, 2, 17):
        for mode in SlotMode:
            s = HashedDistanceSet(l, mode)
            ref = {}
            for _ in range(600):
                a, b = sorted(rng.sample(range(40), 2))
                if (a, b) in ref and rng.random() < 0.5:
                    assert s.delete(a, b).d == ref.pop((a, b))
                elif (a, b) not in ref:
                    ref[(a, b)] = rng.random()
                    s.add(a, b, ref[(a, b)])
                else:
                    assert s.lookup(a, b).d == ref[(a, b)]
                s.check_invariants()
            assert {(e.id_m, e.id_s): e.d for e in s} == ref


CHECKS = [
    ("naive distance count = C(n+1,3)", check_naive_counts),
    ("hashed distance count = (n-1)^2", check_hashed_counts),
    ("hand trace on {0, 1, 5}", check_hand_trace),
    ("naive/hashed engine equivalence", check_engine_equivalence),
    ("slot count and mode invariance", check_slot_invariance),
    ("slot structure invariants", check_structure),
]


def run_selftest(out=None):
    """Run every check in order and stop at the first failure.

    Returns ``(ok, report_lines)``.
    """
    out = out or sys.stdout
    report = []
    for name, check in CHECKS:
        try:
            check()
        except Exception as exc:  # report any failure, not just assertions
            line = f"FAIL {name}: {type(exc).__name__}: {exc}"
            report.append(line)
            print(line, file=out)
            return False, report
        line = f"ok   {name}"
        report.append(line)
        print(line, file=out)
    return True, report
