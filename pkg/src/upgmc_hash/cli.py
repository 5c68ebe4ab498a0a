"""Command-line front end: ``cluster``, ``bench`` and ``selftest``.

Exit codes: 0 success, 1 selftest failure, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from contextlib import contextmanager
from typing import List, Optional, Sequence

from .bench import BenchConfig, BenchError, format_summary, run_bench, summarize, write_csv
from .distset import SlotMode
from .engine import EngineKind, cluster
from .model import Dendrogram, MergeRecord

LINKAGE_HEADER = ["step", "left", "right", "distance", "new_id", "new_size"]


class InputError(ValueError):
    pass


def _parse_float(text: str) -> Optional[float]:
    try:
        v = float(text)
    except ValueError:
        return None
    return v if math.isfinite(v) else None


def parse_points(stream) -> List[List[float]]:
    """Read one point per CSV row; a non-numeric first row is a header."""
    points: List[List[float]] = []
    width = None
    reader = csv.reader(stream)
    first = True
    for row in reader:
        lineno = reader.line_num
        cells = [c.strip() for c in row]
        if not any(cells):
            continue
        values = [_parse_float(c) for c in cells]
        if first:
            first = False
            if any(v is None for v in values):
                if all(_parse_float(c) is None for c in cells):
                    continue
        for c, v in zip(cells, values):
            if v is None:
                raise InputError(f"line {lineno}: not a finite number: {c!r}")
        if width is None:
            width = len(values)
        elif len(values) != width:
            raise InputError(f"line {lineno}: expected {width} columns, got {len(values)}")
        points.append(values)
    return points


def read_points(path: str) -> List[List[float]]:
    try:
        with open(path, newline="", encoding="utf-8") as f:
            return parse_points(f)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from exc
    except UnicodeDecodeError as exc:
        raise InputError(f"{path} is not UTF-8 text") from exc


def write_linkage(dendro: Dendrogram, out) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(LINKAGE_HEADER)
    for r in dendro.records:
        # repr gives the shortest decimal that round-trips the double
        writer.writerow([r.step, r.left, r.right, repr(r.distance), r.new_id, r.new_size])


def read_linkage(stream) -> Dendrogram:
    reader = csv.reader(stream)
    header = next(reader, None)
    if header != LINKAGE_HEADER:
        raise InputError(f"unexpected linkage header {header!r}")
    records = []
    for row in reader:
        step, left, right, dist, new_id, new_size = row
        records.append(MergeRecord(int(step), int(left), int(right), float(dist),
                                   int(new_id), int(new_size)))
    return Dendrogram(len(records) + 1, tuple(records))


@contextmanager
def _output(path: Optional[str]):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="", encoding="utf-8") as f:
            yield f


def _int_list(text: str) -> List[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _slot_list(text: str):
    out = []
    for x in text.split(","):
        x = x.strip()
        if x == "auto":
            out.append(x)
        elif x:
            try:
                out.append(int(x))
            except ValueError:
                raise argparse.ArgumentTypeError(f"bad slot count {x!r}")
    return out


def _name_list(choices):
    def parse(text):
        names = [x.strip() for x in text.split(",") if x.strip()]
        bad = [x for x in names if x not in choices]
        if bad:
            raise argparse.ArgumentTypeError(f"unknown value(s) {bad}; choose from {list(choices)}")
        return names
    return parse


def cmd_cluster(args) -> int:
    try:
        points = read_points(args.input)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if len(points) < 2:
        print(f"error: need at least 2 points, got {len(points)}", file=sys.stderr)
        return 2
    mode = SlotMode(args.mode)
    if args.engine == "naive":
        kind = EngineKind.naive()
    else:
        l = len(points) if args.slots == "auto" else int(args.slots)
        kind = EngineKind.hashed(l, mode)
    dendro, stats = cluster(points, kind)
    # build the whole output first so a failed write leaves nothing partial
    buf = io.StringIO()
    write_linkage(dendro, buf)
    with _output(args.output) as out:
        out.write(buf.getvalue())
    where = f" l={kind.l} mode={kind.mode.value}" if kind.l else ""
    print(
        f"engine={kind.name}{where} n={len(points)} "
        f"distance_computations={stats.distance_computations} "
        f"slot_probes={stats.slot_probes} scan_comparisons={stats.scan_comparisons} "
        f"wall_time={stats.wall_time / 1e6:.3f} ms",
        file=sys.stderr,
    )
    return 0


def cmd_bench(args) -> int:
    config = BenchConfig(
        n_values=args.n,
        l_values=args.l,
        d=args.d,
        modes=[SlotMode(m) for m in args.modes],
        seeds=args.seeds,
        repetitions=args.reps,
        engines=args.engines,
        warmup=not args.no_warmup,
        timed=not args.untimed,
        workers=args.workers,
    )
    try:
        config.validate()
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    def progress(n, seed, kind, rep):
        if args.verbose:
            print(f"  done {kind.name} n={n} l={kind.l} seed={seed} rep={rep}", file=sys.stderr)

    try:
        rows = run_bench(config, progress)
    except BenchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    with _output(args.output) as out:
        write_csv(rows, out)
    summary = format_summary(summarize(rows))
    if summary:
        print(summary, file=sys.stderr)
    return 0


def cmd_selftest(args) -> int:
    from .selftest import run_selftest

    ok, _ = run_selftest(sys.stdout)
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="upgmc-hash",
        description="Centroid-linkage clustering over a residue-hashed distance set.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cluster", help="cluster a CSV of points and write the linkage CSV")
    p.add_argument("input", help="points CSV, one point per row")
    p.add_argument("--engine", choices=["naive", "hashed"], default="hashed")
    p.add_argument("--slots", default="auto", help="slot count or 'auto' (= point count)")
    p.add_argument("--mode", choices=[m.value for m in SlotMode], default="first")
    p.add_argument("-o", "--output", help="output path (default stdout)")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("bench", help="run a benchmark sweep and write rows as CSV")
    p.add_argument("--n", type=_int_list, required=True, help="point counts, e.g. 100,500")
    p.add_argument("--l", type=_slot_list, default=None,
                   help="slot counts or 'auto'; default sweeps ceil(n/4), n, 4n, next_prime(n)")
    p.add_argument("--d", type=int, default=16, help="dimension (default 16)")
    p.add_argument("--modes", type=_name_list([m.value for m in SlotMode]), default=["first"])
    p.add_argument("--seeds", type=_int_list, default=[1])
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--engines", type=_name_list(["naive", "hashed"]), default=["naive", "hashed"])
    p.add_argument("--no-warmup", action="store_true", help="skip the untimed warm-up run")
    p.add_argument("--untimed", action="store_true", help="record counters only")
    p.add_argument("--workers", type=int, default=1, help="processes for --untimed runs")
    p.add_argument("-o", "--output", help="output path (default stdout)")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("selftest", help="check counter formulas and engine equivalence")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "slots", "auto") != "auto":
        try:
            if int(args.slots) < 1:
                raise ValueError
        except ValueError:
            parser.error(f"--slots must be a positive integer or 'auto', got {args.slots!r}")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
