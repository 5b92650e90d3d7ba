"""Command-line front end: ``rangeenc {encode,decode,query,verify,bench,count}``.

Exit codes: 0 success, 1 verification failure, 2 usage or input error.
All tabular output is CSV with a header row; times are in microseconds.
"""

from __future__ import annotations

import argparse
import csv
import random
import sys
import time
from typing import List, Optional

from . import combinatorics, minmax, topk_ds, topk_enc, verify
from .bitvec import binary_entropy
from .core import RangeEncError, normalize, read_array_file, read_query_file

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _int_list(s: str) -> List[int]:
    try:
        return [int(x) for x in s.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {s!r}") from None


def _block_list(s: str) -> List[Optional[int]]:
    return [None if x == "auto" else int(x) for x in s.split(",") if x]


def _writer(out):
    return csv.writer(out, lineterminator="\n")


def _build(vals, mode: str, k: int, B: Optional[int]):
    if mode == "minmax":
        return minmax.encode_minmax(vals)
    if k < 1:
        raise UsageError("-k must be at least 1")
    if mode == "topk":
        return topk_enc.encode_topk(vals, k)
    if B is not None and B < 1:
        raise UsageError("-B must be at least 1")
    return topk_ds.build(vals, k, B)


def _size_row(obj):
    """``(mode, n, k, B, payload bits, bound bits)`` for a built object."""
    if isinstance(obj, minmax.MinMaxEncoding):
        return "minmax", obj.n, "", "", obj.size_bits, 3 * obj.n
    if isinstance(obj, topk_enc.TopKEncoding):
        n, k = obj.n, obj.k
        return "topk", n, k, "", len(obj.bits), (k + 1) * n * binary_entropy(1 / (k + 1))
    rep = topk_ds.space_report(obj)
    payload = rep["e_int_bits"] + rep["e_win_bits"] + rep["block_index_bits"]
    bound = rep["bound_encoding_bits"] + rep["bound_block_index_bits"]
    return "ds", obj.n, obj.k, obj.B, payload, bound


def _ratio(payload, bound) -> str:
    return f"{payload / bound:.6f}" if bound else ""


def load(path):
    with open(path, "rb") as fh:
        buf = fh.read()
    magic = buf[:4]
    if magic == minmax.MAGIC:
        return minmax.MinMaxEncoding.from_bytes(buf)
    if magic == topk_enc.MAGIC:
        return topk_enc.TopKEncoding.from_bytes(buf)
    if magic == topk_ds.MAGIC:
        return topk_ds.TopKStructure.from_bytes(buf)
    raise UsageError(f"{path}: unrecognized file magic {magic!r}")


def cmd_encode(args, out) -> int:
    if not args.output:
        raise UsageError("encode needs --output")
    vals = normalize(read_array_file(args.input))
    obj = _build(vals, args.mode, args.k, args.B)
    with open(args.output, "wb") as fh:
        fh.write(obj.to_bytes())
    mode, n, k, B, payload, bound = _size_row(obj)
    w = _writer(out)
    w.writerow(["mode", "n", "k", "B", "payload_bits", "bound_bits", "ratio"])
    w.writerow([mode, n, k, B, payload, f"{bound:.3f}", _ratio(payload, bound)])
    return EXIT_OK


def cmd_decode(args, out) -> int:
    obj = load(args.input)
    w = _writer(out)
    if isinstance(obj, minmax.MinMaxEncoding):
        tr = minmax.decode_minmax(obj)
        w.writerow(["n", "T", "U", "trace_min", "trace_max"])
        w.writerow([obj.n, str(obj.T), str(obj.U), tr.t_min, tr.t_max])
    elif isinstance(obj, topk_enc.TopKEncoding):
        w.writerow(["j", "counters"])
        state = topk_enc.Replay(obj.k)
        state.step(0)
        w.writerow([1, " ".join(map(str, state.counters))])
        for d in obj.deltas():
            state.step(d)
            w.writerow([state.j, " ".join(map(str, state.counters))])
    else:
        rep = topk_ds.space_report(obj)
        w.writerow(list(rep))
        w.writerow([f"{v:.3f}" if isinstance(v, float) else v for v in rep.values()])
    return EXIT_OK


def _answer(obj, index, i, j, kp):
    if isinstance(obj, minmax.MinMaxEncoding):
        if kp is not None:
            raise UsageError("min-max files take 'i j' queries only")
        return minmax.r_min_max(index, (i, j))
    if isinstance(obj, topk_enc.TopKEncoding):
        res = topk_enc.query_topk(obj, (i, j))
    else:
        res = obj.query((i, j))
    if kp is None:
        return res
    if not 1 <= kp <= len(res):
        raise UsageError(f"k'={kp} outside [1, {len(res)}]")
    return (res[kp - 1],)


def cmd_query(args, out) -> int:
    if not args.queries:
        raise UsageError("query needs --queries")
    obj = load(args.input)
    queries = read_query_file(args.queries)
    index = minmax.build_index(obj) if isinstance(obj, minmax.MinMaxEncoding) else None
    lines = []
    for lineno, (i, j, kp) in enumerate(queries, 1):
        try:
            res = _answer(obj, index, i, j, kp)
        except (RangeEncError, UsageError) as exc:
            raise UsageError(f"{args.queries}: query {lineno}: {exc}") from None
        lines.append(" ".join(map(str, res)))
    text = "\n".join(lines) + ("\n" if lines else "")
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)
    return EXIT_OK


def cmd_verify(args, out) -> int:
    results = verify.run_suite(args.suite, args.budget, args.seed)
    w = _writer(out)
    w.writerow(["suite", "check", "cases", "failures", "status", "example"])
    for r in results:
        w.writerow([r.suite, r.check, r.cases, r.failures, "pass" if r.ok else "FAIL", r.example])
    return EXIT_OK if all(r.ok for r in results) else EXIT_FAIL


def _time_us(fn, reps: int = 1) -> float:
    t = time.perf_counter()
    for _ in range(reps):
        fn()
    return (time.perf_counter() - t) * 1e6 / reps


def cmd_bench(args, out) -> int:
    rng = random.Random(args.seed)
    w = _writer(out)
    w.writerow(["mode", "n", "k", "B", "build_us", "query_us", "payload_bits", "bound_bits", "ratio"])
    for n in args.n:
        vals = list(range(1, n + 1))
        rng.shuffle(vals)
        A = normalize(vals)
        qs = []
        for _ in range(args.num_queries):
            i = rng.randint(1, n)
            qs.append((i, rng.randint(i, n)))
        configs = [("minmax", 1, None)] if args.mode == "minmax" else \
            [(args.mode, k, B) for k in args.k for B in (args.B if args.mode == "ds" else [None])]
        for mode, k, B in configs:
            t = time.perf_counter()
            obj = _build(A, mode, k, B)
            build_us = (time.perf_counter() - t) * 1e6
            if mode == "minmax":
                idx = minmax.build_index(obj)
                run = lambda: [minmax.r_min_max(idx, q) for q in qs]
            elif mode == "topk":
                run = lambda: [topk_enc.query_topk(obj, q) for q in qs]
            else:
                run = lambda: [obj.query(q) for q in qs]
            query_us = _time_us(run) / max(1, len(qs))
            m, n_, k_, B_, payload, bound = _size_row(obj)
            w.writerow([m, n_, k_, B_, f"{build_us:.1f}", f"{query_us:.2f}", payload,
                        f"{bound:.3f}", _ratio(payload, bound)])
    return EXIT_OK


def cmd_count(args, out) -> int:
    rows = combinatorics.count_tables(max_n=args.budget)
    combinatorics.write_table(rows, out)
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rangeenc", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("encode", help="build and serialize an encoding or data structure")
    e.add_argument("--input", required=True, help="array file, one integer per line")
    e.add_argument("--output", help="serialized output file")
    e.add_argument("--mode", choices=("minmax", "topk", "ds"), default="topk")
    e.add_argument("-k", type=int, default=2)
    e.add_argument("-B", type=int, default=None, help="block size for --mode ds (default: auto)")

    d = sub.add_parser("decode", help="validate a serialized file and print its contents")
    d.add_argument("--input", required=True)

    q = sub.add_parser("query", help="answer a query file against a serialized file")
    q.add_argument("--input", required=True)
    q.add_argument("--queries", help="query file, lines 'i j [k']'")
    q.add_argument("--output")

    v = sub.add_parser("verify", help="run a property suite")
    v.add_argument("suite", choices=verify.SUITES)
    v.add_argument("--budget", type=int, default=5, help="largest exhaustive n (0 runs nothing)")
    v.add_argument("--seed", type=int, default=0)

    b = sub.add_parser("bench", help="time builds and queries on random permutations")
    b.add_argument("--mode", choices=("minmax", "topk", "ds"), default="topk")
    b.add_argument("-n", "--n", type=_int_list, default=[1024, 4096])
    b.add_argument("-k", type=_int_list, default=[1, 2, 4])
    b.add_argument("-B", type=_block_list, default=[16, 32, 64])
    b.add_argument("--num-queries", type=int, default=200)
    b.add_argument("--seed", type=int, default=0)

    c = sub.add_parser("count", help="print combinatorial count tables")
    c.add_argument("--budget", type=int, default=6, help="largest n for permutation enumeration")
    return p


COMMANDS = {"encode": cmd_encode, "decode": cmd_decode, "query": cmd_query,
            "verify": cmd_verify, "bench": cmd_bench, "count": cmd_count}


def main(argv: Optional[List[str]] = None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = make_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return COMMANDS[args.command](args, out)
    except (UsageError, RangeEncError, OSError, ValueError) as exc:
        print(f"rangeenc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
