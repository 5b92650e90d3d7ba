"""Query time of the block data structure as B grows, at fixed n and k.

Writes CSV (times in microseconds) and prints the fitted log-log slope of
mean query time against B; the cost model predicts at most 2.
"""

import argparse
import csv
import random
import sys
import time

import numpy as np

from rangeenc.topk_ds import build, space_report


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("-n", type=int, default=8192)
    p.add_argument("-k", type=int, default=2)
    p.add_argument("-B", default="8,16,32,64,128,256,512")
    p.add_argument("--queries", type=int, default=300)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", help="CSV path (default: stdout)")
    args = p.parse_args(argv)

    rng = random.Random(args.seed)
    A = list(range(1, args.n + 1))
    rng.shuffle(A)
    qs = []
    for _ in range(args.queries):
        i = rng.randint(1, args.n)
        qs.append((i, rng.randint(i, args.n)))

    rows = []
    for B in (int(b) for b in args.B.split(",")):
        t = time.perf_counter()
        ds = build(A, args.k, B)
        build_us = (time.perf_counter() - t) * 1e6
        t = time.perf_counter()
        for q in qs:
            ds.query(q)
        query_us = (time.perf_counter() - t) * 1e6 / len(qs)
        rep = space_report(ds)
        rows.append({"n": args.n, "k": args.k, "B": B, "h": rep["h"],
                     "build_us": round(build_us, 1), "query_us": round(query_us, 2),
                     "encoding_bits": rep["e_int_bits"] + rep["e_win_bits"],
                     "block_index_bits": rep["block_index_bits"],
                     "bound_bits": round(rep["bound_encoding_bits"] + rep["bound_block_index_bits"], 1)})

    out = open(args.output, "w", newline="") if args.output else sys.stdout
    w = csv.DictWriter(out, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    if args.output:
        out.close()
    slope = np.polyfit(np.log([r["B"] for r in rows]), np.log([r["query_us"] for r in rows]), 1)[0]
    print(f"# log-log slope of query time vs B: {slope:.2f}", file=sys.stderr)


if __name__ == "__main__":
    main()
