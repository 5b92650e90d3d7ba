"""Emit the combinatorial count tables (exact counts next to their bounds) as CSV."""

import argparse
import sys

from rangeenc.combinatorics import count_tables, write_table


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--max-n", type=int, default=7)
    p.add_argument("--max-k", type=int, default=2)
    p.add_argument("--max-len", type=int, default=10)
    p.add_argument("--max-N", type=int, default=40)
    p.add_argument("--output")
    args = p.parse_args(argv)
    rows = count_tables(args.max_n, args.max_k, args.max_len, args.max_N)
    if args.output:
        with open(args.output, "w", newline="") as fh:
            write_table(rows, fh)
    else:
        write_table(rows, sys.stdout)
    worst = {}
    for r in rows:
        if r["table"] != "baxter" and r["bound"]:
            worst[r["table"]] = min(worst.get(r["table"], float("inf")), r["exact"] / r["bound"])
    for table, ratio in sorted(worst.items()):
        print(f"# {table}: min exact/bound = {ratio:.4g}", file=sys.stderr)


if __name__ == "__main__":
    main()
