"""Reproduce the worked top-k example: S_2(j) rows and the 19-bit encoding."""

from rangeenc.core import normalize
from rangeenc.topk_enc import active_order, encode_topk, replay

A = (46, 31, 93, 16, 45, 77, 25, 57, 26)
K = 2


def main():
    e = encode_topk(A, K)
    print("A       ", " ".join(f"{v:>3}" for v in A))
    print("rank    ", " ".join(f"{v:>3}" for v in normalize(A).values))
    for j in range(1, len(A) + 1):
        s = replay(e, j)
        delta = "" if j == len(A) else f"  delta={e.deltas()[j - 1]}"
        print(f"S_{K}({j},.)", " ".join(f"{c:>3}" for c in s.counters), f"  active={active_order(s)}{delta}")
    print("encoding", e.bits)


if __name__ == "__main__":
    main()
