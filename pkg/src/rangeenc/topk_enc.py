"""Space-optimal encoding of range top-k queries.

For a prefix ``A[1..j]`` the structure ``S_k(j)`` stores, per position, the
number of larger elements to its right within the prefix, capped at ``k``.
Positions with a counter below ``k`` are *active*. Appending ``A[j+1]``
increments exactly the ``delta_j`` smallest active positions, so the sequence
of deltas determines every ``S_k(j)``. The encoding stores it in unary:
``1 0^delta_1 1 0^delta_2 1 ... 0^delta_(n-1) 1``. The leading ``1`` stands
for the first element.
"""

from __future__ import annotations

import heapq
import struct
from bisect import bisect_left
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .bitvec import BitVector, binary_entropy, log2_binomial
from .core import (ArgumentError, ArrayLike, CorruptionError, FormatError,
                   RangeError, TopKResult, as_array, as_range)

MAGIC = b"RCTK"
VERSION = 1
_HEADER = struct.Struct("<4sBQQ")


@dataclass(frozen=True)
class SkStructure:
    j: int
    k: int
    counters: Tuple[int, ...]

    def active(self) -> List[int]:
        return [p for p, c in enumerate(self.counters, 1) if c < self.k]

    @property
    def size(self) -> int:
        return sum(self.k - c for c in self.counters)


@dataclass(frozen=True)
class TopKEncoding:
    n: int
    k: int
    bits: BitVector

    def deltas(self) -> List[int]:
        groups = self.bits.unary_groups()
        if len(groups) != self.n:
            raise FormatError(f"encoding has {len(groups)} groups, expected {self.n}")
        if groups and groups[0] != 0:
            raise FormatError("first element's group must be empty")
        return groups[1:]

    def to_bytes(self) -> bytes:
        return _HEADER.pack(MAGIC, VERSION, self.n, self.k) + self.bits.to_bytes()

    @classmethod
    def from_bytes(cls, buf: bytes) -> "TopKEncoding":
        if len(buf) < _HEADER.size:
            raise FormatError("truncated top-k header")
        magic, version, n, k = _HEADER.unpack_from(buf, 0)
        if magic != MAGIC:
            raise FormatError(f"bad top-k magic {magic!r}")
        if version != VERSION:
            raise FormatError(f"unsupported top-k version {version}")
        bits, end = BitVector.read_from(buf, _HEADER.size)
        if end != len(buf):
            raise FormatError("trailing bytes after top-k encoding")
        enc = cls(n, k, bits)
        if k < 1:
            raise FormatError("k must be positive")
        _check_deltas(enc)
        return enc


def build_sk(A: ArrayLike, k: int, j: int) -> SkStructure:
    """Direct quadratic construction from the dominance-graph definition."""
    vals = as_array(A).values
    if not 1 <= j <= len(vals):
        raise RangeError(f"prefix length {j} outside [1, {len(vals)}]")
    if k < 1:
        raise ArgumentError("k must be positive")
    counters = []
    for p in range(j):
        outdeg = sum(1 for q in range(p + 1, j) if vals[q] > vals[p])
        counters.append(min(k, outdeg))
    return SkStructure(j, k, tuple(counters))


def active_order(s: SkStructure) -> List[int]:
    """Active positions sorted by decreasing value, read off the counters alone."""
    order: List[int] = []
    for p in range(s.j, 0, -1):
        c = s.counters[p - 1]
        if c < s.k:
            if c > len(order):
                raise CorruptionError(
                    f"position {p} claims {c} larger active elements, only {len(order)} seen")
            order.insert(c, p)
    return order


class Replay:
    """Incremental ``S_k`` state driven by increment counts rather than values.

    Tracks positions ``start, start+1, ...``; ``asc`` holds the active ones in
    increasing value order. Used both for whole-prefix replay and for the
    local fragments rebuilt by the block data structure.
    """

    __slots__ = ("k", "start", "counters", "asc")

    def __init__(self, k: int, start: int = 1):
        self.k = k
        self.start = start
        self.counters: List[int] = []
        self.asc: List[int] = []

    @property
    def end(self) -> int:
        return self.start + len(self.counters) - 1

    @property
    def j(self) -> int:
        return self.end

    def counter(self, p: int) -> int:
        return self.counters[p - self.start]

    def bump(self, delta: int) -> List[int]:
        """Increment the ``delta`` smallest active positions."""
        asc, counters, k, start = self.asc, self.counters, self.k, self.start
        if delta > len(asc):
            raise FormatError(f"delta {delta} exceeds {len(asc)} active positions")
        bumped = asc[:delta]
        keep = []
        for p in bumped:
            counters[p - start] += 1
            if counters[p - start] < k:
                keep.append(p)
        asc[:delta] = keep
        return bumped

    def step(self, delta: int) -> List[int]:
        """Append the next position after incrementing ``delta`` actives below it."""
        bumped = self.bump(delta)
        below = sum(1 for p in bumped if self.counters[p - self.start] < self.k)
        self.counters.append(0)
        self.asc.insert(below, self.end)
        return bumped

    def structure(self) -> SkStructure:
        return SkStructure(self.end, self.k, tuple(self.counters))

    def top(self, i: int, k: int) -> TopKResult:
        out = []
        for p in reversed(self.asc):
            if p >= i:
                out.append(p)
                if len(out) == k:
                    break
        return tuple(out)


def value_sweep(vals: Sequence[int], k: int, record: bool = False):
    """Sweep distinct ``vals`` left to right, tracking ``S_k`` with the values.

    Returns ``(deltas, incs, counters, asc)`` with 1-based local positions;
    ``incs[p-1]`` lists the positions incremented when ``p`` is appended
    (empty unless ``record``).
    """
    if k < 1:
        raise ArgumentError("k must be positive")
    asc_vals: List[int] = []
    asc_pos: List[int] = []
    counters = [0] * len(vals)
    deltas: List[int] = []
    incs: List[List[int]] = []
    for p, x in enumerate(vals, 1):
        d = bisect_left(asc_vals, x)
        if p > 1:
            deltas.append(d)
        if record:
            incs.append(asc_pos[:d])
        kv, kp = [], []
        for t in range(d):
            q = asc_pos[t]
            counters[q - 1] += 1
            if counters[q - 1] < k:
                kv.append(asc_vals[t])
                kp.append(q)
        asc_vals[:d] = kv
        asc_pos[:d] = kp
        asc_vals.insert(len(kv), x)
        asc_pos.insert(len(kp), p)
    return deltas, incs, counters, asc_pos


def sweep(A: ArrayLike, k: int, record: bool = False):
    """Deltas of ``A`` and, with ``record``, the positions each element increments."""
    deltas, incs, _, _ = value_sweep(as_array(A).values, k, record)
    return (deltas, incs) if record else deltas


def encode_topk(A: ArrayLike, k: int) -> TopKEncoding:
    A = as_array(A)
    if A.n < 1:
        raise ArgumentError("cannot encode an empty array")
    deltas = sweep(A, k)
    return TopKEncoding(A.n, k, BitVector.from_unary([0] + deltas))


def _check_deltas(e: TopKEncoding) -> List[int]:
    deltas = e.deltas()
    state = Replay(e.k)
    state.step(0)
    for d in deltas:
        state.step(d)
    return deltas


def replay(e: TopKEncoding, j: int) -> SkStructure:
    if not 1 <= j <= e.n:
        raise RangeError(f"prefix length {j} outside [1, {e.n}]")
    deltas = e.deltas()
    state = Replay(e.k)
    state.step(0)
    for d in deltas[:j - 1]:
        state.step(d)
    return state.structure()


def query_many(e: TopKEncoding, ranges: Iterable) -> List[TopKResult]:
    """Answer many top-k queries with one left-to-right replay."""
    rs = [as_range(r, e.n) for r in ranges]
    order = sorted(range(len(rs)), key=lambda t: rs[t].j)
    deltas = e.deltas()
    state = Replay(e.k)
    state.step(0)
    out: List[Optional[TopKResult]] = [None] * len(rs)
    for t in order:
        r = rs[t]
        while state.j < r.j:
            state.step(deltas[state.j - 1])
        out[t] = state.top(r.i, e.k)
    return out


def query_topk(e: TopKEncoding, r) -> TopKResult:
    return query_many(e, [r])[0]


def select_many(e: TopKEncoding, queries: Iterable) -> List[int]:
    """Answer ``(range, k')`` selection queries with one shared replay."""
    qs = [(as_range(r, e.n), kp) for r, kp in queries]
    for r, kp in qs:
        if not 1 <= kp <= min(e.k, len(r)):
            raise ArgumentError(f"k'={kp} outside [1, {min(e.k, len(r))}]")
    tops = query_many(e, [r for r, _ in qs])
    return [t[kp - 1] for t, (_, kp) in zip(tops, qs)]


def query_select(e: TopKEncoding, r, kprime: int) -> int:
    return select_many(e, [(r, kprime)])[0]


def reconstruct_sk_from_queries(oracle: Callable[[int, int], Sequence[int]],
                                k: int, j: int) -> SkStructure:
    """Rebuild ``S_k(j)`` from answers to ``RTopK(A[l..j])`` for every ``l``."""
    counters = []
    for l in range(1, j + 1):
        ans = list(oracle(l, j))
        counters.append(ans.index(l) if l in ans else k)
    return SkStructure(j, k, tuple(counters))


def pad_array(A: ArrayLike, k: int) -> Tuple[int, ...]:
    """Append ``k`` values larger than everything in ``A``."""
    vals = as_array(A).values
    n = len(vals)
    return vals + tuple(range(n + 1, n + k + 1))


class UnsortedOracle:
    """Unsorted range top-k answers over a fixed array (sets, no order)."""

    def __init__(self, values: Sequence[int], k: int):
        self.values = tuple(values)
        self.k = k
        self._cache: Dict[int, List[frozenset]] = {}

    def _sweep_from(self, i: int) -> List[frozenset]:
        heap: List[Tuple[int, int]] = []
        answers = []
        for p in range(i, len(self.values) + 1):
            item = (self.values[p - 1], p)
            if len(heap) < self.k:
                heapq.heappush(heap, item)
            elif item > heap[0]:
                heapq.heapreplace(heap, item)
            answers.append(frozenset(q for _, q in heap))
        return answers

    def __call__(self, i: int, j: int) -> frozenset:
        if i not in self._cache:
            self._cache[i] = self._sweep_from(i)
        return self._cache[i][j - i]


def sorted_from_unsorted(unsorted_oracle: Callable[[int, int], Iterable[int]],
                         n: int, k: int, r) -> TopKResult:
    """Sorted top-k of ``[i, j]`` from unsorted answers on the padded array.

    As the right end grows from ``j`` to ``n + k`` each step adds one index
    and, once the answer is full, evicts the current minimum. Members of the
    original answer therefore leave in increasing value order, and all of them
    leave because the ``k`` padding values finally fill the answer.
    """
    r = as_range(r, n)
    base = frozenset(unsorted_oracle(r.i, r.j))
    prev = base
    evicted: List[int] = []
    for jj in range(r.j + 1, n + k + 1):
        cur = frozenset(unsorted_oracle(r.i, jj))
        gone = prev - cur
        if len(gone) > 1 or not cur - prev <= {jj}:
            raise CorruptionError(f"answers for [{r.i},{jj - 1}] and [{r.i},{jj}] differ by more than one swap")
        if gone:
            (p,) = gone
            if p in base:
                evicted.append(p)
        prev = cur
    if len(evicted) != len(base):
        raise CorruptionError("padding did not evict the whole original answer")
    return tuple(reversed(evicted))


def size_report(e: TopKEncoding) -> dict:
    n, k = e.n, e.k
    return {
        "n": n,
        "k": k,
        "payload_bits": len(e.bits),
        "zeros": e.bits.zeros,
        "ones": e.bits.ones,
        "entropy_bits": e.bits.entropy_bits(),
        "lg_binom_bits": log2_binomial((k + 1) * n, n),
        "bound_bits": (k + 1) * n * binary_entropy(1 / (k + 1)),
        "directory_bits": e.bits.directory_bits(),
    }

