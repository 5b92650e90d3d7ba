"""Combined range min-max encoding in at most 3n bits.

A left-to-right sweep keeps a min-stack and a max-stack. Every element is
pushed on both; with distinct values each step after the first pops from
exactly one stack. A step popping ``d >= 1`` elements writes ``0^(d-1) 1`` to
``T`` and one bit to ``U`` (0: min-stack popped, 1: max-stack popped). The
final flush writes ``0^(r_min-1) 1`` then ``0^(r_max-1) 1``; both residual
depths are at least one because element ``n`` is on both stacks. Hence
``|T| = 2n`` and ``|U| = n - 1``.

The single-stack emission (push -> 1, pop -> 0, forward order) is kept as
the reference trace that decoding must reproduce.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import List, Tuple

from .bitvec import BitVector
from .core import ArrayLike, FormatError, RangeError, as_array, as_range
from .rmq import SparseTable

MAGIC = b"RCMM"
VERSION = 1
_HEADER = struct.Struct("<4sBQ")


@dataclass(frozen=True)
class StackTrace:
    t_min: str
    t_max: str


@dataclass(frozen=True)
class MinMaxEncoding:
    n: int
    T: BitVector
    U: BitVector

    @property
    def size_bits(self) -> int:
        return len(self.T) + len(self.U)

    def to_bytes(self) -> bytes:
        return _HEADER.pack(MAGIC, VERSION, self.n) + self.T.to_bytes() + self.U.to_bytes()

    @classmethod
    def from_bytes(cls, buf: bytes) -> "MinMaxEncoding":
        if len(buf) < _HEADER.size:
            raise FormatError("truncated min-max header")
        magic, version, n = _HEADER.unpack_from(buf, 0)
        if magic != MAGIC:
            raise FormatError(f"bad min-max magic {magic!r}")
        if version != VERSION:
            raise FormatError(f"unsupported min-max version {version}")
        T, off = BitVector.read_from(buf, _HEADER.size)
        U, off = BitVector.read_from(buf, off)
        if off != len(buf):
            raise FormatError("trailing bytes after min-max encoding")
        enc = cls(n, T, U)
        decode_minmax(enc)  # validates structure
        return enc


def _pops(stack: list, vals, x, mode: str) -> int:
    d = 0
    if mode == "min":
        while stack and vals[stack[-1]] >= x:
            stack.pop()
            d += 1
    else:
        while stack and vals[stack[-1]] <= x:
            stack.pop()
            d += 1
    return d


def encode_single(A: ArrayLike, mode: str) -> str:
    """Forward single-stack trace: per element ``0^pops 1``, then ``0^residual``."""
    if mode not in ("min", "max"):
        raise ValueError("mode must be 'min' or 'max'")
    vals = as_array(A).values
    stack: List[int] = []
    out = []
    for p, x in enumerate(vals):
        out.append("0" * _pops(stack, vals, x, mode) + "1")
        stack.append(p)
    out.append("0" * len(stack))
    return "".join(out)


def encode_minmax(A: ArrayLike) -> MinMaxEncoding:
    vals = as_array(A).values
    n = len(vals)
    if n == 0:
        return MinMaxEncoding(0, BitVector(""), BitVector(""))
    smin, smax = [0], [0]
    T, U = [], []
    pops_total = 0
    for p in range(1, n):
        x = vals[p]
        dmin = _pops(smin, vals, x, "min")
        dmax = _pops(smax, vals, x, "max")
        assert (dmin > 0) != (dmax > 0), "exactly one stack pops per step"
        d = dmin or dmax
        T.append("0" * (d - 1) + "1")
        U.append("1" if dmax else "0")
        pops_total += d
        smin.append(p)
        smax.append(p)
    T.append("0" * (len(smin) - 1) + "1")
    T.append("0" * (len(smax) - 1) + "1")
    assert pops_total + len(smin) + len(smax) == 2 * n
    t = "".join(T)
    assert len(t) == 2 * n and t.count("1") == n + 1
    return MinMaxEncoding(n, BitVector(t), BitVector("".join(U)))


def _read_group(t: str, pos: int) -> Tuple[int, int]:
    end = t.find("1", pos)
    if end < 0:
        raise FormatError("unterminated unary group in T")
    return end - pos, end + 1


def _replay(e: MinMaxEncoding):
    """Yield ``(pops_min, pops_max)`` per element, then the flush depths."""
    n = e.n
    t, u = str(e.T), str(e.U)
    if n == 0:
        if t or u:
            raise FormatError("non-empty payload for n = 0")
        return [], (0, 0)
    if len(u) != n - 1:
        raise FormatError(f"|U| = {len(u)}, expected {n - 1}")
    depth_min = depth_max = 1
    steps = [(0, 0)]
    pos = 0
    for bit in u:
        g, pos = _read_group(t, pos)
        d = g + 1
        if bit == "0":
            if d > depth_min:
                raise FormatError("min-stack pop count exceeds stack depth")
            depth_min -= d
            steps.append((d, 0))
        else:
            if d > depth_max:
                raise FormatError("max-stack pop count exceeds stack depth")
            depth_max -= d
            steps.append((0, d))
        depth_min += 1
        depth_max += 1
    g1, pos = _read_group(t, pos)
    g2, pos = _read_group(t, pos)
    if pos != len(t):
        raise FormatError("trailing bits in T")
    if (g1 + 1, g2 + 1) != (depth_min, depth_max):
        raise FormatError("flush depths disagree with the replayed stacks")
    return steps, (depth_min, depth_max)


def decode_minmax(e: MinMaxEncoding) -> StackTrace:
    steps, (rmin, rmax) = _replay(e)
    if e.n == 0:
        return StackTrace("", "")
    tmin = "".join("0" * a + "1" for a, _ in steps) + "0" * rmin
    tmax = "".join("0" * b + "1" for _, b in steps) + "0" * rmax
    return StackTrace(tmin, tmax)


def dfuds_parents(trace: str) -> List[int]:
    """Read a forward trace as DFUDS and return the parent array of its tree.

    Reversing the forward trace gives ``n`` unary degree groups in preorder;
    the final leaf's group is implicit. Node 0 is the root (parent -1).
    Raises FormatError if the groups do not describe a tree on ``n + 1`` nodes.
    """
    s = trace[::-1]
    degrees = [len(g) for g in s.split("1")]
    if degrees[-1] != 0:
        raise FormatError("trace does not start with a push")
    degrees[-1] = 0
    parents = [-1] * len(degrees)
    open_slots: List[int] = []
    for v, d in enumerate(degrees):
        if v:
            if not open_slots:
                raise FormatError("DFUDS groups close the tree early")
            parents[v] = open_slots.pop()
        open_slots.extend([v] * d)
    if open_slots:
        raise FormatError("DFUDS groups leave unfilled child slots")
    return parents


def _cartesian_depths(pop_counts: List[int]) -> List[int]:
    """Depths in the Cartesian tree implied by per-element pop counts."""
    n = len(pop_counts)
    parent = [-1] * n
    stack: List[int] = []
    for p, d in enumerate(pop_counts):
        last = -1
        for _ in range(d):
            last = stack.pop()
        if last >= 0:
            parent[last] = p
        if stack:
            parent[p] = stack[-1]
        stack.append(p)
    children = [[] for _ in range(n)]
    roots = []
    for p, q in enumerate(parent):
        (children[q] if q >= 0 else roots).append(p)
    depth = [0] * n
    todo = list(roots)
    while todo:
        v = todo.pop()
        for c in children[v]:
            depth[c] = depth[v] + 1
            todo.append(c)
    return depth


class MinMaxIndex:
    """Answers range min-max queries from a decoded encoding.

    The argmin of ``A[i..j]`` is the shallowest node of the min-Cartesian tree
    in that range (their lowest common ancestor), and likewise for argmax; a
    sparse table over tree depths finds it.
    """

    def __init__(self, encoding: MinMaxEncoding):
        self.encoding = encoding
        self.n = encoding.n
        steps, _ = _replay(encoding)
        self._min = SparseTable(_cartesian_depths([a for a, _ in steps]), "min")
        self._max = SparseTable(_cartesian_depths([b for _, b in steps]), "min")

    def index_words(self) -> int:
        return self._min.words() + self._max.words()


def build_index(e: MinMaxEncoding) -> MinMaxIndex:
    return MinMaxIndex(e)


def r_min_max(idx: MinMaxIndex, r) -> Tuple[int, int]:
    """Return ``(argmax, argmin)`` over ``A[i..j]``, 1-based."""
    if idx.n == 0:
        raise RangeError("queries on an empty encoding")
    r = as_range(r, idx.n)
    lo, hi = r.i - 1, r.j - 1
    return idx._max.query(lo, hi) + 1, idx._min.query(lo, hi) + 1


def space_report(e: MinMaxEncoding) -> dict:
    return {
        "n": e.n,
        "T_bits": len(e.T),
        "U_bits": len(e.U),
        "payload_bits": e.size_bits,
        "bound_bits": 3 * e.n,
        "directory_bits": e.T.directory_bits() + e.U.directory_bits(),
    }
