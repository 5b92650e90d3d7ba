"""Block-decomposed range top-k data structure built on the top-k encoding.

The array is cut into *even-blocks* of ``B`` positions and then into a good
decomposition of smaller *blocks*. Each increment in the encoding is stored
either in ``E_INT`` (it lands inside the incrementing position's even-block)
or in ``E_WIN`` (it lands elsewhere; for a non-singleton block that is always
its single window even-block). A query is split into a left part (suffix of
a block), whole middle blocks, and a right part (prefix of a block).

* Left and in-block parts replay ``E_INT`` over one even-block.
* The middle part comes from the macro array ``A'`` (top-k of every block)
  with a sparse-table range maximum, extracted best-first.
* Left and middle merge through per-element left pointers (the nearest
  ``k`` larger elements to the left).
* The right part rebuilds its window fragment from the window even-block's
  replay plus ``diff``, then replays ``E_INT`` and ``E_WIN`` up to ``j``.
  Each right-part element ``y`` then compares with a candidate ``x`` by
  whether ``y`` incremented ``x``; candidates outside the two tracked
  even-blocks are larger than every right-part element, and candidates
  that turn inactive are dropped since ``k`` larger elements follow them.

The stored state never includes ``A``; queries read only the bitvectors,
the block table, the diffs and the macro arrays.
"""

from __future__ import annotations

import heapq
import math
import struct
from bisect import bisect_left, insort
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .bitvec import BitVector, binary_entropy
from .core import (ArgumentError, ArrayLike, CorruptionError, FormatError,
                   RangeError, TopKResult, as_array, as_range)
from .rmq import SparseTable
from .topk_enc import Replay, value_sweep

MAGIC = b"RCDS"
VERSION = 1
AUDIT_CONSTANT = 16
_HEADER = struct.Struct("<4sBQQQ")


@dataclass(frozen=True)
class Block:
    start: int
    end: int
    even_block: int
    window: Optional[int] = None

    @property
    def singleton(self) -> bool:
        return self.start == self.end

    def __len__(self):
        return self.end - self.start + 1


@dataclass(frozen=True)
class GoodDecomposition:
    n: int
    k: int
    B: int
    blocks: Tuple[Block, ...]

    @property
    def h(self) -> int:
        return len(self.blocks)

    def size_bound(self, constant: int = AUDIT_CONSTANT) -> float:
        n, k, B = self.n, self.k, self.B
        return constant * (k * k * n / B + k * n / B + n / B + 1)


@dataclass
class DecompositionReport:
    h: int
    size_bound: float
    d1: bool
    d2: bool
    d3: bool
    partition: bool
    failures: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.d1 and self.d2 and self.d3 and self.partition


def default_block_size(n: int, k: int) -> int:
    lg = max(1, math.ceil(math.log2(n))) if n > 1 else 1
    B = k ** 3 * lg * math.ceil(math.sqrt(lg))
    return max(1, min(n, max(k * k, 2, B)))


def _even(p: int, B: int) -> int:
    return (p - 1) // B


def _changes(A: ArrayLike, k: int) -> List[List[int]]:
    """``changes[p-1]``: positions incremented when ``p`` arrives (C(p) minus p)."""
    _, incs, _, _ = value_sweep(as_array(A).values, k, record=True)
    return incs


def _decompose_from_changes(n: int, k: int, B: int, incs: List[List[int]]) -> GoodDecomposition:
    weight = [len(c) + 1 for c in incs]

    # Initial decomposition: fat singletons, greedy merging of the rest,
    # then cuts at even-block boundaries.
    initial: List[Tuple[int, int]] = []
    cur, cur_w = None, 0
    for p in range(1, n + 1):
        w = weight[p - 1]
        if w > B:
            if cur is not None:
                initial.append((cur, p - 1))
                cur = None
            initial.append((p, p))
            continue
        if cur is not None and cur_w + w <= B:
            cur_w += w
        else:
            if cur is not None:
                initial.append((cur, p - 1))
            cur, cur_w = p, w
    if cur is not None:
        initial.append((cur, n))
    cut: List[Tuple[int, int]] = []
    for s, e in initial:
        while _even(s, B) != _even(e, B):
            boundary = (_even(s, B) + 1) * B
            cut.append((s, boundary))
            s = boundary + 1
        cut.append((s, e))

    # Refinement: split wherever the out-of-even-block changes would touch
    # a second even-block, isolating the offending position.
    blocks: List[Block] = []

    def emit(s, e, touched):
        t = _even(s, B)
        if s == e:
            blocks.append(Block(s, e, t))
        else:
            blocks.append(Block(s, e, t, next(iter(touched)) if touched else None))

    for s, e in cut:
        t = _even(s, B)
        if s == e:
            emit(s, e, ())
            continue
        cur, touched = s, set()
        for x in range(s, e + 1):
            outside = {_even(q, B) for q in incs[x - 1]}
            outside.discard(t)
            merged = touched | outside
            if len(merged) <= 1:
                touched = merged
                continue
            if cur < x:
                emit(cur, x - 1, touched)
            emit(x, x, ())
            cur, touched = x + 1, set()
        if cur <= e:
            emit(cur, e, touched)
    return GoodDecomposition(n, k, B, tuple(blocks))


def decompose(A: ArrayLike, k: int, B: int) -> GoodDecomposition:
    A = as_array(A)
    if k < 1:
        raise ArgumentError("k must be positive")
    if B < 1:
        raise ArgumentError("B must be at least 1")
    return _decompose_from_changes(A.n, k, B, _changes(A, k))


def check_decomposition(d: GoodDecomposition, A: ArrayLike,
                        constant: int = AUDIT_CONSTANT) -> DecompositionReport:
    """Validate the partition property and D1-D3 against a direct simulation."""
    A = as_array(A)
    incs = _changes(A, d.k)
    B = d.B
    failures = []
    expect = 1
    partition = True
    for blk in d.blocks:
        if blk.start != expect or blk.end < blk.start or len(blk) > B \
                or _even(blk.start, B) != _even(blk.end, B) or blk.even_block != _even(blk.start, B):
            partition = False
            failures.append(f"bad block {blk}")
        expect = blk.end + 1
    if expect != A.n + 1:
        partition = False
        failures.append("blocks do not cover [1, n]")
    d2 = d3 = True
    for blk in d.blocks:
        if blk.singleton:
            continue
        w = sum(len(incs[p - 1]) + 1 for p in range(blk.start, blk.end + 1))
        if w > B:
            d2 = False
            failures.append(f"D2: block {blk} has weight {w} > {B}")
        outside = {_even(q, B) for p in range(blk.start, blk.end + 1) for q in incs[p - 1]}
        outside.discard(blk.even_block)
        if outside and (outside != {blk.window} or blk.window >= blk.even_block):
            d3 = False
            failures.append(f"D3: block {blk} touches even-blocks {sorted(outside)}")
    bound = d.size_bound(constant)
    d1 = d.h <= bound
    if not d1:
        failures.append(f"D1: h = {d.h} > {bound:.1f}")
    return DecompositionReport(d.h, bound, d1, d2, d3, partition, failures)


@dataclass
class MacroStructure:
    positions: List[int]          # A' entries, block order then position order
    ranks: List[int]              # rank-normalized values of those entries
    offsets: List[int]            # offsets[b] = first A' index of block b
    left_pointers: Dict[int, Tuple[int, ...]]
    rmq: SparseTable = field(repr=False, default=None)

    def __post_init__(self):
        if self.rmq is None and self.ranks:
            self.rmq = SparseTable(self.ranks, "max")

    def top(self, b_lo: int, b_hi: int, k: int) -> List[int]:
        """Positions of the ``k`` largest elements in blocks ``b_lo..b_hi``."""
        lo, hi = self.offsets[b_lo], self.offsets[b_hi + 1] - 1
        if lo > hi:
            return []
        out = []
        heap = []

        def push(a, b):
            if a <= b:
                m = self.rmq.query(a, b)
                heapq.heappush(heap, (-self.ranks[m], m, a, b))

        push(lo, hi)
        while heap and len(out) < k:
            _, m, a, b = heapq.heappop(heap)
            out.append(self.positions[m])
            push(a, m - 1)
            push(m + 1, b)
        return out


class TopKStructure:
    """Range top-k data structure answering ``query`` in about ``O(k + B^2)``."""

    def __init__(self, n, k, B, blocks, block_index, e_int, e_win, diffs, macro):
        self.n = n
        self.k = k
        self.B = B
        self.blocks: Tuple[Block, ...] = tuple(blocks)
        self.block_index: BitVector = block_index
        self.e_int: BitVector = e_int
        self.e_win: BitVector = e_win
        self.diffs: Dict[int, Tuple[int, ...]] = diffs
        self.macro: MacroStructure = macro

    @property
    def decomposition(self) -> GoodDecomposition:
        return GoodDecomposition(self.n, self.k, self.B, self.blocks)

    # --- navigation -------------------------------------------------------

    def block_of(self, p: int) -> int:
        """0-based ordinal of the block holding position ``p``."""
        return self.block_index.rank1(p) - 1

    def _groups(self, bv: BitVector, lo: int, hi: int) -> List[int]:
        """Zero-group lengths for positions ``lo..hi`` (one group per position)."""
        if lo > hi:
            return []
        a = bv.select1(lo - 1) + 1 if lo > 1 else 1
        b = bv.select1(hi)
        return [len(g) for g in bv.slice(a, b).split("1")[:-1]]

    def alphas(self, lo: int, hi: int) -> List[int]:
        return self._groups(self.e_int, lo, hi)

    def betas(self, lo: int, hi: int) -> List[int]:
        return self._groups(self.e_win, lo, hi)

    def _even_range(self, t: int) -> Tuple[int, int]:
        return t * self.B + 1, min((t + 1) * self.B, self.n)

    def _internal_replay(self, t: int, end: int, record_from: Optional[int] = None):
        """Replay internal increments of even-block ``t`` up to position ``end``."""
        s, _ = self._even_range(t)
        state = Replay(self.k, start=s)
        bumps = {}
        for p, a in zip(range(s, end + 1), self.alphas(s, end)):
            bumped = state.step(a)
            if record_from is not None and p >= record_from:
                bumps[p] = set(bumped)
        return state, bumps

    def _window_state(self, b: int) -> Replay:
        blk = self.blocks[b]
        if blk.singleton or blk.window is None:
            raise ArgumentError(f"block {b} has no window")
        _, e_w = self._even_range(blk.window)
        state, _ = self._internal_replay(blk.window, e_w)
        desc = state.asc[::-1]
        ys = self.diffs.get(b, ())
        k = self.k
        for q, e in enumerate(desc):
            extra = sum(1 for y in ys if y <= q)
            if extra:
                state.counters[e - state.start] = min(k, state.counter(e) + extra)
        state.asc = [e for e in state.asc if state.counter(e) < k]
        return state

    # --- query pieces -----------------------------------------------------

    def reconstruct_sk_suffix(self, t: int, offset: int, length: int) -> Tuple[int, ...]:
        """Last ``length`` counters of ``S_k(tB + offset + 1)``.

        ``offset`` is the 0-based position of the prefix end inside even-block
        ``t``; only ``E_INT`` is read.
        """
        s, e = self._even_range(t) if 0 <= t * self.B < self.n else (0, -1)
        end = s + offset
        if not (s <= end <= e):
            raise RangeError(f"offset {offset} outside even-block {t}")
        if not 1 <= length <= end - s + 1:
            raise RangeError(f"suffix length {length} outside [1, {end - s + 1}]")
        state, _ = self._internal_replay(t, end)
        return tuple(state.counters[-length:])

    def in_block_topk(self, x1: int, x2: int) -> List[int]:
        """Active positions of ``S_k(x2)`` inside ``[x1, x2]``, largest first.

        Its first ``min(k, x2-x1+1)`` entries are the top-k of ``A[x1..x2]``.
        """
        if not 1 <= x1 <= x2 <= self.n:
            raise RangeError(f"invalid range [{x1}, {x2}]")
        if self.block_of(x1) != self.block_of(x2):
            raise ArgumentError(f"[{x1}, {x2}] spans more than one block")
        state, _ = self._internal_replay(_even(x1, self.B), x2)
        return [p for p in reversed(state.asc) if p >= x1]

    def window_fragment(self, b: int) -> Tuple[int, ...]:
        """Counters of ``S_k(g(b) - 1)`` over block ``b``'s window even-block."""
        return tuple(self._window_state(b).counters)

    def _merge_left_middle(self, L1: List[int], L2: List[int], i: int, left_end: int) -> List[int]:
        if not L1 or not L2:
            return L1 or L2
        k = self.k
        placed = {}
        for rank, x in enumerate(L2, 1):
            ptrs = [q for q in self.macro.left_pointers[x] if q >= i]
            if len(ptrs) >= k:
                continue
            r = rank + sum(1 for q in ptrs if q <= left_end)
            if r <= k:
                placed[r] = x
        out = []
        rest = iter(L1)
        for r in range(1, min(k, len(L1) + len(L2)) + 1):
            if r in placed:
                out.append(placed[r])
            else:
                try:
                    out.append(next(rest))
                except StopIteration:
                    raise CorruptionError("left/middle merge ran out of candidates") from None
        return out

    def _merge_right(self, Lp: List[int], b: int, j: int) -> List[int]:
        blk = self.blocks[b]
        g, t, w = blk.start, blk.even_block, blk.window
        k, B = self.k, self.B
        internal, int_bumps = self._internal_replay(t, j, record_from=g)
        L3 = [p for p in reversed(internal.asc) if p >= g][:k]
        win_bumps: Dict[int, set] = {}
        window = None
        betas = self.betas(g, j)
        if w is not None:
            window = self._window_state(b)
            for y, bcount in zip(range(g, j + 1), betas):
                win_bumps[y] = set(window.bump(bcount))
        elif any(betas):
            raise CorruptionError(f"block {b} has window increments but no window")

        tracked = {}
        cands = []
        for x in Lp:
            ex = _even(x, B)
            if ex == t:
                if internal.counter(x) >= k:
                    continue
                tracked[x] = int_bumps
            elif ex == w:
                if window.counter(x) >= k:
                    continue
                tracked[x] = win_bumps
            cands.append(x)

        def larger(x, y):
            bumps = tracked.get(x)
            return bumps is None or x not in bumps[y]

        out = []
        a = c = 0
        while len(out) < k and (a < len(cands) or c < len(L3)):
            if c == len(L3) or (a < len(cands) and larger(cands[a], L3[c])):
                out.append(cands[a])
                a += 1
            else:
                out.append(L3[c])
                c += 1
        return out

    def query(self, r) -> TopKResult:
        r = as_range(r, self.n)
        i, j, k = r.i, r.j, self.k
        bi, bj = self.block_of(i), self.block_of(j)
        if bi == bj:
            return tuple(self.in_block_topk(i, j)[:k])
        left_blk, right_blk = self.blocks[bi], self.blocks[bj]
        has_left = i > left_blk.start
        has_right = j < right_blk.end
        mid_lo = bi + 1 if has_left else bi
        mid_hi = bj - 1 if has_right else bj
        L1 = self.in_block_topk(i, left_blk.end)[:k] if has_left else []
        L2 = self.macro.top(mid_lo, mid_hi, k) if mid_lo <= mid_hi else []
        left_end = left_blk.end if has_left else i - 1
        Lp = self._merge_left_middle(L1, L2, i, left_end)
        if has_right:
            Lp = self._merge_right(Lp, bj, j)
        return tuple(Lp[:k])

    def select(self, r, kprime: int) -> int:
        r = as_range(r, self.n)
        if not 1 <= kprime <= min(self.k, len(r)):
            raise ArgumentError(f"k'={kprime} outside [1, {min(self.k, len(r))}]")
        return self.query(r)[kprime - 1]

    # --- serialization ----------------------------------------------------

    def to_bytes(self) -> bytes:
        h = len(self.blocks)
        out = [_HEADER.pack(MAGIC, VERSION, self.n, self.k, self.B)]
        out.append(_pack([h] + [-1 if blk.window is None else blk.window for blk in self.blocks]))
        out += [self.block_index.to_bytes(), self.e_int.to_bytes(), self.e_win.to_bytes()]
        diff_rows = [len(self.diffs)]
        for b in sorted(self.diffs):
            ys = self.diffs[b]
            diff_rows += [b, len(ys), *ys]
        out.append(_pack(diff_rows))
        m = self.macro
        rows = [len(m.positions), *m.positions, *m.ranks, *m.offsets]
        for p in m.positions:
            rows += [len(m.left_pointers[p]), *m.left_pointers[p]]
        out.append(_pack(rows))
        return b"".join(out)

    @classmethod
    def from_bytes(cls, buf: bytes) -> "TopKStructure":
        if len(buf) < _HEADER.size:
            raise FormatError("truncated structure header")
        magic, version, n, k, B = _HEADER.unpack_from(buf, 0)
        if magic != MAGIC:
            raise FormatError(f"bad structure magic {magic!r}")
        if version != VERSION:
            raise FormatError(f"unsupported structure version {version}")
        rd = _Reader(buf, _HEADER.size)
        h = rd.int()
        windows = rd.ints(h)
        block_index, rd.off = BitVector.read_from(buf, rd.off)
        e_int, rd.off = BitVector.read_from(buf, rd.off)
        e_win, rd.off = BitVector.read_from(buf, rd.off)
        diffs = {}
        for _ in range(rd.int()):
            b, cnt = rd.int(), rd.int()
            diffs[b] = tuple(rd.ints(cnt))
        m = rd.int()
        positions, ranks = rd.ints(m), rd.ints(m)
        offsets = rd.ints(h + 1)
        left = {p: tuple(rd.ints(rd.int())) for p in positions}
        if rd.off != len(buf):
            raise FormatError("trailing bytes after structure")
        if len(block_index) != n or block_index.ones != h:
            raise FormatError("block index disagrees with the block table")
        starts = [block_index.select1(q) for q in range(1, h + 1)]
        blocks = []
        for q, s in enumerate(starts):
            e = starts[q + 1] - 1 if q + 1 < h else n
            blocks.append(Block(s, e, _even(s, B), None if windows[q] < 0 else windows[q]))
        macro = MacroStructure(positions, ranks, offsets, left)
        return cls(n, k, B, blocks, block_index, e_int, e_win, diffs, macro)


def _pack(values: Sequence[int]) -> bytes:
    return struct.pack(f"<{len(values)}q", *values)


class _Reader:
    def __init__(self, buf: bytes, off: int):
        self.buf, self.off = buf, off

    def ints(self, count: int) -> List[int]:
        size = 8 * count
        if count < 0 or self.off + size > len(self.buf):
            raise FormatError("truncated structure payload")
        vals = list(struct.unpack_from(f"<{count}q", self.buf, self.off))
        self.off += size
        return vals

    def int(self) -> int:
        return self.ints(1)[0]


def build(A: ArrayLike, k: int, B: Optional[int] = None) -> TopKStructure:
    A = as_array(A)
    n = A.n
    if n < 1:
        raise ArgumentError("cannot build over an empty array")
    if B is None:
        B = default_block_size(n, k)
    vals = A.values
    decomp = decompose(A, k, B)
    incs = _changes(A, k)

    starts = [0] * n
    for blk in decomp.blocks:
        starts[blk.start - 1] = 1
    block_index = BitVector(starts)

    alphas, betas = [], []
    for p in range(1, n + 1):
        t = _even(p, B)
        inside = sum(1 for q in incs[p - 1] if _even(q, B) == t)
        alphas.append(inside)
        betas.append(len(incs[p - 1]) - inside)
    for blk in decomp.blocks:
        if blk.singleton:
            continue
        for p in range(blk.start, blk.end + 1):
            for q in incs[p - 1]:
                eq = _even(q, B)
                assert eq == blk.even_block or eq == blk.window, "window increment outside window"
    e_int = BitVector.from_unary(alphas)
    e_win = BitVector.from_unary(betas)

    diffs = _build_diffs(vals, k, B, decomp.blocks, incs)
    macro = _build_macro(vals, k, decomp.blocks)
    return TopKStructure(n, k, B, decomp.blocks, block_index, e_int, e_win, diffs, macro)


def _build_diffs(vals, k, B, blocks, incs) -> Dict[int, Tuple[int, ...]]:
    """For each windowed block: where the ``k`` largest later incrementers of
    its window fall in the window's active order at the window's end."""
    hitters: Dict[int, List[int]] = {}
    for p in range(1, len(vals) + 1):
        t = _even(p, B)
        for w in sorted({_even(q, B) for q in incs[p - 1]} - {t}):
            hitters.setdefault(w, []).append(p)
    order_cache: Dict[int, List[int]] = {}
    diffs = {}
    for b, blk in enumerate(blocks):
        w = blk.window
        if blk.singleton or w is None:
            continue
        if w not in order_cache:
            s_w = w * B + 1
            _, _, counters, asc = value_sweep(vals[s_w - 1:(w + 1) * B], k)
            # active positions of the window, largest value first
            order_cache[w] = [vals[s_w + p - 2] for p in reversed(asc)]
        desc_vals = order_cache[w]
        xs = hitters.get(w, [])
        xs = xs[:bisect_left(xs, blk.start)]
        top = heapq.nlargest(k, (vals[x - 1] for x in xs))
        ascending = desc_vals[::-1]
        ys = sorted(len(desc_vals) - bisect_left(ascending, v) for v in top)
        diffs[b] = tuple(ys)
    return diffs


def _build_macro(vals, k, blocks) -> MacroStructure:
    positions, offsets = [], []
    for blk in blocks:
        offsets.append(len(positions))
        span = range(blk.start, blk.end + 1)
        best = sorted(heapq.nlargest(k, span, key=lambda p: vals[p - 1]))
        positions.extend(best)
    offsets.append(len(positions))
    by_value = sorted(range(len(positions)), key=lambda a: vals[positions[a] - 1])
    ranks = [0] * len(positions)
    for r, a in enumerate(by_value, 1):
        ranks[a] = r

    wanted = set(positions)
    left_pointers = {}
    seen: List[int] = []
    for p in sorted(range(1, len(vals) + 1), key=lambda q: -vals[q - 1]):
        if p in wanted:
            at = bisect_left(seen, p)
            left_pointers[p] = tuple(reversed(seen[max(0, at - k):at]))
        insort(seen, p)
    return MacroStructure(positions, ranks, offsets, left_pointers)


def space_report(ds: TopKStructure) -> dict:
    n, k, B = ds.n, ds.k, ds.B
    lg_b = math.ceil(math.log2(B + 1))
    lg_n = max(1, math.ceil(math.log2(n + 1)))
    m = len(ds.macro.positions)
    lg_m = max(1, math.ceil(math.log2(m + 1)))
    diff_entries = sum(len(ys) for ys in ds.diffs.values())
    pointer_entries = sum(len(v) for v in ds.macro.left_pointers.values())
    return {
        "n": n, "k": k, "B": B, "h": len(ds.blocks),
        "e_int_bits": len(ds.e_int), "e_int_zeros": ds.e_int.zeros, "e_int_ones": ds.e_int.ones,
        "e_win_bits": len(ds.e_win), "e_win_zeros": ds.e_win.zeros, "e_win_ones": ds.e_win.ones,
        "encoding_entropy_bits": ds.e_int.entropy_bits() + ds.e_win.entropy_bits(),
        "block_index_bits": len(ds.block_index),
        "block_index_entropy_bits": ds.block_index.entropy_bits(),
        "diff_bits": diff_entries * lg_b,
        "macro_bits": m * (lg_m + lg_n) + pointer_entries * lg_n,
        "directory_bits": sum(bv.directory_bits() for bv in (ds.e_int, ds.e_win, ds.block_index)),
        "bound_encoding_bits": (k + 2) * n * binary_entropy(2 / (k + 2)),
        "bound_block_index_bits": n * binary_entropy(min(1.0, k * k / B)),
    }
