"""Exhaustive checks behind the lower bounds.

Covers Baxter permutations and their recovery from min-max answers, valid
delta-tuples of the top-k encoding, restricted lattice walks with the cycle
lemma, ordered partitions with bounded parts, and the entropy formulas.
All enumerations take an explicit budget and raise BudgetExceeded past it.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass
from functools import cmp_to_key
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Set, Tuple

from .bitvec import binary_entropy
from .core import ArgumentError, BudgetExceeded, RecoveryFailed, naive_min_max, naive_top_k
from .topk_enc import sweep

MAX_PERM_N = 10
ROTATION_BUDGET = 200_000


@dataclass(frozen=True)
class Permutation:
    values: Tuple[int, ...]

    def __post_init__(self):
        vals = tuple(self.values)
        if sorted(vals) != list(range(1, len(vals) + 1)):
            raise ArgumentError("not a permutation of 1..n")
        object.__setattr__(self, "values", vals)

    @property
    def n(self) -> int:
        return len(self.values)

    def __call__(self, i: int) -> int:
        return self.values[i - 1]


@dataclass(frozen=True)
class WalkSpec:
    Y: frozenset
    length: int

    def __post_init__(self):
        object.__setattr__(self, "Y", frozenset(self.Y))
        if not self.Y:
            raise ArgumentError("step set Y must be non-empty")
        if self.length < 0:
            raise ArgumentError("walk length must be non-negative")


def _check_budget(n: int, max_n: int):
    if n > max_n:
        raise BudgetExceeded(f"n = {n} exceeds the enumeration budget {max_n}")


def _values(p) -> Tuple[int, ...]:
    return p.values if isinstance(p, Permutation) else tuple(p)


# --- Baxter permutations ---------------------------------------------------

def is_baxter(p) -> bool:
    """No 2-41-3 or 3-14-2 occurrence whose middle pair is adjacent."""
    v = _values(p)
    n = len(v)
    for j in range(1, n - 2):
        a, b = v[j], v[j + 1]
        lo, hi = min(a, b), max(a, b)
        left = [x for x in v[:j] if lo < x < hi]
        right = [x for x in v[j + 2:] if lo < x < hi]
        if not left or not right:
            continue
        if a > b and min(left) < max(right):      # 2-41-3
            return False
        if a < b and max(left) > min(right):      # 3-14-2
            return False
    return True


def count_baxter(n: int, max_n: int = MAX_PERM_N) -> int:
    _check_budget(n, max_n)
    return sum(1 for p in itertools.permutations(range(1, n + 1)) if is_baxter(p))


def recover_from_minmax(oracle: Callable[[int, int], Tuple[int, int]], n: int) -> Permutation:
    """Rebuild a Baxter permutation from a range (argmax, argmin) oracle.

    ``A[a]`` and ``A[b]`` are compared by induction on ``b - a``: if the
    extremes of ``A[a..b]`` sit at an end the answer is immediate; otherwise
    every ``c`` between the two extremes is compared against both ends, and
    an adjacent pair where ``c`` switches from below both to above both (or
    back) decides the order, since the other outcome would be a forbidden
    pattern.
    """
    if n < 1:
        raise ArgumentError("n must be positive")
    memo: Dict[Tuple[int, int], bool] = {}

    def less(a: int, b: int) -> bool:
        # is A[a] < A[b], for a < b
        key = (a, b)
        if key in memo:
            return memo[key]
        ymax, xmin = oracle(a, b)
        if xmin == a or ymax == b:
            res = True
        elif xmin == b or ymax == a:
            res = False
        else:
            res = None
            lo, hi = min(xmin, ymax), max(xmin, ymax)
            f = []
            for c in range(lo, hi + 1):
                ac, cb = less(a, c), less(c, b)
                if ac == cb:
                    res = ac
                    break
                f.append(0 if not ac else 1)  # 0: A[c] below both ends
            if res is None:
                up = xmin < ymax
                want = (0, 1) if up else (1, 0)
                if not any((f[t], f[t + 1]) == want for t in range(len(f) - 1)):
                    raise RecoveryFailed(f"no switching pair between {lo} and {hi}")
                res = up
        memo[key] = res
        return res

    def cmp(a, b):
        if a == b:
            return 0
        if a < b:
            return -1 if less(a, b) else 1
        return 1 if less(b, a) else -1

    order = sorted(range(1, n + 1), key=cmp_to_key(cmp))
    vals = [0] * n
    for rank, p in enumerate(order, 1):
        vals[p - 1] = rank
    for a in range(1, n + 1):
        for b in range(a, n + 1):
            if naive_min_max(vals, (a, b)) != tuple(oracle(a, b)):
                raise RecoveryFailed(f"recovered permutation disagrees on [{a}, {b}]")
    return Permutation(tuple(vals))


# --- valid delta-tuples ----------------------------------------------------

def enumerate_valid_tuples(n: int, k: int, max_n: int = 8) -> Set[Tuple[int, ...]]:
    """Distinct delta-tuples over all permutations of ``[n]``."""
    if k < 1:
        raise ArgumentError("k must be positive")
    _check_budget(n, max_n)
    if n == 0:
        return set()
    return {tuple(sweep(p, k)) for p in itertools.permutations(range(1, n + 1))}


def check_tuple_extension(n: int, k: int, max_n: int = 8) -> bool:
    """Every valid tuple from length-``n`` arrays extends by any small enough delta."""
    shorter = enumerate_valid_tuples(n, k, max_n) if n > 1 else {()}
    longer = enumerate_valid_tuples(n + 1, k, max_n)
    for t in shorter:
        M = sum(k - d for d in t)
        for d in range(-(-M // k) + 1):
            if t + (d,) not in longer:
                return False
    return True


def count_answer_classes(n: int, k: int, max_n: int = 8) -> int:
    """Permutations of ``[n]`` grouped by their answers to every top-k query."""
    _check_budget(n, max_n)
    ranges = [(i, j) for i in range(1, n + 1) for j in range(i, n + 1)]
    return len({tuple(naive_top_k(p, r, k) for r in ranges)
                for p in itertools.permutations(range(1, n + 1))})


# --- walks -----------------------------------------------------------------

def _walk_dp(spec: WalkSpec, nonneg: bool) -> Dict[int, int]:
    heights = {0: 1}
    for _ in range(spec.length):
        nxt: Dict[int, int] = {}
        for h, c in heights.items():
            for a in spec.Y:
                g = h + a
                if nonneg and g < 0:
                    continue
                nxt[g] = nxt.get(g, 0) + c
        heights = nxt
    return heights


def count_nonneg_walks(spec: WalkSpec) -> int:
    return sum(_walk_dp(spec, True).values())


def count_returning_walks(spec: WalkSpec) -> int:
    return _walk_dp(spec, False).get(0, 0)


def count_nonneg_returning_walks(spec: WalkSpec) -> int:
    return _walk_dp(spec, True).get(0, 0)


def _returning_walks(spec: WalkSpec):
    steps = sorted(spec.Y)
    lo, hi = steps[0], steps[-1]

    def rec(prefix, h, left):
        if left == 0:
            if h == 0:
                yield tuple(prefix)
            return
        for a in steps:
            g = h + a
            if lo * (left - 1) <= -g <= hi * (left - 1):
                prefix.append(a)
                yield from rec(prefix, g, left - 1)
                prefix.pop()

    yield from rec([], 0, spec.length)


def _has_nonneg_rotation(w: Sequence[int]) -> bool:
    for s in range(len(w)):
        h = 0
        for a in itertools.chain(w[s:], w[:s]):
            h += a
            if h < 0:
                break
        else:
            return True
    return len(w) == 0


def check_cycle_lemma(spec: WalkSpec, rotation_budget: int = ROTATION_BUDGET) -> bool:
    """Counting form of the cycle lemma, plus the rotation argument when affordable.

    The rotation check enumerates the returning walks explicitly and runs
    only when there are at most ``rotation_budget`` of them.
    """
    L = spec.length
    returning = count_returning_walks(spec)
    w1 = count_nonneg_returning_walks(spec)
    if L and (w1 * L < returning or count_nonneg_walks(spec) * L < returning):
        return False
    if returning <= rotation_budget:
        return all(_has_nonneg_rotation(w) for w in _returning_walks(spec))
    return True


def restricted_walk_bound(n: int, k: int, delta: int) -> int:
    """Nonnegative ``[k-delta, k]``-walks of length ``n-1-delta``."""
    if delta < 1 or n - 1 - delta < 0:
        raise ArgumentError(f"delta = {delta} infeasible for n = {n}")
    return count_nonneg_walks(WalkSpec(frozenset(range(k - delta, k + 1)), n - 1 - delta))


# --- ordered partitions ----------------------------------------------------

def count_ordered_partitions(N: int, g: int, Bmax: int) -> int:
    """Ordered ways to write ``N`` as ``g`` parts from ``[0, Bmax]``."""
    if N < 0 or g < 0 or Bmax < 0:
        return 0
    ways = [1] + [0] * N
    for _ in range(g):
        prefix = [0]
        for c in ways:
            prefix.append(prefix[-1] + c)
        ways = [prefix[s + 1] - prefix[max(0, s - Bmax)] for s in range(N + 1)]
    return ways[N]


def _binom(a: int, b: int) -> int:
    if a < 0 or b < 0 or b > a:
        return 0
    return math.comb(a, b)


def partition_lower_bound(N: int, g: int, Bmax: int) -> int:
    """``C(N - 2g' + g - 1, g - g' - 1)`` with ``g' = N // Bmax``; 0 when degenerate."""
    if N < 0 or g < 1 or Bmax < 1:
        return 0
    gp = N // Bmax
    return _binom(N - 2 * gp + g - 1, g - gp - 1)


# --- entropy ---------------------------------------------------------------

def entropy(x: float) -> float:
    if not 0 <= x <= 1:
        raise ArgumentError(f"entropy argument {x} outside [0, 1]")
    return binary_entropy(x)


def ub_topk_bits(n: int, k: int) -> float:
    if n < 0 or k < 1:
        raise ArgumentError("need n >= 0 and k >= 1")
    return (k + 1) * n * entropy(1 / (k + 1))


def lb_topk_bits(n: int, k: int, delta: int) -> float:
    if delta < 1 or k < 1 or n < 0:
        raise ArgumentError("need delta >= 1, k >= 1, n >= 0")
    n_eff = n * (1 - k / delta) + k / delta + k - 2 - delta
    return (k + 1) * n_eff * entropy(1 / (k + 1))


# --- tables ----------------------------------------------------------------

TABLE_COLUMNS = ("table", "params", "exact", "bound", "ratio")


def _row(table: str, params: str, exact: int, bound: float) -> dict:
    ratio = exact / bound if bound else float("inf") if exact else 1.0
    return {"table": table, "params": params, "exact": exact, "bound": bound,
            "ratio": f"{ratio:.6g}"}


def count_tables(max_n: int = 6, max_k: int = 2, max_len: int = 8, max_N: int = 20) -> List[dict]:
    """Exact counts next to the bounds they are compared with."""
    rows = []
    for n in range(1, min(max_n, 8) + 1):
        rows.append(_row("baxter", f"n={n}", count_baxter(n), 2 ** (3 * n)))
    for k in range(1, max_k + 1):
        for n in range(1, min(max_n, 8) + 1):
            valid = len(enumerate_valid_tuples(n, k))
            rows.append(_row("valid_tuples_ub", f"n={n};k={k}", valid, _binom((k + 1) * n, n)))
            for d in range(1, n):
                rows.append(_row("valid_tuples_walks", f"n={n};k={k};delta={d}", valid,
                                 restricted_walk_bound(n, k, d)))
    for lo in range(-3, 1):
        for hi in range(max(lo, 0), 4):
            for L in range(1, max_len + 1):
                spec = WalkSpec(frozenset(range(lo, hi + 1)), L)
                rows.append(_row("cycle_lemma", f"Y=[{lo},{hi}];len={L}",
                                 count_nonneg_walks(spec), count_returning_walks(spec) / L))
    for N in range(0, max_N + 1, 2):
        for g in range(1, 6):
            for Bm in range(1, 5):
                rows.append(_row("partitions", f"N={N};g={g};B={Bm}",
                                 count_ordered_partitions(N, g, Bm), partition_lower_bound(N, g, Bm)))
    return rows


def write_table(rows: Iterable[dict], out=None) -> str:
    buf = out if out is not None else io.StringIO()
    w = csv.DictWriter(buf, fieldnames=TABLE_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(r)
    return buf.getvalue() if out is None else ""
