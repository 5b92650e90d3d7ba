"""Shared types, input normalization and brute-force reference oracles.

Every public index in this package is 1-based. Internally most code works
0-based; the conversion happens at the API boundary.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple, Union


class RangeEncError(Exception):
    """Base class for all errors raised by this package."""


class RangeError(RangeEncError, IndexError):
    pass


class ArgumentError(RangeEncError, ValueError):
    pass


class FormatError(RangeEncError, ValueError):
    pass


class CorruptionError(RangeEncError, ValueError):
    pass


class NotFoundError(RangeEncError, LookupError):
    pass


class RecoveryFailed(RangeEncError):
    pass


class BudgetExceeded(RangeEncError):
    pass


TopKResult = Tuple[int, ...]


@dataclass(frozen=True)
class InputArray:
    """A permutation of ``1..n`` stored as a tuple."""

    values: Tuple[int, ...]

    def __post_init__(self):
        if sorted(self.values) != list(range(1, len(self.values) + 1)):
            raise ArgumentError("InputArray values must be a permutation of 1..n")

    @property
    def n(self) -> int:
        return len(self.values)

    def __len__(self):
        return len(self.values)

    def __getitem__(self, i):
        """1-based element access."""
        if not 1 <= i <= len(self.values):
            raise RangeError(f"index {i} outside [1, {len(self.values)}]")
        return self.values[i - 1]


@dataclass(frozen=True)
class QueryRange:
    i: int
    j: int

    def check(self, n: int) -> "QueryRange":
        if not (1 <= self.i <= self.j <= n):
            raise RangeError(f"invalid range [{self.i}, {self.j}] for n={n}")
        return self

    def __len__(self):
        return self.j - self.i + 1


RangeLike = Union[QueryRange, Tuple[int, int], Sequence[int]]
ArrayLike = Union[InputArray, Sequence[int]]


def as_range(r: RangeLike, n: int) -> QueryRange:
    if not isinstance(r, QueryRange):
        i, j = r
        r = QueryRange(int(i), int(j))
    return r.check(n)


def normalize(raw: Iterable[int]) -> InputArray:
    """Rank-normalize ``raw``; ties go to the leftmost element."""
    if isinstance(raw, InputArray):
        return raw
    raw = list(raw)
    order = sorted(range(len(raw)), key=lambda p: (raw[p], p))
    ranks = [0] * len(raw)
    for r, p in enumerate(order, 1):
        ranks[p] = r
    return InputArray(tuple(ranks))


def as_array(A: ArrayLike) -> InputArray:
    return A if isinstance(A, InputArray) else normalize(A)


def naive_top_k(A: ArrayLike, r: RangeLike, k: int) -> TopKResult:
    A = as_array(A)
    r = as_range(r, A.n)
    if k < 1:
        raise ArgumentError("k must be positive")
    vals = A.values
    return tuple(heapq.nlargest(k, range(r.i, r.j + 1), key=lambda p: vals[p - 1]))


def naive_min_max(A: ArrayLike, r: RangeLike) -> Tuple[int, int]:
    """Return ``(argmax, argmin)`` of ``A[i..j]`` by a full scan."""
    A = as_array(A)
    r = as_range(r, A.n)
    vals = A.values
    positions = range(r.i, r.j + 1)
    return (max(positions, key=lambda p: vals[p - 1]),
            min(positions, key=lambda p: vals[p - 1]))


def naive_select(A: ArrayLike, r: RangeLike, kprime: int) -> int:
    A = as_array(A)
    r = as_range(r, A.n)
    if not 1 <= kprime <= len(r):
        raise ArgumentError(f"k'={kprime} outside [1, {len(r)}]")
    return naive_top_k(A, r, kprime)[-1]


def read_array_file(path) -> list:
    """Parse the array file format: one signed integer per line, blanks skipped."""
    values = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            s = line.strip()
            if not s:
                continue
            try:
                values.append(int(s))
            except ValueError:
                raise FormatError(f"{path}:{lineno}: not an integer: {s!r}") from None
    return values


def write_array_file(path, values: Iterable[int]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for v in values:
            fh.write(f"{int(v)}\n")


def read_query_file(path) -> List[Tuple[int, int, Optional[int]]]:
    """Parse query lines ``i j [k']``; blank lines and ``#`` comments skipped."""
    queries = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            s = line.split("#", 1)[0].split()
            if not s:
                continue
            try:
                nums = [int(x) for x in s]
            except ValueError:
                raise FormatError(f"{path}:{lineno}: not an integer query: {line.strip()!r}") from None
            if len(nums) not in (2, 3):
                raise FormatError(f"{path}:{lineno}: expected 'i j [k']', got {len(nums)} fields")
            queries.append((nums[0], nums[1], nums[2] if len(nums) == 3 else None))
    return queries
