"""Sparse-table range argmin/argmax over a static integer array."""

from __future__ import annotations

import numpy as np


class SparseTable:
    """O(n log n) preprocessing, O(1) argmin (or argmax) over ``[lo, hi]``.

    Indices are 0-based and inclusive. Ties resolve to the leftmost position.
    """

    def __init__(self, values, mode: str = "min"):
        if mode not in ("min", "max"):
            raise ValueError("mode must be 'min' or 'max'")
        vals = np.asarray(values, dtype=np.int64)
        self.mode = mode
        self.n = len(vals)
        self._vals = vals.tolist()
        key = vals if mode == "min" else -vals
        levels = [np.arange(self.n, dtype=np.int64)]
        span = 1
        while 2 * span <= self.n:
            prev = levels[-1]
            left, right = prev[:-span], prev[span:]
            take_right = key[right] < key[left]
            levels.append(np.where(take_right, right, left))
            span *= 2
        self._levels = [lvl.tolist() for lvl in levels]

    def query(self, lo: int, hi: int) -> int:
        level = (hi - lo + 1).bit_length() - 1
        row = self._levels[level]
        a, b = row[lo], row[hi - (1 << level) + 1]
        va, vb = self._vals[a], self._vals[b]
        if self.mode == "min":
            return b if vb < va else a
        return b if vb > va else a

    def words(self) -> int:
        return sum(len(r) for r in self._levels)
