"""Static rank/select bitvector.

Bits are packed LSB-first into 64-bit words. Rank uses a two-level
directory (absolute counts per 4096-bit superblock, 16-bit relative counts
per 512-bit block); select binary-searches the directory between sampled
hints taken every 512 occurrences of the queried bit value.
"""

from __future__ import annotations

import math
import struct
from typing import Iterable, List, Sequence, Tuple

from .core import FormatError, NotFoundError, RangeError

MAGIC = b"RCBV"
VERSION = 1

_W = 64
_BLOCK_WORDS = 8                  # 512-bit blocks
_SUPER_BLOCKS = 8                 # 4096-bit superblocks
_BLOCK_BITS = _W * _BLOCK_WORDS
_SAMPLE = 512
_HEADER = struct.Struct("<4sBQQ")
_MASK = (1 << _W) - 1


def binary_entropy(x: float) -> float:
    if x <= 0 or x >= 1:
        return 0.0
    return -x * math.log2(x) - (1 - x) * math.log2(1 - x)


def log2_binomial(n: int, m: int) -> float:
    if m < 0 or m > n:
        return 0.0
    return (math.lgamma(n + 1) - math.lgamma(m + 1) - math.lgamma(n - m + 1)) / math.log(2)


class BitVector:
    """Immutable bit sequence with access/rank/select (1-based positions)."""

    __slots__ = ("_words", "_len", "_ones", "_super", "_rel", "_hints")

    def __init__(self, bits: Iterable = ""):
        if isinstance(bits, BitVector):
            words, length = list(bits._words), bits._len
        else:
            s = bits if isinstance(bits, str) else "".join("1" if b else "0" for b in bits)
            if s.strip("01"):
                raise FormatError("bit strings may contain only '0' and '1'")
            length = len(s)
            words = [int(s[p:p + _W][::-1], 2) for p in range(0, length, _W)]
        self._init(words, length)

    @classmethod
    def from_words(cls, words: Sequence[int], length: int) -> "BitVector":
        bv = cls.__new__(cls)
        nwords = (length + _W - 1) // _W
        words = [w & _MASK for w in list(words)[:nwords]]
        words += [0] * (nwords - len(words))
        if length % _W and words:
            words[-1] &= (1 << (length % _W)) - 1
        bv._init(words, length)
        return bv

    @classmethod
    def from_unary(cls, groups: Iterable[int]) -> "BitVector":
        """Concatenate ``0^g 1`` for every ``g`` in ``groups``."""
        return cls("".join("0" * g + "1" for g in groups))

    def _init(self, words: List[int], length: int):
        self._words = words
        self._len = length
        nblocks = (len(words) + _BLOCK_WORDS - 1) // _BLOCK_WORDS
        sup, rel = [], []
        total = 0
        base = 0
        for b in range(nblocks):
            if b % _SUPER_BLOCKS == 0:
                sup.append(total)
                base = total
            rel.append(total - base)
            for w in words[b * _BLOCK_WORDS:(b + 1) * _BLOCK_WORDS]:
                total += w.bit_count()
        self._super = sup
        self._rel = rel
        self._ones = total
        self._hints = (self._sample(0), self._sample(1))

    def _sample(self, alpha: int) -> List[int]:
        # hints[s] = block holding the (s*_SAMPLE + 1)-th alpha bit
        count = self._ones if alpha else self._len - self._ones
        hints = []
        b = 0
        nblocks = len(self._rel)
        for s in range(0, count, _SAMPLE):
            while b + 1 < nblocks and self._block_rank(alpha, b + 1) <= s:
                b += 1
            hints.append(b)
        return hints

    # --- basic properties -------------------------------------------------

    def __len__(self):
        return self._len

    @property
    def ones(self) -> int:
        return self._ones

    @property
    def zeros(self) -> int:
        return self._len - self._ones

    def __iter__(self):
        for p in range(self._len):
            yield (self._words[p >> 6] >> (p & 63)) & 1

    def __str__(self):
        if not self._len:
            return ""
        s = "".join(format(w, "064b")[::-1] for w in self._words)
        return s[:self._len]

    def __repr__(self):
        body = str(self)
        if len(body) > 64:
            body = body[:61] + "..."
        return f"BitVector('{body}')"

    def __eq__(self, other):
        if isinstance(other, str):
            return str(self) == other
        if not isinstance(other, BitVector):
            return NotImplemented
        return self._len == other._len and self._words == other._words

    def __hash__(self):
        return hash((self._len, tuple(self._words)))

    # --- queries ----------------------------------------------------------

    def access(self, i: int) -> int:
        if not 1 <= i <= self._len:
            raise RangeError(f"access({i}) outside [1, {self._len}]")
        p = i - 1
        return (self._words[p >> 6] >> (p & 63)) & 1

    def _rank1(self, i: int) -> int:
        w, off = i >> 6, i & 63
        b = w // _BLOCK_WORDS
        if b >= len(self._rel):
            return self._ones
        r = self._super[b // _SUPER_BLOCKS] + self._rel[b]
        words = self._words
        for t in range(b * _BLOCK_WORDS, w):
            r += words[t].bit_count()
        if off:
            r += (words[w] & ((1 << off) - 1)).bit_count()
        return r

    def rank(self, alpha: int, i: int) -> int:
        """Number of ``alpha`` bits among the first ``i`` bits."""
        if not 0 <= i <= self._len:
            raise RangeError(f"rank({alpha}, {i}) outside [0, {self._len}]")
        r1 = self._rank1(i)
        return r1 if alpha else i - r1

    def rank1(self, i: int) -> int:
        return self.rank(1, i)

    def rank0(self, i: int) -> int:
        return self.rank(0, i)

    def _block_rank(self, alpha: int, b: int) -> int:
        r1 = self._super[b // _SUPER_BLOCKS] + self._rel[b]
        return r1 if alpha else b * _BLOCK_BITS - r1

    def select(self, alpha: int, q: int) -> int:
        """Position of the ``q``-th ``alpha`` bit."""
        count = self._ones if alpha else self._len - self._ones
        if not 1 <= q <= count:
            raise NotFoundError(f"select({alpha}, {q}): only {count} such bits")
        hints = self._hints[alpha]
        s = (q - 1) // _SAMPLE
        lo = hints[s]
        hi = hints[s + 1] if s + 1 < len(hints) else len(self._rel) - 1
        # last block b in [lo, hi] with block_rank(b) < q
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if self._block_rank(alpha, mid) < q:
                lo = mid
            else:
                hi = mid - 1
        need = q - self._block_rank(alpha, lo)
        words = self._words
        t = lo * _BLOCK_WORDS
        while True:
            w = words[t] if alpha else ~words[t] & _MASK
            c = w.bit_count()
            if need <= c:
                break
            need -= c
            t += 1
        for _ in range(need - 1):
            w &= w - 1
        return t * _W + (w & -w).bit_length()

    def select1(self, q: int) -> int:
        return self.select(1, q)

    def select0(self, q: int) -> int:
        return self.select(0, q)

    # --- bulk helpers -----------------------------------------------------

    def slice(self, a: int, b: int) -> str:
        """Bits ``a..b`` (1-based, inclusive) as a '0'/'1' string."""
        if a > b:
            return ""
        if not (1 <= a and b <= self._len):
            raise RangeError(f"slice [{a}, {b}] outside [1, {self._len}]")
        w0, w1 = (a - 1) >> 6, (b - 1) >> 6
        s = "".join(format(w, "064b")[::-1] for w in self._words[w0:w1 + 1])
        off = (a - 1) & 63
        return s[off:off + b - a + 1]

    def unary_groups(self) -> List[int]:
        """Zero-run lengths before each 1; trailing zeros are a format error."""
        s = str(self)
        if s and not s.endswith("1"):
            raise FormatError("unary sequence does not end with a 1 bit")
        return [len(g) for g in s.split("1")[:-1]] if s else []

    # --- space accounting -------------------------------------------------

    def payload_bits(self) -> int:
        return self._len

    def directory_bits(self) -> int:
        return (64 * len(self._super) + 16 * len(self._rel)
                + 64 * (len(self._hints[0]) + len(self._hints[1])))

    def entropy_bits(self) -> float:
        """``lg C(L, m)``, the compressed-size target for this vector."""
        return log2_binomial(self._len, self._ones)

    # --- serialization ----------------------------------------------------

    def to_bytes(self) -> bytes:
        nbytes = (self._len + 7) // 8
        payload = b"".join(w.to_bytes(8, "little") for w in self._words)[:nbytes]
        return _HEADER.pack(MAGIC, VERSION, self._len, self._ones) + payload

    @classmethod
    def read_from(cls, buf: bytes, offset: int = 0) -> Tuple["BitVector", int]:
        if len(buf) - offset < _HEADER.size:
            raise FormatError("truncated bitvector header")
        magic, version, length, ones = _HEADER.unpack_from(buf, offset)
        if magic != MAGIC:
            raise FormatError(f"bad bitvector magic {magic!r}")
        if version != VERSION:
            raise FormatError(f"unsupported bitvector version {version}")
        start = offset + _HEADER.size
        nbytes = (length + 7) // 8
        payload = buf[start:start + nbytes]
        if len(payload) != nbytes:
            raise FormatError("truncated bitvector payload")
        padded = payload + b"\0" * (-nbytes % 8)
        words = [int.from_bytes(padded[p:p + 8], "little") for p in range(0, len(padded), 8)]
        if length % _W and words and words[-1] >> (length % _W):
            raise FormatError("bits set beyond the declared length")
        bv = cls.from_words(words, length)
        if bv.ones != ones:
            raise FormatError(f"header says {ones} ones, payload has {bv.ones}")
        return bv, start + nbytes

    @classmethod
    def from_bytes(cls, buf: bytes) -> "BitVector":
        bv, end = cls.read_from(buf, 0)
        if end != len(buf):
            raise FormatError("trailing bytes after bitvector")
        return bv
