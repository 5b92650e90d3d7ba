import itertools
import random

import pytest
from hypothesis import given

from rangeenc.core import FormatError, RangeError, naive_min_max, normalize
from rangeenc.minmax import (MinMaxEncoding, StackTrace, build_index, decode_minmax, dfuds_parents,
                             encode_minmax, encode_single, r_min_max, space_report)
from conftest import MINMAX_EXAMPLE, permutations, random_perm


def test_single_stack_traces():
    assert encode_single([1], "min") == "10" == encode_single([1], "max")
    t = encode_single(MINMAX_EXAMPLE, "min")
    assert len(t) == 22 and t.count("1") == 11
    inc = encode_single(range(1, 8), "min")
    assert inc == "1" * 7 + "0" * 7
    assert encode_single([], "max") == ""
    with pytest.raises(ValueError):
        encode_single([1, 2], "median")


def test_minmax_example_encoding():
    e = encode_minmax(MINMAX_EXAMPLE)
    assert str(e.T) == "1111011010111000100001"
    assert str(e.U) == "0110010101"
    assert e.size_bits == 32 <= 33


def test_one_step_u_bit():
    assert str(encode_minmax([1, 2]).U) == "1"
    assert str(encode_minmax([2, 1]).U) == "0"


def test_small_cases():
    e = encode_minmax([5])
    assert (str(e.T), str(e.U)) == ("11", "") and e.size_bits <= 3
    assert decode_minmax(e) == StackTrace("10", "10")
    idx = build_index(e)
    assert r_min_max(idx, (1, 1)) == (1, 1)
    empty = encode_minmax([])
    assert empty.size_bits == 0 and decode_minmax(empty) == StackTrace("", "")
    with pytest.raises(RangeError):
        r_min_max(build_index(empty), (1, 1))


def check_encoding(A):
    n = len(A)
    e = encode_minmax(A)
    assert len(e.T) == 2 * n and e.T.ones == n + 1 and len(e.U) == n - 1
    assert e.size_bits <= 3 * n
    assert decode_minmax(e) == StackTrace(encode_single(A, "min"), encode_single(A, "max"))
    return e


def test_exhaustive_small():
    for n in range(1, 8):
        for A in itertools.permutations(range(1, n + 1)):
            check_encoding(A)


def test_queries_exhaustive_n10_sample():
    rng = random.Random(3)
    for _ in range(200):
        A = random_perm(rng, 10)
        idx = build_index(encode_minmax(A))
        for i in range(1, 11):
            for j in range(i, 11):
                assert r_min_max(idx, (i, j)) == naive_min_max(A, (i, j))


def test_minmax_example_queries():
    idx = build_index(encode_minmax(MINMAX_EXAMPLE))
    assert r_min_max(idx, (1, 11)) == (1, 2)
    assert r_min_max(idx, (3, 5)) == (4, 3)
    assert r_min_max(idx, (6, 9)) == (9, 8)
    assert r_min_max(idx, (4, 4)) == (4, 4)
    with pytest.raises(RangeError):
        r_min_max(idx, (0, 3))


def test_random_large():
    rng = random.Random(11)
    A = normalize(random_perm(rng, 4096))
    idx = build_index(check_encoding(A))
    for _ in range(10_000):
        i = rng.randint(1, 4096)
        j = rng.randint(i, min(4096, i + rng.choice([3, 50, 4096])))
        assert r_min_max(idx, (i, j)) == naive_min_max(A, (i, j))


@given(permutations(max_size=40))
def test_roundtrip_property(A):
    e = check_encoding(A)
    assert MinMaxEncoding.from_bytes(e.to_bytes()) == e


@given(permutations(max_size=30))
def test_traces_are_trees(A):
    for mode in ("min", "max"):
        t = encode_single(A, mode)
        parents = dfuds_parents(t)
        assert len(parents) == len(A) + 1
        assert parents[0] == -1 and all(0 <= p < v for v, p in enumerate(parents) if v)


def test_dfuds_rejects_garbage():
    with pytest.raises(FormatError):
        dfuds_parents("0110")
    with pytest.raises(FormatError):
        dfuds_parents("1000")  # one node with three children but no nodes to fill them


def test_malformed_encodings():
    buf = encode_minmax(MINMAX_EXAMPLE).to_bytes()
    with pytest.raises(FormatError):
        MinMaxEncoding.from_bytes(b"NOPE" + buf[4:])
    with pytest.raises(FormatError):
        MinMaxEncoding.from_bytes(buf + b"x")
    e = encode_minmax(MINMAX_EXAMPLE)
    from rangeenc.bitvec import BitVector
    with pytest.raises(FormatError):
        decode_minmax(MinMaxEncoding(11, BitVector("0" + str(e.T)[1:]), e.U))
    with pytest.raises(FormatError):
        decode_minmax(MinMaxEncoding(11, e.T, BitVector(str(e.U)[:-1])))


def test_space_report():
    rep = space_report(encode_minmax(MINMAX_EXAMPLE))
    assert rep["payload_bits"] == 32 and rep["bound_bits"] == 33
    assert rep["T_bits"] == 22 and rep["U_bits"] == 10
