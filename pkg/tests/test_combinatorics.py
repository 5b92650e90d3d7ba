import io
import itertools
import math

import pytest
from hypothesis import given, strategies as st

from rangeenc.combinatorics import (Permutation, WalkSpec, check_cycle_lemma, check_tuple_extension,
                                    count_answer_classes, count_baxter, count_nonneg_returning_walks,
                                    count_nonneg_walks, count_ordered_partitions, count_returning_walks,
                                    count_tables, entropy, enumerate_valid_tuples, is_baxter,
                                    lb_topk_bits, partition_lower_bound, recover_from_minmax,
                                    restricted_walk_bound, ub_topk_bits, write_table)
from rangeenc.core import ArgumentError, BudgetExceeded, RecoveryFailed, naive_min_max

# derived once by brute force over all permutations, kept as regression goldens
BAXTER_GOLDENS = [1, 2, 6, 22, 92, 422, 2074, 10754]


def baxter_by_definition(p):
    n = len(p)
    return not any(p[j + 1] < p[i] < p[l] < p[j] or p[j] < p[l] < p[i] < p[j + 1]
                   for i in range(n) for j in range(i + 1, n - 1) for l in range(j + 2, n))


def test_is_baxter_examples():
    assert not is_baxter((2, 4, 1, 3))
    assert not is_baxter((3, 1, 4, 2))
    for n in range(4):
        assert all(is_baxter(p) for p in itertools.permutations(range(1, n + 1)))
    assert is_baxter(Permutation((1, 3, 2, 4)))


def test_is_baxter_matches_definition():
    for n in range(1, 8):
        for p in itertools.permutations(range(1, n + 1)):
            assert is_baxter(p) == baxter_by_definition(p)


def test_count_baxter():
    assert [count_baxter(n) for n in range(1, 9)] == BAXTER_GOLDENS
    assert count_baxter(4) == 24 - 2
    for n, c in enumerate(BAXTER_GOLDENS, 1):
        assert math.log2(c) <= 3 * n
    with pytest.raises(BudgetExceeded):
        count_baxter(11)
    with pytest.raises(BudgetExceeded):
        count_baxter(6, max_n=5)


def test_count_baxter_growth_trend():
    # successive ratios climb toward 8 (the 2^(3n) growth rate) from below
    ratios = [b / a for a, b in zip(BAXTER_GOLDENS, BAXTER_GOLDENS[1:])]
    assert all(r1 < r2 < 8 for r1, r2 in zip(ratios, ratios[1:]))


def oracle_for(p):
    return lambda i, j: naive_min_max(p, (i, j))


def test_recover_baxter_exhaustive():
    assert recover_from_minmax(oracle_for((1,)), 1).values == (1,)
    for n in range(1, 8):
        for p in itertools.permutations(range(1, n + 1)):
            if is_baxter(p):
                assert recover_from_minmax(oracle_for(p), n).values == p


def test_recover_non_baxter_does_not_crash():
    for p in [(2, 4, 1, 3), (3, 1, 4, 2), (2, 5, 1, 4, 3)]:
        try:
            out = recover_from_minmax(oracle_for(p), len(p))
        except RecoveryFailed:
            continue
        # whatever comes back must be indistinguishable by min-max queries
        assert all(naive_min_max(out.values, (i, j)) == naive_min_max(p, (i, j))
                   for i in range(1, len(p) + 1) for j in range(i, len(p) + 1))


def test_recover_rejects_inconsistent_oracle():
    with pytest.raises(RecoveryFailed):
        recover_from_minmax(lambda i, j: (i, i), 3)


def test_valid_tuples():
    assert enumerate_valid_tuples(1, 2) == {()}
    for k in (1, 2, 5):
        assert enumerate_valid_tuples(2, k) == {(0,), (1,)}
    with pytest.raises(BudgetExceeded):
        enumerate_valid_tuples(9, 1)


def test_valid_tuples_vs_walks():
    for n in range(1, 8):
        for k in (1, 2):
            valid = len(enumerate_valid_tuples(n, k))
            for d in range(1, n):
                assert valid >= restricted_walk_bound(n, k, d)
    assert len(enumerate_valid_tuples(4, 1)) >= count_nonneg_walks(WalkSpec({0, 1}, 2))
    with pytest.raises(ArgumentError):
        restricted_walk_bound(3, 1, 3)


def test_valid_tuples_upper_bound():
    for n in range(1, 8):
        for k in (1, 2, 3):
            assert len(enumerate_valid_tuples(n, k)) <= math.comb((k + 1) * n, n)


def test_valid_tuples_equal_answer_classes():
    for n in range(1, 7):
        for k in (1, 2, 3):
            assert len(enumerate_valid_tuples(n, k)) == count_answer_classes(n, k)


def test_tuple_extension():
    for k in (1, 2):
        for n in range(1, 6):
            assert check_tuple_extension(n, k)


def test_walk_counts():
    s = WalkSpec({-1, 1}, 4)
    assert count_returning_walks(s) == 6 == math.comb(4, 2)
    assert count_nonneg_walks(s) == 6
    assert count_nonneg_returning_walks(s) == 2
    for L in range(0, 6):
        z = WalkSpec({0}, L)
        assert count_nonneg_walks(z) == count_returning_walks(z) == 1
    with pytest.raises(ArgumentError):
        WalkSpec(set(), 3)


@given(st.sets(st.integers(-3, 3), min_size=1), st.integers(0, 7))
def test_walk_dp_matches_brute_force(Y, L):
    spec = WalkSpec(Y, L)
    nonneg = returning = 0
    for steps in itertools.product(sorted(Y), repeat=L):
        heights = list(itertools.accumulate(steps))
        returning += (heights[-1] if heights else 0) == 0
        nonneg += all(h >= 0 for h in heights)
    assert count_nonneg_walks(spec) == nonneg
    assert count_returning_walks(spec) == returning


def test_cycle_lemma():
    assert check_cycle_lemma(WalkSpec({-1, 1}, 4))
    for L in range(1, 9):
        assert check_cycle_lemma(WalkSpec({0}, L))
        assert check_cycle_lemma(WalkSpec(range(-2, 3), L))


def test_ordered_partitions():
    assert count_ordered_partitions(2, 3, 2) == 6
    assert partition_lower_bound(2, 3, 2) == 2
    for g in range(0, 5):
        assert count_ordered_partitions(0, g, 3) == 1
    assert partition_lower_bound(5, 2, 0) == 0
    assert partition_lower_bound(40, 3, 1) == 0


@given(st.integers(0, 40), st.integers(0, 10), st.integers(0, 10))
def test_partition_bound_holds(N, g, Bm):
    exact = count_ordered_partitions(N, g, Bm)
    brute = sum(1 for parts in itertools.product(range(Bm + 1), repeat=g) if sum(parts) == N) \
        if (Bm + 1) ** g <= 20000 else exact
    assert exact == brute
    assert exact >= partition_lower_bound(N, g, Bm)


def test_entropy_values():
    assert entropy(0.5) == 1.0
    assert entropy(0) == entropy(1) == 0.0
    for k, stated in ((3, 2.755), (4, 3.245), (5, 3.610)):
        assert k * entropy(1 / k) == pytest.approx(stated, abs=1e-3)
    with pytest.raises(ArgumentError):
        entropy(1.5)


def test_topk_bit_bounds():
    assert ub_topk_bits(10, 2) == pytest.approx(30 * entropy(1 / 3))
    # the lower bound uses n' = n(1 - k/delta) + k/delta + k - 2 - delta
    assert lb_topk_bits(100, 2, 10) == pytest.approx(3 * (80 + 0.2 + 2 - 2 - 10) * entropy(1 / 3))
    assert lb_topk_bits(1000, 2, 30) < ub_topk_bits(1000, 2)
    with pytest.raises(ArgumentError):
        lb_topk_bits(10, 1, 0)


def test_count_tables_csv():
    rows = count_tables(max_n=4, max_k=1, max_len=3, max_N=4)
    text = write_table(rows)
    lines = text.splitlines()
    assert lines[0] == "table,params,exact,bound,ratio"
    assert "baxter,n=4,22,4096," in text
    for r in rows:
        if r["table"] in ("valid_tuples_walks", "cycle_lemma", "partitions"):
            assert r["exact"] >= r["bound"]
    buf = io.StringIO()
    write_table(rows, buf)
    assert buf.getvalue() == text
