"""Property suites run by ``rangeenc verify``.

Each suite walks all permutations up to the budget (smallest first, so the
first failure recorded is a minimal one) and then a handful of seeded random
inputs. A budget of 0 runs nothing and passes vacuously.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Callable, Dict, Iterator, List, Optional, Tuple

from . import combinatorics as cb
from . import minmax, topk_ds, topk_enc
from .core import BudgetExceeded, naive_min_max, naive_top_k

SUITES = ("minmax", "topk-enc", "topk-ds", "combinatorics")
MAX_BUDGET = 8


@dataclass
class CheckResult:
    suite: str
    check: str
    cases: int = 0
    failures: int = 0
    example: str = ""

    @property
    def ok(self) -> bool:
        return self.failures == 0

    def record(self, ok: bool, example: Callable[[], str]):
        self.cases += 1
        if not ok:
            self.failures += 1
            if not self.example:
                self.example = example()


def _perms(budget: int) -> Iterator[Tuple[int, ...]]:
    for n in range(1, budget + 1):
        yield from itertools.permutations(range(1, n + 1))


def _random_perms(rng: random.Random, count: int, max_n: int) -> Iterator[List[int]]:
    for _ in range(count):
        a = list(range(1, rng.randint(1, max_n) + 1))
        rng.shuffle(a)
        yield a


def _inputs(budget: int, seed: int, count: int = 20, max_n: int = 64):
    yield from _perms(budget)
    if budget:
        yield from _random_perms(random.Random(seed), count, max_n)


def _ranges(n: int):
    return [(i, j) for i in range(1, n + 1) for j in range(i, n + 1)]


def _suite_minmax(budget, seed):
    size = CheckResult("minmax", "size<=3n")
    trace = CheckResult("minmax", "decode=single-stack")
    query = CheckResult("minmax", "r_min_max=naive")
    bytes_ = CheckResult("minmax", "serialize-roundtrip")
    for A in _inputs(budget, seed):
        e = minmax.encode_minmax(A)
        size.record(e.size_bits <= 3 * len(A), lambda: f"A={tuple(A)}")
        want = minmax.StackTrace(minmax.encode_single(A, "min"), minmax.encode_single(A, "max"))
        trace.record(minmax.decode_minmax(e) == want, lambda: f"A={tuple(A)}")
        idx = minmax.build_index(e)
        bad = next((r for r in _ranges(len(A)) if minmax.r_min_max(idx, r) != naive_min_max(A, r)), None)
        query.record(bad is None, lambda: f"A={tuple(A)} r={bad}")
        bytes_.record(minmax.MinMaxEncoding.from_bytes(e.to_bytes()) == e, lambda: f"A={tuple(A)}")
    return [size, trace, query, bytes_]


def _suite_topk_enc(budget, seed):
    table = CheckResult("topk-enc", "replay=build_sk")
    query = CheckResult("topk-enc", "query_topk=naive")
    bytes_ = CheckResult("topk-enc", "serialize-roundtrip")
    size = CheckResult("topk-enc", "bits=(k+1)n")
    for A in _inputs(budget, seed):
        n = len(A)
        for k in (1, 2, 3):
            e = topk_enc.encode_topk(A, k)
            size.record(len(e.bits) == n + sum(e.deltas()) and len(e.bits) <= (k + 1) * n,
                        lambda: f"A={tuple(A)} k={k}")
            bad = next((j for j in range(1, n + 1)
                        if topk_enc.replay(e, j) != topk_enc.build_sk(A, k, j)), None)
            table.record(bad is None, lambda: f"A={tuple(A)} k={k} j={bad}")
            rs = _ranges(n)
            got = topk_enc.query_many(e, rs)
            bad = next((r for r, g in zip(rs, got) if g != naive_top_k(A, r, k)), None)
            query.record(bad is None, lambda: f"A={tuple(A)} k={k} r={bad}")
            bytes_.record(topk_enc.TopKEncoding.from_bytes(e.to_bytes()) == e,
                          lambda: f"A={tuple(A)} k={k}")
    return [table, query, bytes_, size]


def _suite_topk_ds(budget, seed):
    decomp = CheckResult("topk-ds", "decomposition-D1-D3")
    query = CheckResult("topk-ds", "query=naive")
    bytes_ = CheckResult("topk-ds", "serialize-roundtrip")
    for A in _inputs(budget, seed):
        for k in (1, 2):
            for B in (2, 3, 4):
                ds = topk_ds.build(A, k, B)
                rep = topk_ds.check_decomposition(ds.decomposition, A)
                decomp.record(rep.ok, lambda: f"A={tuple(A)} k={k} B={B}: {rep.failures[:1]}")
                bad = next((r for r in _ranges(len(A)) if ds.query(r) != naive_top_k(A, r, k)), None)
                query.record(bad is None, lambda: f"A={tuple(A)} k={k} B={B} r={bad}")
                again = topk_ds.TopKStructure.from_bytes(ds.to_bytes())
                bytes_.record(again.to_bytes() == ds.to_bytes(), lambda: f"A={tuple(A)} k={k} B={B}")
    return [decomp, query, bytes_]


def _suite_combinatorics(budget, seed):
    baxter = CheckResult("combinatorics", "is_baxter=definition")
    recover = CheckResult("combinatorics", "recover_from_minmax")
    walks = CheckResult("combinatorics", "valid_tuples>=walks")
    ext = CheckResult("combinatorics", "tuple-extension")
    classes = CheckResult("combinatorics", "tuples=answer-classes")
    cycle = CheckResult("combinatorics", "cycle-lemma")
    parts = CheckResult("combinatorics", "partitions>=bound")
    for p in _perms(budget):
        n = len(p)
        direct = not any(p[j + 1] < p[i] < p[l] < p[j] or p[j] < p[l] < p[i] < p[j + 1]
                         for i in range(n) for j in range(i + 1, n - 1) for l in range(j + 2, n))
        baxter.record(cb.is_baxter(p) == direct, lambda: f"pi={p}")
        if direct:
            oracle = lambda i, j: naive_min_max(p, (i, j))
            try:
                ok = cb.recover_from_minmax(oracle, n).values == p
            except cb.RecoveryFailed:
                ok = False
            recover.record(ok, lambda: f"pi={p}")
    for n in range(1, budget + 1):
        for k in (1, 2):
            valid = len(cb.enumerate_valid_tuples(n, k))
            for d in range(1, n):
                walks.record(valid >= cb.restricted_walk_bound(n, k, d), lambda: f"n={n} k={k} delta={d}")
            classes.record(valid == cb.count_answer_classes(n, k), lambda: f"n={n} k={k}")
            if n < budget:
                ext.record(cb.check_tuple_extension(n, k), lambda: f"n={n} k={k}")
    if budget:
        for lo in range(-2, 1):
            for hi in range(0, 3):
                for L in range(1, budget + 1):
                    spec = cb.WalkSpec(frozenset(range(lo, hi + 1)), L)
                    cycle.record(cb.check_cycle_lemma(spec), lambda: f"Y=[{lo},{hi}] len={L}")
        for N in range(0, 5 * budget + 1):
            for g in range(1, budget + 1):
                for Bm in range(1, budget + 1):
                    parts.record(cb.count_ordered_partitions(N, g, Bm) >= cb.partition_lower_bound(N, g, Bm),
                                 lambda: f"N={N} g={g} B={Bm}")
    return [baxter, recover, walks, ext, classes, cycle, parts]


_RUNNERS: Dict[str, Callable] = {
    "minmax": _suite_minmax,
    "topk-enc": _suite_topk_enc,
    "topk-ds": _suite_topk_ds,
    "combinatorics": _suite_combinatorics,
}


def run_suite(suite: str, budget: int = 5, seed: int = 0) -> List[CheckResult]:
    if suite not in _RUNNERS:
        raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    if not 0 <= budget <= MAX_BUDGET:
        raise BudgetExceeded(f"budget {budget} outside [0, {MAX_BUDGET}]")
    return _RUNNERS[suite](budget, seed)
