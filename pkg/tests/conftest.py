import random

import pytest
from hypothesis import settings, strategies as st

settings.register_profile("default", max_examples=100, deadline=None)
settings.load_profile("default")

TOPK_EXAMPLE = (46, 31, 93, 16, 45, 77, 25, 57, 26)
MINMAX_EXAMPLE = (11, 1, 7, 10, 9, 3, 4, 2, 8, 5, 6)


@st.composite
def permutations(draw, min_size=1, max_size=24):
    n = draw(st.integers(min_size, max_size))
    return tuple(draw(st.permutations(range(1, n + 1))))


def random_perm(rng: random.Random, n: int):
    a = list(range(1, n + 1))
    rng.shuffle(a)
    return a


@pytest.fixture
def rng():
    return random.Random(12345)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
