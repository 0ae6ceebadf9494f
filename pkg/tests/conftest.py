from itertools import permutations

import numpy as np
import pytest
from hypothesis import strategies as st

from tspqaoa.instance import TspInstance, generate_random


def all_orders(n):
    return [(0,) + rest for rest in permutations(range(1, n))]


def cycle_cost(w, order):
    return sum(w[order[i]][order[(i + 1) % len(order)]] for i in range(len(order)))


@st.composite
def instances(draw, sizes=(3, 4, 5), integer=True):
    n = draw(st.sampled_from(sizes))
    seed = draw(st.integers(0, 2**32 - 1))
    if integer:
        return generate_random(n, seed, 1, 20)
    rng = np.random.default_rng(seed)
    w = rng.uniform(0.0, 10.0, size=(n, n))
    np.fill_diagonal(w, 0.0)
    return TspInstance(n, w)


@pytest.fixture
def inst4():
    return generate_random(4, 1)


# (criterion, passed, detail) lines from test_acceptance.py; passed=None marks report-only lines
ACCEPTANCE: list[tuple[str, bool | None, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in ACCEPTANCE:
        label = "INFO" if passed is None else "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{label}] {name}: {detail}")
