from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import strategies as st

from mwnw.core import Instance
from mwnw import worked_examples

WEIGHT_POOL = (Fraction(1), Fraction(1, 2), Fraction(3, 2), Fraction(2), Fraction(3))


@st.composite
def instances(draw, max_n=4, max_m=6, min_n=1, weights=WEIGHT_POOL):
    n = draw(st.integers(min_n, max_n))
    m = draw(st.integers(0, max_m))
    rows = draw(st.lists(st.lists(st.integers(0, 1), min_size=m, max_size=m), min_size=n, max_size=n))
    ws = draw(st.lists(st.sampled_from(weights), min_size=n, max_size=n))
    return Instance.from_matrix(rows, ws, n_goods=m)


@pytest.fixture
def prop1():
    return worked_examples.STRONG_GSP_TRUE


@pytest.fixture
def prop1_reported():
    return worked_examples.STRONG_GSP_REPORTED


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
