import random

import pytest
from hypothesis import strategies as st

from nambukit.expr import Polynomial, random_polynomial
from nambukit.models import build_model

ACCEPTANCE_RESULTS = []


@pytest.fixture(scope="session")
def model():
    return build_model()


@pytest.fixture
def rng():
    return random.Random(20240611)


def random_polys(rng, space, count, max_degree=3, n_terms=4, names=None):
    names = names or space.variable_names
    return [random_polynomial(rng, names, max_degree, n_terms) for _ in range(count)]


def polynomials(names=("x1_1", "x2_1", "x3_1", "k"), max_degree=4, max_terms=5):
    """Hypothesis strategy for small canonical polynomials."""
    coef = st.fractions(min_value=-5, max_value=5, max_denominator=6)
    exps = st.lists(st.integers(0, 2), min_size=len(names), max_size=len(names)).filter(
        lambda e: sum(e) <= max_degree
    )
    term = st.tuples(coef, exps)

    def build(ts):
        terms = {}
        for c, e in ts:
            mono = tuple((n, k) for n, k in zip(names, e) if k)
            terms[mono] = terms.get(mono, 0) + c
        return Polynomial(terms)

    return st.lists(term, max_size=max_terms).map(build)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}")
