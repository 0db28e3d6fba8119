"""Hypothesis generators shared across test modules."""
import numpy as np
from hypothesis import strategies as st

from mtlab.boolfn import FunctionFamily, TruthTable, is_constant


@st.composite
def truth_tables(draw, min_n=0, max_n=4, alphabet=2):
    n = draw(st.integers(min_n, max_n))
    outs = draw(st.lists(st.integers(0, alphabet - 1), min_size=1 << n, max_size=1 << n))
    return TruthTable(n, alphabet, outs)


@st.composite
def nonconstant_tables(draw, n):
    outs = draw(st.lists(st.integers(0, 1), min_size=1 << n, max_size=1 << n).filter(lambda v: len(set(v)) > 1))
    return TruthTable(n, 2, outs)


@st.composite
def families(draw, max_n=4, max_l=3):
    n = draw(st.integers(1, max_n))
    l = draw(st.integers(1, max_l))
    return FunctionFamily([draw(nonconstant_tables(n)) for _ in range(l)])


def random_family(rng: np.random.Generator, n: int, l: int) -> FunctionFamily:
    members = []
    while len(members) < l:
        f = TruthTable(n, 2, rng.integers(0, 2, size=1 << n))
        if not is_constant(f):
            members.append(f)
    return FunctionFamily(members)
