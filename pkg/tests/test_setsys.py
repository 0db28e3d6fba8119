import itertools

import pytest
from hypothesis import given, settings, strategies as st

from mtlab.costs import CostTable, popcount
from mtlab.ecf import cstar, random_ecf, validate_ecf
from mtlab.setsys import (
    HittingSetSolver,
    WeightedSetSystem,
    hs_cost_table,
    intro_system,
    min_hitting_set,
    realize_ecf,
)
from oracles import brute_hitting_weight


def test_intro_system_examples():
    A = intro_system()
    assert min_hitting_set(A, 0b111)[1] == 2
    assert min_hitting_set(A, 0b011)[1] == 1
    assert hs_cost_table(A) == cstar()


def test_disjoint_singletons():
    A = WeightedSetSystem.unit(["a", "b"], [["a"], ["b"]])
    assert min_hitting_set(A, 0b11) == (("a", "b"), 2)


def test_single_weighted_set():
    A = WeightedSetSystem(["a", "b"], [2, 5], [["a", "b"]])
    assert hs_cost_table(A).values == (0, 2)


def test_tie_break_is_lexicographic():
    assert min_hitting_set(intro_system(), 0b111) == (("u1", "u2"), 2)
    assert min_hitting_set(intro_system(), 0b100) == (("u2",), 1)


def test_realize_examples():
    A = realize_ecf(cstar())
    assert len(A.universe) == 7 and hs_cost_table(A) == cstar()
    pop = CostTable(2, (0, 1, 1, 2))
    assert hs_cost_table(realize_ecf(pop)).values == (0, 1, 1, 2)
    one = realize_ecf(CostTable(1, (0, 4)))
    assert one.universe == ("b_1",) and one.weights == (4,) and one.sets == (("b_1",),)


def test_realize_rejects_non_ecf():
    with pytest.raises(ValueError):
        realize_ecf(CostTable(2, (0, 1, 1, 3)))


def test_validation():
    with pytest.raises(ValueError):
        WeightedSetSystem(["a"], [0], [["a"]])
    with pytest.raises(ValueError):
        WeightedSetSystem(["a"], [1], [[]])
    with pytest.raises(ValueError):
        WeightedSetSystem(["a"], [1], [["b"]])
    with pytest.raises(ValueError):
        min_hitting_set(intro_system(), 0)


def test_json_round_trip():
    A = realize_ecf(random_ecf(3, 5, 4))
    assert WeightedSetSystem.from_json(A.to_json()) == A


@st.composite
def systems(draw, max_u=8, max_l=4):
    n = draw(st.integers(1, max_u))
    uni = [f"e{i}" for i in range(n)]
    w = draw(st.lists(st.integers(1, 5), min_size=n, max_size=n))
    l = draw(st.integers(1, max_l))
    sets = [draw(st.lists(st.sampled_from(uni), min_size=1, max_size=n, unique=True)) for _ in range(l)]
    return WeightedSetSystem(uni, w, sets)


@settings(max_examples=150)
@given(systems(), st.data())
def test_solver_matches_subset_enumeration(A, data):
    X = data.draw(st.integers(1, (1 << A.l) - 1))
    ids, w = min_hitting_set(A, X)
    assert w == brute_hitting_weight(A.universe, A.weights, A.sets, X)
    assert w == sum(A.weight(u) for u in ids)
    assert all(set(ids) & set(S) for i, S in enumerate(A.sets) if X >> i & 1)


def test_solver_matches_enumeration_at_twelve_elements():
    A = WeightedSetSystem(
        [f"e{i}" for i in range(12)],
        [1 + (i * 7) % 5 for i in range(12)],
        [[f"e{j}" for j in range(12) if (j * (i + 3)) % 5 < 2] for i in range(5)],
    )
    solver = HittingSetSolver(A)
    for X in range(1, 32):
        assert solver.solve(X)[1] == brute_hitting_weight(A.universe, A.weights, A.sets, X)


@given(systems())
def test_hs_cost_table_is_ecf(A):
    assert validate_ecf(hs_cost_table(A)).passes


@given(st.integers(1, 4), st.integers(1, 8), st.integers(0, 10**6))
def test_realize_round_trip(l, v, seed):
    C = random_ecf(l, v, seed)
    assert hs_cost_table(realize_ecf(C)) == C


def test_realize_exhaustive_small():
    for vals in itertools.product(range(1, 4), repeat=7):
        C = CostTable(3, (0, *vals))
        if validate_ecf(C).passes:
            assert hs_cost_table(realize_ecf(C)) == C
