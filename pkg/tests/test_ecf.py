import itertools

import pytest
from hypothesis import given, strategies as st

from mtlab.costs import CostTable, format_bits, parse_bits, popcount
from mtlab.ecf import closure, cstar, is_ecf, random_ecf, validate_ecf
from oracles import brute_is_ecf


def test_cstar_values_and_axioms():
    C = cstar()
    assert C["111"] == 2 and C["110"] == 1
    assert validate_ecf(C).passes


def test_popcount_is_ecf():
    assert is_ecf(CostTable(3, tuple(popcount(X) for X in range(8))))


def test_subadditivity_violation_witness():
    rep = validate_ecf(CostTable(2, (0, 1, 1, 3)))
    assert rep.failed_axioms() == [3]
    v = rep.violations[0]
    assert (format_bits(v.X, 2), format_bits(v.Y, 2)) == ("10", "01")


def test_axiom_one_and_two_violations():
    assert validate_ecf(CostTable(2, (0, 0, 1, 1))).failed_axioms() == [1]
    assert 2 in validate_ecf(CostTable(2, (0, 2, 1, 1))).failed_axioms()


def test_bits_convention():
    assert parse_bits("100") == 1
    assert format_bits(0b110, 3) == "011"
    assert CostTable(2, (0, 5, 6, 7))["10"] == 5


def test_exhaustive_agreement_with_triple_loop():
    for l in (1, 2, 3):
        for vals in itertools.product(range(4), repeat=(1 << l) - 1):
            table = (0, *vals)
            assert validate_ecf(CostTable(l, table)).passes == brute_is_ecf(table, l)


def test_random_ecf_examples():
    for seed in range(10):
        assert validate_ecf(random_ecf(3, 5, seed)).passes
    assert random_ecf(4, 8, 7) == random_ecf(4, 8, 7)
    C = random_ecf(1, 6, 2)
    assert C.values[0] == 0 and 1 <= C.values[1] <= 6


def test_random_ecf_bounds():
    with pytest.raises(ValueError):
        random_ecf(6, 3, 0)
    with pytest.raises(ValueError):
        random_ecf(3, 0, 0)


@given(st.integers(1, 4), st.data())
def test_closure_idempotent(l, data):
    raw = [0] + data.draw(st.lists(st.integers(1, 9), min_size=(1 << l) - 1, max_size=(1 << l) - 1))
    once = closure(raw, l)
    assert closure(once, l) == once
    assert brute_is_ecf(once, l)
    assert all(a <= b for a, b in zip(once, raw))


@given(st.integers(1, 5), st.integers(1, 15), st.integers(0, 2**32 - 1))
def test_random_ecf_always_valid(l, v, seed):
    assert is_ecf(random_ecf(l, v, seed))


def test_cost_table_json_round_trip():
    C = random_ecf(3, 4, 1)
    assert CostTable.from_json(C.to_json()) == C
