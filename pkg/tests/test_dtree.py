import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mtlab.boolfn import FunctionFamily, TruthTable, bundle, restrict_many, is_constant
from mtlab.dtree import (
    ArityError,
    DepthEngine,
    Leaf,
    Node,
    TableAdversary,
    all_trees,
    compose_trees,
    depth,
    extract_adversary,
    multitask_cost,
    optimal_tree,
    play,
    run_tree,
    tree_computes,
    tree_depth,
    tree_from_json,
    tree_paths_valid,
    tree_to_json,
)
from mtlab.ecf import validate_ecf
from oracles import brute_depth
from strategies import families, truth_tables

x = TruthTable.variable


def fn(n, rule):
    return TruthTable.from_function(n, rule)


XOR2 = fn(2, lambda b: b[0] ^ b[1])
AND2 = fn(2, lambda b: b[0] & b[1])


def test_depth_examples():
    assert depth(x(3, 1)) == 1
    assert depth(fn(4, lambda b: sum(b) % 2)) == 4
    assert depth(TruthTable.constant(3, 1)) == 0


def test_xor4_against_unmemoized_recursion():
    f = fn(4, lambda b: sum(b) % 2)
    assert brute_depth(f.outputs, 4) == 4


def test_multitask_cost_examples():
    assert multitask_cost(FunctionFamily([x(2, 1), x(2, 2)])).values == (0, 1, 1, 2)
    assert multitask_cost(FunctionFamily([x(2, 1), x(2, 1)]))["11"] == 1
    C = multitask_cost(FunctionFamily([x(2, 1), AND2]))
    assert C["01"] == 2 and C["11"] == 2


def test_multitask_cost_threads_match_serial():
    rng = np.random.default_rng(3)
    F = FunctionFamily([TruthTable(4, 2, rng.integers(0, 2, 16)) for _ in range(3)])
    assert multitask_cost(F, DepthEngine(), workers=4) == multitask_cost(F, DepthEngine())


def test_optimal_tree_examples():
    assert optimal_tree(x(2, 2)) == Node(2, Leaf(0), Leaf(1))
    T = optimal_tree(AND2)
    assert tree_depth(T) == 2 and T.q == 1
    assert optimal_tree(TruthTable.constant(2)) == Leaf(0)


def test_run_tree_examples():
    assert run_tree(Leaf("a"), 0) == ("a", [])
    T = Node(1, Leaf(0), Node(2, Leaf(1), Leaf(2)))
    assert run_tree(T, "10") == (1, [(1, 1), (2, 0)])
    label, tr = run_tree(optimal_tree(XOR2), "11")
    assert label == 0 and len(tr) == 2


def test_extract_adversary_examples():
    adv = extract_adversary(XOR2)
    assert adv.answer([], 1) == 0 and adv.answer([], 2) == 0
    or3 = fn(3, lambda b: int(any(b)))
    adv = extract_adversary(or3)
    for T in all_trees([1, 2, 3], 2):
        _, tr = play(T, adv)
        assert all(b == 0 for _, b in tr)
        assert not is_constant(restrict_many(or3, dict(tr)))
    with pytest.raises(ValueError):
        extract_adversary(TruthTable.constant(2))


def test_table_adversary_lookup():
    adv = TableAdversary({((), 1): 1, (((1, 1),), 2): 1})
    T = Node(1, Leaf("a"), Node(2, Leaf("b"), Leaf("c")))
    assert play(T, adv) == ("c", [(1, 1), (2, 1)])


def test_compose_examples():
    T1, T2 = optimal_tree(x(2, 1)), optimal_tree(x(2, 2))
    C = compose_trees(T1, T2)
    assert tree_depth(C) == 2
    for j in range(4):
        assert run_tree(C, j)[0] == (j & 1, j >> 1 & 1)
    assert tree_depth(compose_trees(T1, T1)) == 1
    assert tree_depth(compose_trees(optimal_tree(AND2), T1)) == 2


def test_arity_cap():
    with pytest.raises(ArityError):
        DepthEngine(cap=3).depth(TruthTable.constant(4))


def test_tree_json_round_trip_with_tuple_labels():
    T = compose_trees(optimal_tree(AND2), optimal_tree(XOR2))
    assert tree_from_json(tree_to_json(T)) == T


@settings(max_examples=300)
@given(truth_tables(max_n=4, alphabet=3))
def test_memoized_depth_equals_plain_recursion(f):
    assert depth(f) == brute_depth(f.outputs, f.n)


@given(truth_tables(max_n=5, alphabet=3))
def test_optimal_tree_computes_f_with_depth(f):
    T = optimal_tree(f)
    assert tree_computes(T, f)
    assert tree_paths_valid(T)
    assert tree_depth(T) == depth(f)


@given(families())
def test_cost_table_is_ecf(F):
    assert validate_ecf(multitask_cost(F)).passes


@given(families(max_n=4, max_l=3), st.data())
def test_subadditivity_witness_by_composition(F, data):
    X = data.draw(st.integers(1, (1 << F.l) - 1))
    Y = data.draw(st.integers(1, (1 << F.l) - 1))
    T = compose_trees(optimal_tree(bundle(F, X)), optimal_tree(bundle(F, Y)))
    assert tree_depth(T) <= depth(bundle(F, X)) + depth(bundle(F, Y))
    assert tree_depth(T) >= depth(bundle(F, X | Y))


def test_all_trees_counts():
    # depth <= 1 over 2 variables: the leaf plus one node per variable
    assert sum(1 for _ in all_trees([1, 2], 1)) == 3
    assert all(tree_paths_valid(T) for T in all_trees([1, 2, 3], 2))
