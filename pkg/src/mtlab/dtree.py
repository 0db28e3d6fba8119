"""Exact decision-tree depth, multitask cost tables, adversaries and tree composition."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterator, Sequence

import numpy as np

from .boolfn import FunctionFamily, TruthTable, bundle, restrict_array, restrict_many, to_bits, to_index
from .costs import CostTable

DEFAULT_CAP = 16
MAX_FAMILY = 8


class ArityError(ValueError):
    pass


@dataclass(frozen=True)
class Leaf:
    label: Any


@dataclass(frozen=True)
class Node:
    q: int  # 1-based variable index
    zero: "Leaf | Node"
    one: "Leaf | Node"

    def child(self, b: int):
        return self.one if b else self.zero


DecisionTree = Leaf | Node


def tree_depth(T) -> int:
    if isinstance(T, Leaf):
        return 0
    return 1 + max(tree_depth(T.zero), tree_depth(T.one))


def tree_paths_valid(T, seen=frozenset()) -> bool:
    """True iff no variable repeats on any root-to-leaf path."""
    if isinstance(T, Leaf):
        return True
    if T.q in seen:
        return False
    seen = seen | {T.q}
    return tree_paths_valid(T.zero, seen) and tree_paths_valid(T.one, seen)


def run_tree(T, x) -> tuple[Any, list[tuple[int, int]]]:
    """Evaluate ``T`` on ``x``; returns the leaf label and the (index, bit) transcript."""
    j = to_index(x)
    transcript = []
    while isinstance(T, Node):
        b = j >> (T.q - 1) & 1
        transcript.append((T.q, b))
        T = T.child(b)
    return T.label, transcript


def _label_to_json(label):
    if isinstance(label, tuple):
        return [_label_to_json(v) for v in label]
    return label


def _label_from_json(obj):
    if isinstance(obj, list):
        return tuple(_label_from_json(v) for v in obj)
    return obj


def tree_to_json(T) -> dict:
    if isinstance(T, Leaf):
        return {"leaf": _label_to_json(T.label)}
    return {"q": T.q, "0": tree_to_json(T.zero), "1": tree_to_json(T.one)}


def tree_from_json(obj: dict):
    if "leaf" in obj:
        return Leaf(_label_from_json(obj["leaf"]))
    return Node(int(obj["q"]), tree_from_json(obj["0"]), tree_from_json(obj["1"]))


def _canonical(arr: np.ndarray, n: int) -> tuple[np.ndarray, int]:
    """Drop irrelevant variables and relabel symbols by first occurrence.

    Depth is invariant under both, so equivalent subproblems share a memo slot.
    """
    i0 = 0
    while i0 < n:
        a = arr.reshape(-1, 2, 1 << i0)
        if np.array_equal(a[:, 0, :], a[:, 1, :]):
            arr = a[:, 0, :].ravel()
            n -= 1
        else:
            i0 += 1
    _, first, inv = np.unique(arr, return_index=True, return_inverse=True)
    k = first.size
    rank = np.empty(k, dtype=np.uint8 if k <= 256 else np.uint16 if k <= 1 << 16 else np.uint32)
    rank[np.argsort(first)] = np.arange(first.size)
    return rank[inv.ravel()], n


class DepthEngine:
    """Memoized exact depth: D(f) = 0 if f is constant, else 1 + min_i max_b D(f|x_i=b).

    The memo is keyed on the canonical restricted truth table, not on the
    restriction that produced it.  ``cap`` bounds the accepted arity.
    """

    def __init__(self, cap: int = DEFAULT_CAP):
        self.cap = cap
        self.memo: dict = {}

    def clear(self):
        self.memo.clear()

    def _check(self, f: TruthTable):
        if f.n > self.cap:
            raise ArityError(f"arity {f.n} exceeds depth-engine cap {self.cap}")

    def depth(self, f: TruthTable) -> int:
        self._check(f)
        return self._depth(f.outputs, f.n)

    def _depth(self, arr: np.ndarray, n: int) -> int:
        if (arr == arr[0]).all():
            return 0
        arr, n = _canonical(arr, n)
        key = (n, arr.tobytes())
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        best = n  # querying every relevant variable always suffices
        for i0 in range(n):
            d0 = self._depth(restrict_array(arr, i0, 0), n - 1)
            if 1 + d0 >= best:
                continue
            d1 = self._depth(restrict_array(arr, i0, 1), n - 1)
            cand = 1 + max(d0, d1)
            if cand < best:
                best = cand
                if best == 1:
                    break
        self.memo[key] = best
        return best

    def optimal_tree(self, f: TruthTable):
        """A depth-optimal tree; ties between query indices go to the smallest index."""
        self._check(f)
        return self._build(f.outputs, f.n, list(range(1, f.n + 1)))

    def _build(self, arr, n, names):
        if (arr == arr[0]).all():
            return Leaf(int(arr[0]))
        target = self._depth(arr, n)
        for pos, name in enumerate(names):
            f0 = restrict_array(arr, pos, 0)
            f1 = restrict_array(arr, pos, 1)
            if 1 + max(self._depth(f0, n - 1), self._depth(f1, n - 1)) == target:
                rest = names[:pos] + names[pos + 1 :]
                return Node(name, self._build(f0, n - 1, rest), self._build(f1, n - 1, rest))
        raise AssertionError("no query achieves the computed depth")


_engine = DepthEngine()


def default_engine() -> DepthEngine:
    return _engine


def depth(f: TruthTable, engine: DepthEngine | None = None) -> int:
    return (engine or _engine).depth(f)


def optimal_tree(f: TruthTable, engine: DepthEngine | None = None):
    return (engine or _engine).optimal_tree(f)


def multitask_cost(F: FunctionFamily, engine: DepthEngine | None = None, workers: int = 1) -> CostTable:
    """C_F(X) = D(bundle(F, X)) for X != 0, and C_F(0) = 0."""
    if F.l > MAX_FAMILY:
        raise ArityError(f"family of {F.l} functions exceeds limit {MAX_FAMILY}")
    engine = engine or _engine
    masks = range(1, 1 << F.l)
    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(workers) as pool:
            vals = list(pool.map(lambda X: engine.depth(bundle(F, X)), masks))
    else:
        vals = [engine.depth(bundle(F, X)) for X in masks]
    return CostTable(F.l, (0, *vals))


class AdversaryStrategy:
    """Answers a query given only the ordered transcript of earlier (index, bit) pairs."""

    def answer(self, transcript: Sequence[tuple[int, int]], i: int) -> int:
        raise NotImplementedError

    def __call__(self, transcript, i):
        return self.answer(transcript, i)


class TableAdversary(AdversaryStrategy):
    """Explicit answer table keyed on (sorted transcript items, query); default bit elsewhere."""

    def __init__(self, table: dict, default: int = 0):
        self.table = table
        self.default = default

    def answer(self, transcript, i):
        return self.table.get((tuple(sorted(transcript)), i), self.default)


class GreedyDepthAdversary(AdversaryStrategy):
    """Answer with the bit whose restriction keeps the larger depth (ties -> 0)."""

    def __init__(self, f: TruthTable, engine: DepthEngine | None = None):
        self.f = f
        self.engine = engine or _engine

    def answer(self, transcript, i):
        fixed = dict(transcript)
        if i in fixed:
            return fixed[i]
        d = []
        for b in (0, 1):
            g = restrict_many(self.f, {**fixed, i: b})
            d.append(self.engine.depth(g))
        return 1 if d[1] > d[0] else 0


def extract_adversary(f: TruthTable, engine: DepthEngine | None = None) -> GreedyDepthAdversary:
    """Adversary keeping ``f`` undetermined for depth(f) - 1 queries.

    Each answer preserves depth >= D(f) - (#queries so far), since
    D(g) <= 1 + max_b D(g|x_i=b) for every i.
    """
    if depth(f, engine) < 1:
        raise ValueError("constant function has no adversary")
    return GreedyDepthAdversary(f, engine)


def play(T, adversary: AdversaryStrategy) -> tuple[Any, list[tuple[int, int]]]:
    """Walk ``T`` with answers supplied by ``adversary``."""
    transcript: list[tuple[int, int]] = []
    known: dict = {}
    while isinstance(T, Node):
        b = known.get(T.q)
        if b is None:
            b = adversary.answer(transcript, T.q)
            transcript.append((T.q, b))
            known[T.q] = b
        T = T.child(b)
    return T.label, transcript


def compose_trees(T1, T2):
    """Hang a copy of ``T2`` under every leaf of ``T1``; leaves become label pairs.

    A query already answered on the current path is contracted into the known
    branch, so depth never exceeds depth(T1) + depth(T2).
    """

    def tail(t, known, label1):
        if isinstance(t, Leaf):
            return Leaf((label1, t.label))
        if t.q in known:
            return tail(t.child(known[t.q]), known, label1)
        return Node(t.q, tail(t.zero, {**known, t.q: 0}, label1), tail(t.one, {**known, t.q: 1}, label1))

    def head(t, known):
        if isinstance(t, Leaf):
            return tail(T2, known, t.label)
        if t.q in known:
            return head(t.child(known[t.q]), known)
        return Node(t.q, head(t.zero, {**known, t.q: 0}), head(t.one, {**known, t.q: 1}))

    return head(T1, {})


def all_trees(variables: Sequence[int], max_depth: int) -> Iterator:
    """Every unlabeled query tree of depth <= max_depth with no repeated variable on a path."""
    yield Leaf(None)
    if max_depth == 0:
        return
    for pos, v in enumerate(variables):
        rest = list(variables[:pos]) + list(variables[pos + 1 :])
        subs = list(all_trees(rest, max_depth - 1))
        for a in subs:
            for b in subs:
                yield Node(v, a, b)


def tree_computes(T, f: TruthTable) -> bool:
    return all(run_tree(T, j)[0] == f(j) for j in range(1 << f.n))


def tree_truth_table(T, n: int, alphabet: int) -> TruthTable:
    return TruthTable.from_function(n, lambda bits: run_tree(T, bits)[0], alphabet)


__all__ = [
    "ArityError",
    "Leaf",
    "Node",
    "DecisionTree",
    "DepthEngine",
    "tree_depth",
    "run_tree",
    "depth",
    "optimal_tree",
    "multitask_cost",
    "extract_adversary",
    "compose_trees",
    "play",
    "all_trees",
    "to_bits",
]
