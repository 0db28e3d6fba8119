"""Slow, independent reference implementations used to cross-check the package."""
from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np


def brute_depth(outputs, n: int) -> int:
    """Unmemoized minimax over partial assignments (dicts), no canonicalization."""
    outputs = list(int(v) for v in outputs)

    def consistent(fixed):
        return [outputs[j] for j in range(1 << n) if all((j >> (i - 1)) & 1 == b for i, b in fixed.items())]

    def rec(fixed):
        vals = consistent(fixed)
        if len(set(vals)) <= 1:
            return 0
        return min(1 + max(rec({**fixed, i: 0}), rec({**fixed, i: 1})) for i in range(1, n + 1) if i not in fixed)

    return rec({})


def brute_hitting_weight(universe, weights, sets, X: int) -> int:
    chosen = [set(S) for i, S in enumerate(sets) if X >> i & 1]
    best = None
    for r in range(len(universe) + 1):
        for combo in itertools.combinations(range(len(universe)), r):
            picked = {universe[e] for e in combo}
            if all(picked & S for S in chosen):
                w = sum(weights[e] for e in combo)
                best = w if best is None else min(best, w)
    return best


def brute_is_ecf(values, l: int) -> bool:
    size = 1 << l
    for X in range(size):
        if (values[X] == 0) != (X == 0) or values[X] < 0:
            return False
        for Y in range(size):
            if X & ~Y == 0 and values[X] > values[Y]:
                return False
            if values[X | Y] > values[X] + values[Y]:
                return False
    return True


def keys_left(contents, arity: int, mask: int, vals: int) -> int:
    """Number of keys k such that some y matching the restriction has contents {k}."""
    return len({contents[y] for y in range(1 << arity) if (y ^ vals) & mask == 0} - {0})


def brute_keyset(contents_fn, arity: int, mask: int, vals: int) -> int:
    out = 0
    for y in range(1 << arity):
        if (y ^ vals) & mask == 0:
            c = contents_fn(y)
            if c:
                out |= 1 << (c - 1)
    return out


def _histories(n: int, q: int):
    """Every (ordered transcript, next query) an adversary may be asked about, within q queries."""
    out = []

    def rec(tr):
        if len(tr) == q:
            return
        used = {i for i, _ in tr}
        for i in range(1, n + 1):
            if i in used:
                continue
            out.append((tuple(tr), i))
            for b in (0, 1):
                rec(tr + [(i, b)])

    rec([])
    return out


@lru_cache(maxsize=None)
def game_outcomes(n: int, q: int) -> np.ndarray:
    """R[a, s] = restriction id reached when adversary a meets query sequence s.

    Adversaries range over every answer function on histories.  Restriction
    ids encode (mask, vals) as mask * 2^n + vals.  Rows that behave identically
    are merged, which does not change the max-min value.
    """
    hist = _histories(n, q)
    pos = {h: k for k, h in enumerate(hist)}
    seqs = list(itertools.permutations(range(1, n + 1), q))
    rows = set()
    for bits in itertools.product((0, 1), repeat=len(hist)):
        row = []
        for s in seqs:
            tr = []
            for i in s:
                tr.append((i, bits[pos[(tuple(tr), i)]]))
            mask = sum(1 << (i - 1) for i, _ in tr)
            vals = sum(b << (i - 1) for i, b in tr)
            row.append(mask * (1 << n) + vals)
        rows.add(tuple(row))
    return np.array(sorted(rows), dtype=np.int64)


def enumerated_security(contents, arity: int, M: int, q: int):
    """max over all adversary answer-functions of the min over query sequences of the keys left."""
    from fractions import Fraction

    R = game_outcomes(arity, q)
    h = np.zeros(1 << (2 * arity), dtype=np.int64)
    for mask in range(1 << arity):
        for vals in range(1 << arity):
            if vals & ~mask == 0:
                h[mask * (1 << arity) + vals] = keys_left(contents, arity, mask, vals)
    return Fraction(int(h[R].min(axis=1).max()), M)


def restricted_nonconstant(outputs, n: int, fixed: dict) -> bool:
    vals = {int(outputs[j]) for j in range(1 << n) if all((j >> (i - 1)) & 1 == b for i, b in fixed.items())}
    return len(vals) > 1
