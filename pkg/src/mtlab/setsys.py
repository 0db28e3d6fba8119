"""Weighted set systems, exact minimum-weight hitting sets, and realizing any ECF."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .costs import CostTable, format_bits
from .ecf import validate_ecf

# the solver memoizes on which sets are still unhit (2^l states), so |U| up to 2^MAX_SETS stays cheap;
# realizing an ECF with l sets needs 2^l - 1 elements
MAX_UNIVERSE = 256
MAX_SETS = 8


@dataclass(frozen=True)
class WeightedSetSystem:
    universe: tuple  # element ids, in a fixed order
    weights: tuple  # positive ints aligned with universe
    sets: tuple  # l tuples of element ids

    def __post_init__(self):
        object.__setattr__(self, "universe", tuple(str(u) for u in self.universe))
        object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))
        object.__setattr__(self, "sets", tuple(tuple(str(u) for u in A) for A in self.sets))
        if len(set(self.universe)) != len(self.universe):
            raise ValueError("duplicate element ids in universe")
        if len(self.weights) != len(self.universe):
            raise ValueError("one weight per universe element required")
        bad = [u for u, w in zip(self.universe, self.weights) if w < 1]
        if bad:
            raise ValueError(f"weights must be >= 1 (element {bad[0]})")
        if not self.sets:
            raise ValueError("at least one set required")
        known = set(self.universe)
        for i, A in enumerate(self.sets, 1):
            if not A:
                raise ValueError(f"set A_{i} is empty")
            missing = set(A) - known
            if missing:
                raise ValueError(f"set A_{i} has unknown elements {sorted(missing)}")

    @property
    def l(self) -> int:
        return len(self.sets)

    def index(self, u: str) -> int:
        return self.universe.index(u)

    def weight(self, u: str) -> int:
        return self.weights[self.index(u)]

    @property
    def weight_of(self) -> dict:
        return dict(zip(self.universe, self.weights))

    def hits(self) -> list[int]:
        """hits[e] = mask over sets containing universe element e."""
        out = [0] * len(self.universe)
        for i, A in enumerate(self.sets):
            for u in A:
                out[self.index(u)] |= 1 << i
        return out

    def to_json(self) -> dict:
        return {
            "universe": [{"id": u, "w": w} for u, w in zip(self.universe, self.weights)],
            "sets": [list(A) for A in self.sets],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "WeightedSetSystem":
        uni = obj["universe"]
        return cls(tuple(e["id"] for e in uni), tuple(e["w"] for e in uni), tuple(obj["sets"]))

    @classmethod
    def unit(cls, universe, sets) -> "WeightedSetSystem":
        universe = tuple(universe)
        return cls(universe, (1,) * len(universe), tuple(sets))


def intro_system() -> WeightedSetSystem:
    """All 2-element subsets of {u1, u2, u3} with unit weights."""
    return WeightedSetSystem.unit(("u1", "u2", "u3"), (("u1", "u2"), ("u1", "u3"), ("u2", "u3")))


class HittingSetSolver:
    """Exact branch-and-bound over one set system.

    ``opt(mask, start)`` is the least weight of elements with index >= start
    hitting every set in ``mask``; it branches on the elements of the
    lowest-numbered uncovered set and is memoized on (mask, start).  The
    lexicographically smallest optimal element tuple is then read off greedily.
    """

    def __init__(self, A: WeightedSetSystem):
        if len(A.universe) > MAX_UNIVERSE:
            raise ValueError(f"universe larger than {MAX_UNIVERSE}")
        self.A = A
        self.w = A.weights
        self.hit = A.hits()
        # members[i] = element indices of set i, ascending
        self.members = [sorted(A.index(u) for u in S) for S in A.sets]
        self._opt = lru_cache(maxsize=None)(self._opt_raw)

    def _opt_raw(self, mask: int, start: int) -> float:
        if mask == 0:
            return 0
        low = (mask & -mask).bit_length() - 1
        best = float("inf")
        for e in self.members[low]:
            if e < start:
                continue
            we = self.w[e]
            if we >= best:
                continue
            # elements below e may still serve other sets, so start is unchanged
            cand = we + self._opt(mask & ~self.hit[e], start)
            if cand < best:
                best = cand
        return best

    def solve(self, X: int) -> tuple[tuple, int]:
        if X <= 0:
            raise ValueError("hitting set of the empty selection is undefined")
        if X >> self.A.l:
            raise ValueError("selection mask exceeds number of sets")
        total = self._opt(X, 0)
        chosen = []
        mask, budget, start = X, total, 0
        while mask:
            for e in range(start, len(self.w)):
                if not self.hit[e] & mask:
                    continue
                rest = self._opt(mask & ~self.hit[e], e + 1)
                if self.w[e] + rest == budget:
                    chosen.append(e)
                    mask &= ~self.hit[e]
                    budget -= self.w[e]
                    start = e + 1
                    break
            else:
                raise AssertionError("greedy reconstruction failed")
        return tuple(self.A.universe[e] for e in chosen), int(total)


def min_hitting_set(A: WeightedSetSystem, X: int) -> tuple[tuple, int]:
    """Minimum-weight hitting set for {A_i : X_i = 1}: (element ids, weight)."""
    return HittingSetSolver(A).solve(X)


def hs_cost_table(A: WeightedSetSystem) -> CostTable:
    if A.l > MAX_SETS:
        raise ValueError(f"more than {MAX_SETS} sets")
    solver = HittingSetSolver(A)
    return CostTable(A.l, (0, *(solver.solve(X)[1] for X in range(1, 1 << A.l))))


def realize_ecf(C: CostTable) -> WeightedSetSystem:
    """Set system with C_A = C: one element b_X of weight C(X) per nonzero X, A_i = {b_X : X_i = 1}.

    The zero vector gets no element; weight C(0) = 0 is not allowed and b_0
    would lie in no set anyway.
    """
    rep = validate_ecf(C)
    if not rep.passes:
        raise ValueError("not an economic cost function: " + "; ".join(rep.lines()))
    if C.l > MAX_SETS:
        raise ValueError(f"l={C.l} exceeds {MAX_SETS}")
    ids = [f"b_{format_bits(X, C.l)}" for X in range(1, 1 << C.l)]
    weights = [C.values[X] for X in range(1, 1 << C.l)]
    sets = [[ids[X - 1] for X in range(1, 1 << C.l) if X >> i & 1] for i in range(C.l)]
    return WeightedSetSystem(tuple(ids), tuple(weights), tuple(tuple(s) for s in sets))
