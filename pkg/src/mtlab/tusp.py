"""Search problems over {0,1,*}^n, total unique ones (TUSPs), and their query complexity.

Pattern position ``p`` (0-based) constrains variable ``x_{p+1}``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .boolfn import TruthTable, to_index
from .queries import Oracle

MAX_CLASSIFY = 20
MAX_DEPTH_TUSP = 14
MAX_UDNF = 16


class NotATuspError(ValueError):
    pass


class UdnfError(ValueError):
    def __init__(self, message: str, x: int, n: int):
        super().__init__(f"{message} (input {''.join(str(x >> i & 1) for i in range(n))})")
        self.x = x


def agrees(w: str, x) -> bool:
    """True iff every fixed position of ``w`` matches ``x`` (int index, bit string or sequence)."""
    if not isinstance(x, (int, np.integer)) and len(x) != len(w):
        raise ValueError("witness and input lengths differ")
    care, vals = _masks(w)
    return (to_index(x) ^ vals) & care == 0


def _masks(w: str) -> tuple[int, int]:
    care = vals = 0
    for p, c in enumerate(w):
        if c == "1":
            care |= 1 << p
            vals |= 1 << p
        elif c == "0":
            care |= 1 << p
        elif c != "*":
            raise ValueError(f"bad witness character {c!r} in {w!r}")
    return care, vals


@dataclass
class Classification:
    total: bool
    unique: bool
    not_total_at: int | None = None
    not_unique_at: int | None = None

    @property
    def is_tusp(self) -> bool:
        return self.total and self.unique

    def to_json(self, n: int) -> dict:
        fmt = lambda x: None if x is None else "".join(str(x >> i & 1) for i in range(n))
        return {
            "total": self.total,
            "unique": self.unique,
            "not_total_at": fmt(self.not_total_at),
            "not_unique_at": fmt(self.not_unique_at),
        }


class SearchProblem:
    def __init__(self, n: int, witnesses: Sequence[str]):
        witnesses = tuple(witnesses)
        if len(set(witnesses)) != len(witnesses):
            raise ValueError("duplicate witness patterns")
        for w in witnesses:
            if len(w) != n:
                raise ValueError(f"witness {w!r} does not have length {n}")
        self.n = n
        self.witnesses = witnesses
        pairs = [_masks(w) for w in witnesses]
        self.care = [c for c, _ in pairs]
        self.vals = [v for _, v in pairs]
        self._cls = None

    def __len__(self):
        return len(self.witnesses)

    def __eq__(self, other):
        return isinstance(other, SearchProblem) and self.n == other.n and set(self.witnesses) == set(other.witnesses)

    def __repr__(self):
        return f"SearchProblem(n={self.n}, witnesses={list(self.witnesses)})"

    def to_json(self) -> dict:
        return {"n": self.n, "witnesses": list(self.witnesses)}

    @classmethod
    def from_json(cls, obj) -> "SearchProblem":
        if isinstance(obj, list):
            if not obj:
                raise ValueError("empty witness list needs an explicit n")
            return cls(len(obj[0]), obj)
        return cls(int(obj["n"]), obj["witnesses"])

    def agree_counts(self) -> np.ndarray:
        idx = np.arange(1 << self.n, dtype=np.int64)
        counts = np.zeros(1 << self.n, dtype=np.int32)
        for c, v in zip(self.care, self.vals):
            counts += ((idx ^ v) & c) == 0
        return counts

    def index_of(self, x: int) -> int | None:
        """Position of the first witness agreeing with input index ``x``."""
        for k, (c, v) in enumerate(zip(self.care, self.vals)):
            if (x ^ v) & c == 0:
                return k
        return None

    def index_table(self) -> TruthTable:
        """TruthTable x -> position of W(x) in ``witnesses`` (TUSPs only)."""
        require_tusp(self)
        idx = np.arange(1 << self.n, dtype=np.int64)
        out = np.zeros(1 << self.n, dtype=np.int64)
        for k, (c, v) in enumerate(zip(self.care, self.vals)):
            out[((idx ^ v) & c) == 0] = k
        return TruthTable(self.n, max(len(self), 1), out)


def classify(W: SearchProblem) -> Classification:
    if W.n > MAX_CLASSIFY:
        raise ValueError(f"arity {W.n} exceeds classify limit {MAX_CLASSIFY}")
    if W._cls is None:
        counts = W.agree_counts()
        zero = np.flatnonzero(counts == 0)
        many = np.flatnonzero(counts > 1)
        W._cls = Classification(
            total=zero.size == 0,
            unique=many.size == 0,
            not_total_at=int(zero[0]) if zero.size else None,
            not_unique_at=int(many[0]) if many.size else None,
        )
    return W._cls


def require_tusp(W: SearchProblem) -> None:
    c = classify(W)
    if not c.is_tusp:
        bits = lambda x: "".join(str(x >> i & 1) for i in range(W.n))
        why = []
        if not c.total:
            why.append(f"input {bits(c.not_total_at)} agrees with no witness")
        if not c.unique:
            why.append(f"input {bits(c.not_unique_at)} agrees with several witnesses")
        raise NotATuspError("not a TUSP: " + "; ".join(why))


def s_of(W: SearchProblem) -> int:
    """Largest number of fixed positions in any witness."""
    if not W.witnesses:
        raise ValueError("s is undefined for an empty witness set")
    return max(bin(c).count("1") for c in W.care)


def tusp_eval(W: SearchProblem, x) -> str:
    require_tusp(W)
    return W.witnesses[W.index_of(to_index(x))]


def depth_tusp(W: SearchProblem) -> int:
    """Exact D(W) by minimax over restrictions.

    A restriction is a leaf once some witness has every fixed position
    queried and matching.  Only coordinates fixed by a live witness are
    worth querying.
    """
    require_tusp(W)
    if W.n > MAX_DEPTH_TUSP:
        raise ValueError(f"arity {W.n} exceeds depth_tusp limit {MAX_DEPTH_TUSP}")
    care, vals = W.care, W.vals
    memo: dict = {}

    def value(mask: int, fixed: int) -> int:
        key = (mask, fixed)
        hit = memo.get(key)
        if hit is not None:
            return hit
        open_coords = 0
        for c, v in zip(care, vals):
            if (fixed ^ v) & c & mask == 0:
                rest = c & ~mask
                if rest == 0:
                    memo[key] = 0
                    return 0
                open_coords |= rest
        best = bin(open_coords).count("1")
        todo = open_coords
        while todo:
            bit = todo & -todo
            todo ^= bit
            d0 = value(mask | bit, fixed)
            if 1 + d0 >= best:
                continue
            d1 = value(mask | bit, fixed | bit)
            if 1 + max(d0, d1) < best:
                best = 1 + max(d0, d1)
                if best == 1:
                    break
        memo[key] = best
        return best

    return value(0, 0)


class QuadraticSolver:
    """Phase algorithm: repeatedly pick a live witness and query all its active coordinates.

    The phase witness is the live one with most active coordinates (ties to
    listed order).  Each phase removes at least one active coordinate from
    every live witness of a unique problem, so there are at most s phases.
    """

    def __init__(self, W: SearchProblem):
        self.W = W

    def __call__(self, ask) -> str | None:
        W = self.W
        known: dict[int, int] = {}
        while True:
            live, best, best_active = [], None, 0
            for k, w in enumerate(W.witnesses):
                if any(known.get(p + 1, int(c)) != int(c) for p, c in enumerate(w) if c != "*"):
                    continue
                live.append(k)
                active = [p + 1 for p, c in enumerate(w) if c != "*" and p + 1 not in known]
                if len(active) > best_active:
                    best, best_active = active, len(active)
            if best is None:
                return W.witnesses[live[0]] if live else None
            for i in best:
                known[i] = ask(i)

    def run(self, x) -> tuple[str | None, list[tuple[int, int]]]:
        o = Oracle(to_index(x))
        out = self(o.ask)
        return out, o.transcript


def solve_quadratic(W: SearchProblem) -> tuple[QuadraticSolver, int]:
    """The phase solver and its measured worst-case query count over all inputs."""
    solver = QuadraticSolver(W)
    worst = 0
    for x in range(1 << W.n):
        o = Oracle(x)
        out = solver(o.ask)
        k = W.index_of(x)
        if out is None:
            assert k is None, "solver reported no match on a matching input"
        else:
            assert agrees(out, x), "solver returned a non-agreeing witness"
        worst = max(worst, o.count)
    return solver, worst


def triangular(s: int) -> int:
    return s * (s + 1) // 2


@dataclass(frozen=True)
class Dnf:
    """OR of clauses; a clause is a tuple of (1-based variable, negated) literals."""

    clauses: tuple = field(default_factory=tuple)

    def __post_init__(self):
        norm = []
        for cl in self.clauses:
            lits = tuple((int(v), bool(neg)) for v, neg in cl)
            if not lits:
                raise ValueError("empty clause")
            if len({v for v, _ in lits}) != len(lits):
                raise ValueError(f"clause {lits} repeats a variable")
            norm.append(lits)
        object.__setattr__(self, "clauses", tuple(norm))

    def sat_matrix(self, n: int) -> np.ndarray:
        """Boolean array [clause, input] of satisfaction."""
        idx = np.arange(1 << n, dtype=np.int64)
        rows = []
        for cl in self.clauses:
            ok = np.ones(1 << n, dtype=bool)
            for v, neg in cl:
                if not 1 <= v <= n:
                    raise ValueError(f"literal variable {v} outside [1, {n}]")
                bit = (idx >> (v - 1)) & 1
                ok &= bit == (0 if neg else 1)
            rows.append(ok)
        return np.array(rows).reshape(len(rows), 1 << n)

    def pattern(self, k: int, n: int) -> str:
        out = ["*"] * n
        for v, neg in self.clauses[k]:
            out[v - 1] = "0" if neg else "1"
        return "".join(out)

    def to_json(self) -> list:
        return [[{"v": v, "neg": neg} for v, neg in cl] for cl in self.clauses]

    @classmethod
    def from_json(cls, obj) -> "Dnf":
        return cls(tuple(tuple((lit["v"], lit["neg"]) for lit in cl) for cl in obj))

    @classmethod
    def from_patterns(cls, patterns: Sequence[str]) -> "Dnf":
        return cls(
            tuple(tuple((p + 1, c == "0") for p, c in enumerate(w) if c != "*") for w in patterns)
        )


def udnf_to_tusp(F1: Dnf, F2: Dnf, n: int) -> SearchProblem:
    """One witness per clause of either formula; verified to be a TUSP before returning.

    F1 and F2 must be unambiguous and every input must satisfy exactly one of them.
    """
    if n > MAX_UDNF:
        raise ValueError(f"arity {n} exceeds limit {MAX_UDNF}")
    s1, s2 = F1.sat_matrix(n).sum(axis=0), F2.sat_matrix(n).sum(axis=0)
    for name, s in (("F1", s1), ("F2", s2)):
        bad = np.flatnonzero(s > 1)
        if bad.size:
            raise UdnfError(f"{name} is ambiguous: an input satisfies {int(s[bad[0]])} clauses", int(bad[0]), n)
    both = np.flatnonzero((s1 > 0) & (s2 > 0))
    if both.size:
        raise UdnfError("F1 and F2 are both satisfied, so they are not complements", int(both[0]), n)
    neither = np.flatnonzero((s1 == 0) & (s2 == 0))
    if neither.size:
        raise UdnfError("neither F1 nor F2 is satisfied, so they are not complements", int(neither[0]), n)
    pats = [F1.pattern(k, n) for k in range(len(F1.clauses))] + [F2.pattern(k, n) for k in range(len(F2.clauses))]
    W = SearchProblem(n, pats)
    require_tusp(W)
    return W


def random_partition(n: int, rng: np.random.Generator, keep: float = 1.0, max_free: int | None = None) -> list[str]:
    """Random partition of {0,1}^n into subcubes, grown greedily from random points.

    Each coordinate is freed with probability ``keep`` when the grown cube
    stays inside the uncovered region; no cube gets more than ``max_free``
    free coordinates.
    """
    if max_free is None:
        max_free = n
    uncovered = np.ones(1 << n, dtype=bool)
    idx = np.arange(1 << n, dtype=np.int64)
    pats = []
    while uncovered.any():
        pts = np.flatnonzero(uncovered)
        p = int(pts[rng.integers(pts.size)])
        care = (1 << n) - 1
        for c in rng.permutation(n):
            if n - bin(care).count("1") >= max_free:
                break
            if rng.random() > keep:
                continue
            trial = care & ~(1 << int(c))
            cube = ((idx ^ p) & trial) == 0
            if uncovered[cube].all():
                care = trial
        cube = ((idx ^ p) & care) == 0
        uncovered[cube] = False
        pats.append("".join("*" if not care >> q & 1 else str(p >> q & 1) for q in range(n)))
    return pats


@dataclass
class GapResult:
    W: SearchProblem
    s: int
    D: int
    tried: int

    @property
    def gap(self) -> int:
        return self.D - self.s


def find_gap_tusp(n: int, seed: int, budget: int = 200) -> GapResult | None:
    """Random search for a TUSP with D(W) > s(W), built from random uDNF pairs.

    Candidates are random subcube partitions split into a formula and its
    complement; each is certified through ``udnf_to_tusp`` and measured
    exactly.  Returns the largest gap found, or None.
    """
    if not 1 <= n <= 12:
        raise ValueError("find_gap_tusp supports 1 <= n <= 12")
    rng = np.random.default_rng(seed)
    best = None
    for t in range(budget):
        # low-dimensional cubes are where small gaps live
        keep = float(rng.uniform(0.5, 1.0))
        max_free = int(rng.integers(1, max(2, n - 1)))
        pats = random_partition(n, rng, keep, max_free)
        side = rng.integers(0, 2, size=len(pats))
        f1 = Dnf.from_patterns([p for p, b in zip(pats, side) if b and p != "*" * n])
        f2 = Dnf.from_patterns([p for p, b in zip(pats, side) if not b and p != "*" * n])
        if "*" * n in pats:
            continue
        W = udnf_to_tusp(f1, f2, n)
        s, D = s_of(W), depth_tusp(W)
        if D > s and (best is None or D - s > best.gap):
            best = GapResult(W, s, D, t + 1)
    if best is not None:
        best.tried = budget
    return best
