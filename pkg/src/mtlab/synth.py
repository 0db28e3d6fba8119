"""Synthesizing a function family whose multitask cost tracks a hitting-set cost.

Each universe element u owns an input block y_u read by a bin function.
Member i is 1 iff every bin of A_i holds the same single key.  Blocks are
concatenated in universe order.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .binlab import (
    BinFunction,
    InfeasibleError,
    LiftedAdversary,
    LiftedBin,
    as_fraction,
    bin_from_json,
    contents_strategy,
    membership_strategy,
    security,
    xor_lift,
)
from .boolfn import FunctionFamily, TruthTable
from .costs import format_bits
from .dtree import AdversaryStrategy, DepthEngine, default_engine, multitask_cost
from .ecf import validate_ecf
from .queries import Oracle, sub_asker
from .setsys import HittingSetSolver, WeightedSetSystem, hs_cost_table

MAX_FAMILY_ARITY = 20
MAX_LOWER_BOUND_ARITY = 8


class DegenerateFamilyError(ValueError):
    pass


@dataclass
class SynthesisSpec:
    A: WeightedSetSystem
    bins: dict  # universe id -> BinFunction
    M: int

    def __post_init__(self):
        missing = [u for u in self.A.universe if u not in self.bins]
        if missing:
            raise ValueError(f"no bin for universe element {missing[0]}")
        extra = set(self.bins) - set(self.A.universe)
        if extra:
            raise ValueError(f"bins given for unknown elements {sorted(extra)}")
        bad = [u for u in self.A.universe if self.bins[u].M != self.M]
        if bad:
            raise ValueError(f"bin {bad[0]} has key count {self.bins[bad[0]].M}, expected {self.M}")
        self.offsets = {}
        off = 0
        for u in self.A.universe:
            self.offsets[u] = off
            off += self.bins[u].arity
        self.arity = off

    def block_of(self, i: int) -> str:
        """Universe element owning 1-based global position i."""
        for u in self.A.universe:
            off = self.offsets[u]
            if off < i <= off + self.bins[u].arity:
                return u
        raise IndexError(f"position {i} outside 1..{self.arity}")

    def to_json(self) -> dict:
        return {
            "system": self.A.to_json(),
            "bins": {u: self.bins[u].to_json() for u in self.A.universe},
            "M": self.M,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SynthesisSpec":
        A = WeightedSetSystem.from_json(obj["system"])
        if obj.get("lift_by_weight"):
            spec = lift_bins_by_weight(bin_from_json(obj["base"]), A)
            if "M" in obj and int(obj["M"]) != spec.M:
                raise ValueError(f"M={obj['M']} disagrees with the base bin's key count {spec.M}")
            return spec
        bins = {u: bin_from_json(b) for u, b in obj["bins"].items()}
        return cls(A, bins, int(obj["M"]))


def lift_bins_by_weight(base: BinFunction, A: WeightedSetSystem) -> SynthesisSpec:
    """bin_u = xor_lift(base, w(u))."""
    return SynthesisSpec(A, {u: xor_lift(base, w) for u, w in zip(A.universe, A.weights)}, base.M)


def block_contents(spec: SynthesisSpec) -> dict:
    """u -> array over all global inputs of bin_u's contents."""
    n = spec.arity
    if n > MAX_FAMILY_ARITY:
        raise InfeasibleError(f"total arity {n} exceeds {MAX_FAMILY_ARITY}")
    idx = np.arange(1 << n, dtype=np.int64)
    out = {}
    for u in spec.A.universe:
        b = spec.bins[u]
        out[u] = b.contents_table()[(idx >> spec.offsets[u]) & ((1 << b.arity) - 1)]
    return out


def build_family(spec: SynthesisSpec) -> FunctionFamily:
    cont = block_contents(spec)
    n = spec.arity
    members = []
    for i, Ai in enumerate(spec.A.sets, 1):
        first = cont[Ai[0]]
        f = first != 0
        for u in Ai[1:]:
            f &= cont[u] == first
        if f.all() or not f.any():
            raise DegenerateFamilyError(f"member f_{i} is constant {int(f[0])}; bins of A_{i} are degenerate")
        members.append(TruthTable(n, 2, f.astype(np.uint8)))
    return FunctionFamily(members)


# ---------------------------------------------------------------- two-phase upper bound


class BinCosts:
    """Per-element contents and membership probes, built once per spec."""

    def __init__(self, spec: SynthesisSpec, engine: DepthEngine | None = None):
        engine = engine or default_engine()
        self.contents = {}
        self.member = {}
        cache = {}
        for u in spec.A.universe:
            b = spec.bins[u]
            if id(b) not in cache:
                cache[id(b)] = (
                    contents_strategy(b, engine),
                    {k: membership_strategy(b, k, engine) for k in range(1, b.M + 1)},
                )
            self.contents[u], self.member[u] = cache[id(b)]

    def T(self, u) -> int:
        return self.contents[u].worst

    def m(self, u) -> int:
        return max(p.worst for p in self.member[u].values())


@dataclass
class TwoPhaseResult:
    X: int
    hitting_set: tuple
    worst: int
    bound: int  # sum of T_u over the hitting set plus m_u' over every (i, u') pair
    strategy: object = field(repr=False, default=None)


def two_phase_solver(spec: SynthesisSpec, X: int, costs: BinCosts | None = None, family: FunctionFamily | None = None) -> TwoPhaseResult:
    """Compute contents of a min hitting set's bins, then test each selected member by membership queries.

    The worst case is measured over all 2^n inputs and every answer is
    checked against the family's truth tables.
    """
    if X <= 0 or X >> spec.A.l:
        raise ValueError("X must be a nonzero selection mask")
    costs = costs or BinCosts(spec)
    B, _ = HittingSetSolver(spec.A).solve(X)
    selected = [i for i in range(spec.A.l) if X >> i & 1]

    def strategy(ask):
        sub = {u: sub_asker(ask, spec.offsets[u]) for u in spec.A.universe}
        known = {u: costs.contents[u](sub[u]) for u in B}
        tested = {}

        def holds(u2, k):
            if u2 in known:
                return known[u2] == k
            if (u2, k) not in tested:
                tested[u2, k] = costs.member[u2][k](sub[u2])
            return tested[u2, k]

        out = []
        for i in selected:
            Ai = spec.A.sets[i]
            u = next(v for v in B if v in Ai)
            k = known[u]
            out.append(int(k != 0 and all(holds(u2, k) for u2 in Ai)))
        return tuple(out)

    family = family or build_family(spec)
    tables = [family[i].outputs for i in selected]
    worst = 0
    for y in range(1 << spec.arity):
        o = Oracle(y)
        got = strategy(o.ask)
        want = tuple(int(t[y]) for t in tables)
        if got != want:
            raise AssertionError(f"two-phase answer {got} != {want} on input {y}")
        worst = max(worst, o.count)
    bound = sum(costs.T(u) for u in B) + sum(costs.m(u2) for i in selected for u2 in spec.A.sets[i])
    return TwoPhaseResult(X, B, worst, bound, strategy)


# ---------------------------------------------------------------- lower-bound adversary


class CompositeAdversary(AdversaryStrategy):
    """Routes each query to the adversary of the bin owning it, which sees only its own block."""

    def __init__(self, spec: SynthesisSpec, per_bin: dict, budgets: dict, betas: dict):
        self.spec = spec
        self.per_bin = per_bin
        self.budgets = budgets
        self.betas = betas

    def answer(self, transcript, i):
        fixed = dict(transcript)
        if i in fixed:
            return fixed[i]
        u = self.spec.block_of(i)
        off = self.spec.offsets[u]
        local = [(p - off, b) for p, b in transcript if self.spec.block_of(p) == u]
        return self.per_bin[u].answer(local, i - off)


def bin_adversary(b: BinFunction, q: int) -> tuple[AdversaryStrategy, Fraction]:
    """Security-game adversary for budget q; lifted bins answer zeros until each block's critical query."""
    q = max(0, min(q, b.arity))
    if isinstance(b, LiftedBin):
        qb = q // b.c
        res = security(b.base, qb)
        return LiftedAdversary(res.adversary, b.c), res.beta
    res = security(b, q)
    return res.adversary, res.beta


def composite_adversary(spec: SynthesisSpec, budgets: dict | None = None, costs: BinCosts | None = None) -> CompositeAdversary:
    """Default budget per bin is one less than its measured contents cost."""
    if budgets is None:
        costs = costs or BinCosts(spec)
        budgets = {u: costs.T(u) - 1 for u in spec.A.universe}
    per_bin, betas = {}, {}
    cache = {}
    for u in spec.A.universe:
        b = spec.bins[u]
        key = (id(b), budgets[u])
        if key not in cache:
            cache[key] = bin_adversary(b, budgets[u])
        per_bin[u], betas[u] = cache[key]
    return CompositeAdversary(spec, per_bin, dict(budgets), betas)


def _nonconstant(tables, mask, vals, idx) -> bool:
    sel = ((idx ^ vals) & mask) == 0
    return any(t[sel].min() != t[sel].max() for t in tables)


def lower_bound_check(spec: SynthesisSpec, family: FunctionFamily, X: int, depth_limit: int, adv: CompositeAdversary) -> tuple[int, list]:
    """Play every query sequence of length <= depth_limit against ``adv``.

    Against a deterministic adversary a decision tree follows one such
    sequence.  Whenever the over-budget bins B_P do not hit every selected
    set, some selected member must still be non-constant.  Returns
    (sequences examined, failing transcripts).
    """
    n = spec.arity
    if n > MAX_LOWER_BOUND_ARITY:
        raise InfeasibleError(f"lower-bound enumeration needs total arity <= {MAX_LOWER_BOUND_ARITY}")
    selected = [i for i in range(spec.A.l) if X >> i & 1]
    tables = [family[i].outputs for i in selected]
    sets = [set(spec.A.sets[i]) for i in selected]
    idx = np.arange(1 << n, dtype=np.int64)
    failures, seen = [], 0

    def visit(transcript, mask, vals, counts):
        nonlocal seen
        seen += 1
        over = {u for u, c in counts.items() if c > adv.budgets[u]}
        if not all(over & S for S in sets) and not _nonconstant(tables, mask, vals, idx):
            failures.append(list(transcript))
        if len(transcript) == depth_limit:
            return
        for i in range(1, n + 1):
            bit = 1 << (i - 1)
            if mask & bit:
                continue
            a = adv.answer(transcript, i)
            u = spec.block_of(i)
            counts[u] = counts.get(u, 0) + 1
            transcript.append((i, a))
            visit(transcript, mask | bit, vals | (a << (i - 1)), counts)
            transcript.pop()
            counts[u] -= 1

    visit([], 0, 0, {})
    return seen, failures


# ---------------------------------------------------------------- sandwich report


@dataclass
class SandwichRow:
    X: int
    C_F: int
    C_A: int
    measured: int
    bound: int
    hitting_set: tuple
    lo: Fraction
    hi: Fraction
    in_band: bool
    upper_ok: bool
    covered: bool
    lb_sequences: int | None = None
    lb_failures: int | None = None

    @property
    def lb_ok(self) -> bool | None:
        return None if self.lb_failures is None else self.lb_failures == 0


@dataclass
class SandwichReport:
    l: int
    T: Fraction
    eps: Fraction
    rows: list
    cf_ecf_ok: bool
    cf_ecf_lines: list
    bins: list  # per-element dicts
    lb_note: str | None = None

    @property
    def uncovered(self) -> list[int]:
        return [r.X for r in self.rows if not r.covered]

    @property
    def upper_ok(self) -> bool:
        return all(r.upper_ok for r in self.rows)

    @property
    def lower_ok(self) -> bool:
        return all(r.lb_ok is not False for r in self.rows if r.covered)

    @property
    def band_failures(self) -> list[int]:
        return [r.X for r in self.rows if not r.in_band]

    @property
    def ok(self) -> bool:
        """Exact checks only; the epsilon band is reported but not enforced."""
        return self.upper_ok and self.cf_ecf_ok and self.lower_ok

    def to_json(self) -> dict:
        fmt = lambda X: format_bits(X, self.l)
        return {
            "T": str(self.T),
            "eps": str(self.eps),
            "rows": [
                {
                    "X": fmt(r.X),
                    "C_F": r.C_F,
                    "C_A": r.C_A,
                    "two_phase_measured": r.measured,
                    "two_phase_bound": r.bound,
                    "hitting_set": list(r.hitting_set),
                    "band": [str(r.lo), str(r.hi)],
                    "in_band": r.in_band,
                    "upper_ok": r.upper_ok,
                    "covered": r.covered,
                    "lower_bound_sequences": r.lb_sequences,
                    "lower_bound_failures": r.lb_failures,
                }
                for r in self.rows
            ],
            "C_F_is_ecf": self.cf_ecf_ok,
            "bins": self.bins,
            "uncovered": [fmt(X) for X in self.uncovered],
            "band_failures": [fmt(X) for X in self.band_failures],
            "lower_bound_note": self.lb_note,
            "ok": {"upper": self.upper_ok, "ecf": self.cf_ecf_ok, "lower": self.lower_ok},
        }

    def text(self) -> str:
        fmt = lambda X: format_bits(X, self.l)
        head = ["X", "C_F", "C_A", "P_X", "bound", "band", "in", "upper", "covered", "lower"]
        body = []
        for r in self.rows:
            lb = "-" if r.lb_ok is None else ("ok" if r.lb_ok else f"FAIL({r.lb_failures})")
            body.append([
                fmt(r.X), str(r.C_F), str(r.C_A), str(r.measured), str(r.bound),
                f"[{r.lo}, {r.hi}]", "y" if r.in_band else "n",
                "ok" if r.upper_ok else "FAIL", "y" if r.covered else "n", lb,
            ])
        widths = [max(len(row[c]) for row in [head, *body]) for c in range(len(head))]
        line = lambda row: "  ".join(s.ljust(w) for s, w in zip(row, widths)).rstrip()
        out = [line(head), *map(line, body)]
        out.append("bins: " + "; ".join(
            f"{b['id']} arity={b['arity']} T={b['T']} m={b['m']} q={b['budget']} beta={b['security']}" for b in self.bins
        ))
        out += ["C_F " + s for s in self.cf_ecf_lines]
        out.append("uncovered X: " + (", ".join(fmt(X) for X in self.uncovered) or "none"))
        out.append("band failures: " + (", ".join(fmt(X) for X in self.band_failures) or "none"))
        if self.lb_note:
            out.append("lower bound: " + self.lb_note)
        return "\n".join(out)


def _threshold_cleared(beta, size: int) -> bool:
    return beta is not None and beta > 1 - Fraction(1, size)


def verify_sandwich(
    spec: SynthesisSpec,
    T,
    eps,
    budgets: dict | None = None,
    engine: DepthEngine | None = None,
    workers: int = 1,
    lower_bound: bool = True,
) -> SandwichReport:
    """Brute-force C_F beside C_A, the two-phase upper bound and the adversary lower-bound game.

    X is covered by the lower-bound check when every bin of every selected
    set has measured security above 1 - 1/|A_i| at its budget.
    """
    T, eps = as_fraction(T), as_fraction(eps)
    engine = engine or default_engine()
    fam = build_family(spec)
    CF = multitask_cost(fam, engine, workers)
    CA = hs_cost_table(spec.A)
    costs = BinCosts(spec, engine)
    rep = validate_ecf(CF)

    adv, lb_note = None, None
    try:
        adv = composite_adversary(spec, budgets, costs)
    except InfeasibleError as e:
        lb_note = f"no adversary: {e}"
    if adv is not None and lower_bound and spec.arity > MAX_LOWER_BOUND_ARITY:
        lb_note = f"lower-bound game skipped: total arity {spec.arity} > {MAX_LOWER_BOUND_ARITY}"

    def row(X):
        tp = two_phase_solver(spec, X, costs, fam)
        ca = CA[X]
        lo, hi = (1 - eps) * T * ca, (1 + eps) * T * ca
        covered = adv is not None and all(
            _threshold_cleared(adv.betas[u], len(spec.A.sets[i]))
            for i in range(spec.A.l) if X >> i & 1
            for u in spec.A.sets[i]
        )
        r = SandwichRow(X, CF[X], ca, tp.worst, tp.bound, tp.hitting_set, lo, hi, lo <= CF[X] <= hi, CF[X] <= tp.worst, covered)
        if adv is not None and lower_bound and spec.arity <= MAX_LOWER_BOUND_ARITY:
            seen, fails = lower_bound_check(spec, fam, X, CF[X] - 1, adv)
            r.lb_sequences, r.lb_failures = seen, len(fails)
        return r

    masks = range(1, 1 << spec.A.l)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            rows = list(pool.map(row, masks))
    else:
        rows = [row(X) for X in masks]

    bins = [
        {
            "id": u,
            "arity": spec.bins[u].arity,
            "T": costs.T(u),
            "m": costs.m(u),
            "budget": None if adv is None else adv.budgets[u],
            "security": None if adv is None else str(adv.betas[u]),
        }
        for u in spec.A.universe
    ]
    return SandwichReport(spec.A.l, T, eps, rows, rep.passes, rep.lines(), bins, lb_note)


__all__ = [
    "SynthesisSpec",
    "DegenerateFamilyError",
    "build_family",
    "block_contents",
    "lift_bins_by_weight",
    "BinCosts",
    "two_phase_solver",
    "TwoPhaseResult",
    "CompositeAdversary",
    "composite_adversary",
    "bin_adversary",
    "lower_bound_check",
    "verify_sandwich",
    "SandwichReport",
    "SandwichRow",
]
