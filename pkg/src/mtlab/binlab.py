"""Weak exposure-resilient functions, bin functions and mystery-bin certification.

Keys are 1..M; a bin's contents are encoded as 0 (empty) or the key.  Bin
inputs ``y`` are ints with bit ``i-1`` holding ``y_i``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable

import numpy as np

from .boolfn import TruthTable
from .dtree import AdversaryStrategy, DepthEngine, default_engine, run_tree, tree_depth
from .queries import read_bits
from .tusp import SearchProblem, depth_tusp, require_tusp, s_of, solve_quadratic

log = logging.getLogger(__name__)

MAX_WERF = 16
MAX_TABLE = 20
MAX_GAME_STATES = 3_000_000


class InfeasibleError(ValueError):
    pass


class WerfSearchError(RuntimeError):
    pass


def _popcount(x: int) -> int:
    return bin(x).count("1")


# ---------------------------------------------------------------- wERFs


@dataclass(frozen=True)
class Werf:
    """A map {0,1}^m -> [d]; entry ``table[b]`` is J(b) with b read little-endian."""

    m: int
    d: int
    table: tuple

    def __post_init__(self):
        tab = tuple(int(v) for v in self.table)
        if len(tab) != 1 << self.m:
            raise ValueError(f"wERF table needs {1 << self.m} entries")
        if any(not 1 <= v <= self.d for v in tab):
            raise ValueError(f"wERF values must lie in 1..{self.d}")
        object.__setattr__(self, "table", tab)

    def __call__(self, b: int) -> int:
        return self.table[b]

    def to_json(self) -> dict:
        return {"m": self.m, "d": self.d, "table": list(self.table)}

    @classmethod
    def from_json(cls, obj: dict) -> "Werf":
        return cls(int(obj["m"]), int(obj["d"]), tuple(obj["table"]))


@dataclass
class WerfCheck:
    ok: bool
    c: int | None = None
    S: tuple | None = None  # 1-based coordinates forced to zero

    def __bool__(self):
        return self.ok


def verify_werf(J: Werf, t: int) -> WerfCheck:
    """Every value c has, for every S with |S| <= t, a preimage vanishing on S.

    For each c the preimage indicator is closed upward under inclusion
    (subset-OR transform), so S is coverable iff the complement of S is.
    Cost is O(d * m * 2^m).
    """
    m = J.m
    if m > MAX_WERF:
        raise InfeasibleError(f"m={m} exceeds {MAX_WERF}")
    size = 1 << m
    full = size - 1
    tab = np.array(J.table)
    idx = np.arange(size)
    pop = np.array([_popcount(i) for i in range(size)])
    small = pop <= t
    for c in range(1, J.d + 1):
        z = tab == c
        for i in range(m):
            v = z.reshape(-1, 2, 1 << i)
            v[:, 1, :] |= v[:, 0, :]
        bad = np.flatnonzero(small & ~z[full ^ idx])
        if bad.size:
            S = int(bad[0])
            return WerfCheck(False, c, tuple(i + 1 for i in range(m) if S >> i & 1))
    return WerfCheck(True)


def parity_werf(m: int) -> Werf:
    """J(b) = 1 + parity(b); an (m, 2, m-1)-wERF."""
    if m < 1:
        raise ValueError("m must be >= 1")
    return Werf(m, 2, tuple(1 + _popcount(b) % 2 for b in range(1 << m)))


def claim_bound(m: int, d: int, t: int) -> dict:
    """Failure probability of a uniform random J: per (S, c), and union over |S| = t and c."""
    p = (1 - 1 / d) ** (2 ** (m - t))
    return {"p_S_c": p, "union": math.comb(m, t) * d * p, "expression": f"(1 - 1/{d})^(2^({m}-{t}))"}


def sample_werf(m: int, d: int, t: int, seed: int, max_tries: int = 100) -> tuple[Werf, int]:
    """Draw uniform J until one verifies; returns (J, tries used)."""
    if d > 1 << m:
        raise ValueError(f"d={d} > 2^m={1 << m}: no surjection exists")
    if m > MAX_WERF:
        raise InfeasibleError(f"m={m} exceeds {MAX_WERF}")
    bound = claim_bound(m, d, t)
    log.info("wERF search m=%d d=%d t=%d: p_S,c = %s = %.3g, union bound %.3g", m, d, t, bound["expression"], bound["p_S_c"], bound["union"])
    rng = np.random.default_rng(seed)
    for tries in range(1, max_tries + 1):
        J = Werf(m, d, tuple(int(v) for v in rng.integers(1, d + 1, size=1 << m)))
        if verify_werf(J, t):
            return J, tries
    raise WerfSearchError(
        f"no ({m},{d},{t})-wERF in {max_tries} tries; per-(S,c) failure probability "
        f"{bound['expression']} = {bound['p_S_c']:.3g}, union bound {bound['union']:.3g}"
    )


def random_werf(m: int, d: int, t: int, seed: int, max_tries: int = 100) -> Werf:
    return sample_werf(m, d, t, seed, max_tries)[0]


# ---------------------------------------------------------------- bins


@dataclass
class Probe:
    """An interactive strategy (ask -> answer) with its measured worst-case query count."""

    run: Callable
    worst: int
    detail: dict = field(default_factory=dict)

    def __call__(self, ask):
        return self.run(ask)


class BinFunction:
    arity: int
    M: int

    def contents(self, y: int) -> int:
        raise NotImplementedError

    def consistent_keys(self, mask: int, vals: int) -> int:
        """Bitmask (bit k-1) of keys k with some y matching the restriction and contents {k}."""
        raise NotImplementedError

    def contents_table(self) -> np.ndarray:
        if self.arity > MAX_TABLE:
            raise InfeasibleError(f"arity {self.arity} too large to tabulate")
        cached = getattr(self, "_table", None)
        if cached is None:
            cached = np.array([self.contents(y) for y in range(1 << self.arity)], dtype=np.int64)
            self._table = cached
        return cached

    def game_key(self, mask: int, vals: int):
        """Memo key for the security game; restrictions with equal keys have equal value."""
        return mask, vals

    def game_size(self, q: int) -> int:
        return game_states(self.arity, q)

    def to_json(self) -> dict:
        raise NotImplementedError


class TableBin(BinFunction):
    def __init__(self, arity: int, M: int, contents):
        tab = tuple(int(v) for v in contents)
        if len(tab) != 1 << arity:
            raise ValueError(f"table bin needs {1 << arity} entries")
        if M < 1 or any(not 0 <= v <= M for v in tab):
            raise ValueError(f"contents must lie in 0..{M}")
        if arity > MAX_TABLE:
            raise InfeasibleError(f"arity {arity} too large for a table bin")
        self.arity, self.M, self.table = arity, M, tab
        self._table = np.array(tab, dtype=np.int64)
        self._full = (1 << arity) - 1
        self._keys = lru_cache(maxsize=None)(self._keys_raw)

    def contents(self, y: int) -> int:
        return self.table[y]

    def _keys_raw(self, mask, vals):
        if mask == self._full:
            c = self.table[vals]
            return 1 << (c - 1) if c else 0
        free = ~mask & self._full
        bit = free & -free
        return self._keys(mask | bit, vals) | self._keys(mask | bit, vals | bit)

    def consistent_keys(self, mask, vals):
        return self._keys(mask, vals & mask)

    def __eq__(self, other):
        return isinstance(other, TableBin) and (self.arity, self.M, self.table) == (other.arity, other.M, other.table)

    def __repr__(self):
        return f"TableBin(arity={self.arity}, M={self.M}, contents={list(self.table)})"

    def to_json(self) -> dict:
        return {"kind": "table", "arity": self.arity, "M": self.M, "contents": list(self.table)}


class StructuredBin(BinFunction):
    """y = (x, WtK, KtW): a key k is in the bin iff J(WtK entry of W(x)) = k and KtW entry k decodes to W(x).

    WtK has one J.m-bit entry per witness, witnesses ordered lexicographically;
    KtW has one r-bit entry per key with r = ceil(log2 |W|), value v decoding
    to witness number v mod |W|.
    """

    def __init__(self, W: SearchProblem, J: Werf, M: int):
        require_tusp(W)
        if len(W) < 2:
            raise ValueError("a structured bin needs at least two witnesses")
        if M != J.d:
            raise ValueError(f"key count M={M} must equal the wERF range d={J.d}")
        self.W, self.J, self.M = W, J, M
        self.order = sorted(W.witnesses)
        self.nw = len(self.order)
        self.r = (self.nw - 1).bit_length()
        self.mx = W.n
        self.wtk_start = self.mx + 1
        self.ktw_start = self.mx + self.nw * J.m + 1
        self.arity = self.mx + self.nw * J.m + M * self.r
        self.ordered = SearchProblem(W.n, self.order)
        self._care = self.ordered.care
        self._vals = self.ordered.vals
        self._xmask = (1 << self.mx) - 1
        self._wtk_keys = lru_cache(maxsize=None)(self._wtk_keys_raw)
        self._ktw_wits = lru_cache(maxsize=None)(self._ktw_wits_raw)

    def wtk_pos(self, j: int) -> int:
        return self.wtk_start + j * self.J.m

    def ktw_pos(self, k: int) -> int:
        return self.ktw_start + (k - 1) * self.r

    def witness_index(self, x: int) -> int:
        return self.ordered.index_of(x)

    def contents(self, y: int) -> int:
        j = self.witness_index(y & self._xmask)
        b = (y >> (self.wtk_pos(j) - 1)) & ((1 << self.J.m) - 1)
        k = self.J(b)
        v = (y >> (self.ktw_pos(k) - 1)) & ((1 << self.r) - 1)
        return k if v % self.nw == j else 0

    def _wtk_keys_raw(self, fm, fv):
        tab = np.array(self.J.table)
        idx = np.arange(1 << self.J.m)
        out = 0
        for c in np.unique(tab[(idx & fm) == fv]):
            out |= 1 << (int(c) - 1)
        return out

    def _ktw_wits_raw(self, fm, fv):
        out = 0
        for v in range(1 << self.r):
            if v & fm == fv:
                out |= 1 << (v % self.nw)
        return out

    def consistent_keys(self, mask, vals):
        vals &= mask
        xm, xv = mask & self._xmask, vals & self._xmask
        em = (1 << self.J.m) - 1
        rm = (1 << self.r) - 1
        dec = []
        for k in range(1, self.M + 1):
            sh = self.ktw_pos(k) - 1
            dec.append(self._ktw_wits((mask >> sh) & rm, (vals >> sh) & rm))
        out = 0
        for j in range(self.nw):
            if (xv ^ self._vals[j]) & self._care[j] & xm:
                continue
            sh = self.wtk_pos(j) - 1
            keys = self._wtk_keys((mask >> sh) & em, (vals >> sh) & em)
            for k in range(1, self.M + 1):
                if keys >> (k - 1) & 1 and dec[k - 1] >> j & 1:
                    out |= 1 << (k - 1)
        return out

    def layout(self) -> dict:
        return {
            "x": [1, self.mx],
            "wtK": [self.wtk_start, self.nw * self.J.m, self.J.m],
            "KtW": [self.ktw_start, self.M * self.r, self.r],
            "witness_order": self.order,
        }

    def __repr__(self):
        return f"StructuredBin(arity={self.arity}, M={self.M}, witnesses={self.order})"

    def to_json(self) -> dict:
        return {
            "kind": "structured",
            "M": self.M,
            "n": self.mx,
            "witnesses": list(self.W.witnesses),
            "werf": self.J.to_json(),
            "layout": self.layout(),
        }


class LiftedBin(BinFunction):
    """contents(y') = base.contents(z) with z_i the parity of the i-th block of c bits."""

    def __init__(self, base: BinFunction, c: int):
        if c < 1:
            raise ValueError("lift factor must be >= 1")
        self.base, self.c = base, c
        self.arity = base.arity * c
        self.M = base.M
        self._block = (1 << c) - 1

    def parities(self, y: int) -> int:
        z = 0
        for i in range(self.base.arity):
            z |= (_popcount((y >> (i * self.c)) & self._block) & 1) << i
        return z

    def contents(self, y: int) -> int:
        return self.base.contents(self.parities(y))

    def consistent_keys(self, mask, vals):
        bm = bv = 0
        for i in range(self.base.arity):
            if (mask >> (i * self.c)) & self._block == self._block:
                bm |= 1 << i
                bv |= (_popcount((vals >> (i * self.c)) & self._block) & 1) << i
        return self.base.consistent_keys(bm, bv)

    def game_key(self, mask, vals):
        # inside an unfinished block only the count matters: its parity is still open
        counts = []
        bm = bv = 0
        for i in range(self.base.arity):
            m = (mask >> (i * self.c)) & self._block
            counts.append(_popcount(m))
            if m == self._block:
                bm |= 1 << i
                bv |= (_popcount((vals >> (i * self.c)) & self._block) & 1) << i
        return tuple(counts), bm, bv

    def game_size(self, q):
        return min(game_states(self.arity, q), (self.c + 2) ** self.base.arity)

    def __repr__(self):
        return f"LiftedBin(c={self.c}, base={self.base!r})"

    def to_json(self) -> dict:
        return {"kind": "lifted", "c": self.c, "base": self.base.to_json()}


def bin_from_json(obj: dict) -> BinFunction:
    kind = obj.get("kind")
    if kind == "table":
        return TableBin(int(obj["arity"]), int(obj["M"]), obj["contents"])
    if kind == "structured":
        W = SearchProblem(int(obj["n"]), obj["witnesses"])
        b = StructuredBin(W, Werf.from_json(obj["werf"]), int(obj["M"]))
        if "layout" in obj and obj["layout"] != b.layout():
            raise ValueError("structured bin layout does not match its parts")
        return b
    if kind == "lifted":
        return LiftedBin(bin_from_json(obj["base"]), int(obj["c"]))
    raise ValueError(f"unknown bin kind {kind!r}")


def build_mystery_bin(W: SearchProblem, J: Werf, M: int) -> StructuredBin:
    return StructuredBin(W, J, M)


def xor_lift(b: BinFunction, c: int) -> BinFunction:
    if c < 1:
        raise ValueError("lift factor must be >= 1")
    if c == 1:
        return b
    return LiftedBin(b, c)


# ---------------------------------------------------------------- strategies


def _tree_probe(f: TruthTable, engine: DepthEngine, label_map=lambda v: v) -> Probe:
    T = engine.optimal_tree(f)

    def run(ask):
        t = T
        while not hasattr(t, "label"):
            t = t.child(ask(t.q))
        return label_map(t.label)

    return Probe(run, tree_depth(T), {"tree": T})


def _block_asker(ask, c):
    def ask_block(i):
        z = 0
        for t in range(1, c + 1):
            z ^= ask((i - 1) * c + t)
        return z

    return ask_block


def _x_solver(b: StructuredBin, engine: DepthEngine, use_tree: bool | None):
    """Strategy returning the ordered witness number of W(x), plus its worst case."""
    if use_tree is None:
        use_tree = b.mx <= 12
    if use_tree:
        p = _tree_probe(b.ordered.index_table(), engine)
        return p.run, p.worst
    solver, worst = solve_quadratic(b.ordered)
    return (lambda ask: b.order.index(solver(ask))), worst


def contents_strategy(b: BinFunction, engine: DepthEngine | None = None, use_tree: bool | None = None) -> Probe:
    """Strategy computing the bin contents, with measured worst-case query count."""
    engine = engine or default_engine()
    if isinstance(b, TableBin):
        return _tree_probe(TruthTable(b.arity, b.M + 1, b._table), engine)
    if isinstance(b, LiftedBin):
        base = contents_strategy(b.base, engine, use_tree)
        return Probe(lambda ask: base.run(_block_asker(ask, b.c)), b.c * base.worst, {"base": base})
    if isinstance(b, StructuredBin):
        solve_x, x_worst = _x_solver(b, engine, use_tree)

        def run(ask):
            j = solve_x(ask)
            k = b.J(read_bits(ask, b.wtk_pos(j), b.J.m))
            v = read_bits(ask, b.ktw_pos(k), b.r)
            return k if v % b.nw == j else 0

        return Probe(run, x_worst + b.J.m + b.r, {"x": x_worst, "wtK": b.J.m, "KtW": b.r})
    raise TypeError(f"no contents strategy for {type(b).__name__}")


def membership_strategy(b: BinFunction, k: int, engine: DepthEngine | None = None) -> Probe:
    """Strategy deciding whether contents(y) = {k}, with measured worst-case query count."""
    engine = engine or default_engine()
    if not 1 <= k <= b.M:
        raise ValueError(f"key {k} outside 1..{b.M}")
    if isinstance(b, TableBin):
        ind = (b._table == k).astype(np.int64)
        return _tree_probe(TruthTable(b.arity, 2, ind), engine, bool)
    if isinstance(b, LiftedBin):
        base = membership_strategy(b.base, k, engine)
        return Probe(lambda ask: base.run(_block_asker(ask, b.c)), b.c * base.worst, {"base": base})
    if isinstance(b, StructuredBin):

        def run(ask):
            j = read_bits(ask, b.ktw_pos(k), b.r) % b.nw
            if b.J(read_bits(ask, b.wtk_pos(j), b.J.m)) != k:
                return False
            w = b.order[j]
            return all(ask(p + 1) == int(ch) for p, ch in enumerate(w) if ch != "*")

        reachable = k in b.J.table
        x_part = max(_popcount(c) for c in b._care) if reachable else 0
        return Probe(run, b.r + b.J.m + x_part, {"KtW": b.r, "wtK": b.J.m, "x": x_part})
    raise TypeError(f"no membership strategy for {type(b).__name__}")


# ---------------------------------------------------------------- security game


class BinAdversary(AdversaryStrategy):
    """Answers with the bit whose child state has the larger game value (ties to 0).

    Keeping the game value from dropping is all an optimal adversary needs,
    so no table is stored up front; values come from the solved game's memo
    and are extended on demand.  Zeros past the budget.
    """

    def __init__(self, value, q: int):
        self._value = value
        self.q = q

    def answer(self, transcript, i):
        fixed = dict(transcript)
        if i in fixed:
            return fixed[i]
        if len(fixed) >= self.q:
            return 0
        mask = vals = 0
        for p, bit in fixed.items():
            mask |= 1 << (p - 1)
            vals |= bit << (p - 1)
        bit = 1 << (i - 1)
        rem = self.q - len(fixed) - 1
        return 1 if self._value(mask | bit, vals | bit, rem) > self._value(mask | bit, vals, rem) else 0


class LiftedAdversary(AdversaryStrategy):
    """Zeros inside a block until its last (critical) query, which sets the block parity
    to the base adversary's answer given the critical answers so far."""

    def __init__(self, base: AdversaryStrategy, c: int):
        self.base, self.c = base, c

    def answer(self, transcript, i):
        fixed = dict(transcript)
        if i in fixed:
            return fixed[i]
        c = self.c
        blk = (i - 1) // c
        count = {}
        parity = {}
        base_transcript = []
        for p, bit in transcript:
            bl = (p - 1) // c
            count[bl] = count.get(bl, 0) + 1
            parity[bl] = parity.get(bl, 0) ^ bit
            if count[bl] == c:
                base_transcript.append((bl + 1, parity[bl]))
        if count.get(blk, 0) < c - 1:
            return 0
        z = self.base.answer(base_transcript, blk + 1)
        return z ^ parity.get(blk, 0)


@dataclass
class SecurityResult:
    q: int
    keys: int  # number of keys the adversary keeps consistent
    M: int
    adversary: BinAdversary

    @property
    def beta(self) -> Fraction:
        return Fraction(self.keys, self.M)

    def table(self, arity: int) -> dict:
        """Materialize the adversary as {(mask, vals, i): bit} over every state with fewer than q bits fixed."""
        out = {}
        for mask in range(1 << arity):
            if _popcount(mask) >= self.q:
                continue
            sub = mask
            while True:
                tr = [(p + 1, sub >> p & 1) for p in range(arity) if mask >> p & 1]
                for i in range(1, arity + 1):
                    if not mask >> (i - 1) & 1:
                        out[(mask, sub, i)] = self.adversary.answer(tr, i)
                if sub == 0:
                    break
                sub = (sub - 1) & mask
        return out


def game_states(n: int, q: int) -> int:
    return sum(math.comb(n, j) * 2**j for j in range(q + 1))


def security(b: BinFunction, q: int) -> SecurityResult:
    """Exact max-over-adversaries min-over-strategies fraction of keys left consistent after q queries.

    Querier picks an index, adversary picks the bit; the value depends only
    on the set of fixed bits, reduced further by ``b.game_key``.
    """
    n = b.arity
    if not 0 <= q <= n:
        raise ValueError(f"q={q} outside [0, {n}]")
    if b.game_size(q) > MAX_GAME_STATES:
        raise InfeasibleError(f"security game with arity {n}, q={q} is too large")
    full = (1 << n) - 1
    memo: dict = {}

    def value(mask, vals, rem):
        key = b.game_key(mask, vals)
        hit = memo.get(key)
        if hit is not None:
            return hit
        h = _popcount(b.consistent_keys(mask, vals))
        if rem == 0 or h == 0:
            memo[key] = h
            return h
        best = h
        free = full & ~mask
        while free and best:
            bit = free & -free
            free ^= bit
            v = value(mask | bit, vals, rem - 1)
            if v < best:
                v = max(v, value(mask | bit, vals | bit, rem - 1))
                best = min(best, v)
        memo[key] = best
        return best

    keys = value(0, 0, q)
    return SecurityResult(q, keys, b.M, BinAdversary(value, q))


# ---------------------------------------------------------------- MBF certification


@dataclass
class MbfReport:
    T: Fraction
    delta: Fraction
    contents_worst: int
    membership_worst: dict
    q: int
    beta: Fraction
    ok_i: bool
    ok_ii: bool
    ok_iii: bool

    @property
    def ok(self) -> bool:
        return self.ok_i and self.ok_ii and self.ok_iii

    def lines(self) -> list[str]:
        mark = lambda ok: "pass" if ok else "FAIL"
        worst_k = max(self.membership_worst.values())
        return [
            f"(i)   contents queries {self.contents_worst} <= T = {self.T}: {mark(self.ok_i)}",
            f"(ii)  membership queries max_k {worst_k} <= delta*T = {self.delta * self.T}: {mark(self.ok_ii)}",
            f"(iii) security at q = {self.q}: {self.beta} >= 1 - delta = {1 - self.delta}: {mark(self.ok_iii)}",
        ]

    def to_json(self) -> dict:
        return {
            "T": str(self.T),
            "delta": str(self.delta),
            "contents_worst": self.contents_worst,
            "membership_worst": {str(k): v for k, v in self.membership_worst.items()},
            "q": self.q,
            "security": str(self.beta),
            "ok": {"i": self.ok_i, "ii": self.ok_ii, "iii": self.ok_iii},
        }


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    return Fraction(str(x))


def certify_mbf(b: BinFunction, T, delta, engine: DepthEngine | None = None) -> MbfReport:
    """Measure the three mystery-bin properties of ``b`` against (T, delta)."""
    T, delta = as_fraction(T), as_fraction(delta)
    cw = contents_strategy(b, engine).worst
    mw = {k: membership_strategy(b, k, engine).worst for k in range(1, b.M + 1)}
    q = math.floor((1 - delta) * T)
    q = max(0, min(q, b.arity))
    sec = security(b, q)
    return MbfReport(
        T,
        delta,
        cw,
        mw,
        q,
        sec.beta,
        ok_i=cw <= T,
        ok_ii=max(mw.values()) <= delta * T,
        ok_iii=sec.beta >= 1 - delta,
    )


__all__ = [
    "Werf",
    "verify_werf",
    "parity_werf",
    "random_werf",
    "sample_werf",
    "claim_bound",
    "BinFunction",
    "TableBin",
    "StructuredBin",
    "LiftedBin",
    "bin_from_json",
    "build_mystery_bin",
    "xor_lift",
    "contents_strategy",
    "membership_strategy",
    "security",
    "SecurityResult",
    "BinAdversary",
    "LiftedAdversary",
    "certify_mbf",
    "MbfReport",
    "depth_tusp",
    "s_of",
]
