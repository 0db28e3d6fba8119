"""Economic cost functions: axiom checking, the C* example, random generation.

An integer table C on {0,1}^l is an economic cost function when
  (1) C(X) >= 0, with C(X) = 0 exactly at X = 0;
  (2) X <= Y implies C(X) <= C(Y);
  (3) C(X | Y) <= C(X) + C(Y).

C* (zero, then 1 on weights 1-2, then 2 on weight 3) satisfies these but is
not the multitask cost of any three Boolean functions: two functions costing
one query together must both be the same single variable, and pairing each
with the third forces all three onto one variable, so all three would cost 1.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .costs import CostTable, format_bits, popcount

MAX_VALIDATE = 12


@dataclass
class Violation:
    axiom: int
    X: int
    Y: int | None
    detail: str


@dataclass
class ValidationReport:
    l: int
    violations: list = field(default_factory=list)
    counts: dict = field(default_factory=lambda: {1: 0, 2: 0, 3: 0})

    @property
    def passes(self) -> bool:
        return not self.violations

    def failed_axioms(self) -> list[int]:
        return sorted({v.axiom for v in self.violations})

    def lines(self) -> list[str]:
        failed = self.failed_axioms()
        passed = [ax for ax in (1, 2, 3) if ax not in failed]
        out = []
        if passed:
            word = "axioms" if len(passed) > 1 else "axiom"
            out.append(f"{word} {''.join(f'({ax})' for ax in passed)}: pass")
        for v in self.violations:
            out.append(f"axiom ({v.axiom}): FAIL ({self.counts[v.axiom]} violations) witness {v.detail}")
        return out

    def to_json(self) -> dict:
        return {
            "l": self.l,
            "passes": self.passes,
            "violations": [
                {
                    "axiom": v.axiom,
                    "X": format_bits(v.X, self.l),
                    "Y": None if v.Y is None else format_bits(v.Y, self.l),
                    "count": self.counts[v.axiom],
                    "detail": v.detail,
                }
                for v in self.violations
            ],
        }


def validate_ecf(C: CostTable) -> ValidationReport:
    """Check all three axioms; each violated axiom is reported with one witness and a count."""
    l = C.l
    if l > MAX_VALIDATE:
        raise ValueError(f"l={l} exceeds validation limit {MAX_VALIDATE}")
    v = np.array(C.values, dtype=np.int64)
    size = 1 << l
    rep = ValidationReport(l)
    fmt = lambda X: format_bits(X, l)

    bad1 = [X for X in range(size) if v[X] < 0 or (v[X] == 0) != (X == 0)]
    rep.counts[1] = len(bad1)
    if bad1:
        X = bad1[0]
        rep.violations.append(Violation(1, X, None, f"X={fmt(X)} C(X)={v[X]}"))

    idx = np.arange(size)
    X, Y = np.meshgrid(idx, idx, indexing="ij")
    comparable = (X & ~Y) == 0
    bad2 = comparable & (v[X] > v[Y])
    rep.counts[2] = int(bad2.sum())
    if rep.counts[2]:
        x, y = (int(a) for a in np.argwhere(bad2)[0])
        rep.violations.append(Violation(2, x, y, f"X={fmt(x)} <= Y={fmt(y)} but C(X)={v[x]} > C(Y)={v[y]}"))

    bad3 = v[X | Y] > v[X] + v[Y]
    rep.counts[3] = int(bad3.sum())
    if rep.counts[3]:
        x, y = (int(a) for a in np.argwhere(bad3)[0])
        rep.violations.append(
            Violation(3, x, y, f"X={fmt(x)}, Y={fmt(y)}: C(X|Y)={v[x | y]} > {v[x]}+{v[y]}")
        )
    return rep


def is_ecf(C: CostTable) -> bool:
    return validate_ecf(C).passes


def cstar() -> CostTable:
    return CostTable(3, tuple({0: 0, 1: 1, 2: 1, 3: 2}[popcount(X)] for X in range(8)))


def closure(values, l: int) -> list[int]:
    """Monotone-subadditive closure: lower each entry to the cheapest cover or superset, to fixpoint.

    Only disjoint covers are scanned: once monotone, C(Y) + C(Z minus Y)
    bounds every overlapping cover Y | Z from below.
    """
    c = [int(x) for x in values]
    size = 1 << l
    changed = True
    while changed:
        changed = False
        for X in range(1, size):
            best = c[X]
            # supersets
            for Y in range(size):
                if X & ~Y == 0 and c[Y] < best:
                    best = c[Y]
            # covers X = Y | Z with Y, Z proper submasks
            Y = (X - 1) & X
            while Y:
                Z = X & ~Y
                if c[Y] + c[Z] < best:
                    best = c[Y] + c[Z]
                Y = (Y - 1) & X
            if best < c[X]:
                c[X] = best
                changed = True
    return c


def random_ecf(l: int, max_value: int, seed: int) -> CostTable:
    """Random ECF: uniform draws in [1, max_value] pushed through ``closure``."""
    if not 1 <= l <= 5:
        raise ValueError("random_ecf supports 1 <= l <= 5")
    if not 1 <= max_value <= 15:
        raise ValueError("random_ecf supports 1 <= max_value <= 15")
    rng = np.random.default_rng(seed)
    raw = [0] + [int(v) for v in rng.integers(1, max_value + 1, size=(1 << l) - 1)]
    c = closure(raw, l)
    c[0] = 0
    for i in range(l):
        c[1 << i] = max(c[1 << i], 1)
    return CostTable(l, tuple(c))
