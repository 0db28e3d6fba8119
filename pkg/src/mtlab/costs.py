"""Cost tables over bundles X in {0,1}^l and bit-vector helpers.

A bundle ``X`` is stored as an int whose bit ``i-1`` is ``X_i``; the string
form ``"110"`` lists ``X_1 X_2 X_3`` left to right.
"""
from __future__ import annotations

from dataclasses import dataclass


def parse_bits(text: str) -> int:
    if not text or set(text) - {"0", "1"}:
        raise ValueError(f"not a bit string: {text!r}")
    return sum(1 << i for i, c in enumerate(text) if c == "1")


def format_bits(X: int, l: int) -> str:
    return "".join(str(X >> i & 1) for i in range(l))


def popcount(x: int) -> int:
    return bin(x).count("1")


def is_leq(X: int, Y: int) -> bool:
    """Coordinatewise X <= Y."""
    return X & ~Y == 0


@dataclass(frozen=True)
class CostTable:
    l: int
    values: tuple

    def __post_init__(self):
        if self.l < 0:
            raise ValueError("l must be nonnegative")
        vals = tuple(int(v) for v in self.values)
        if len(vals) != 1 << self.l:
            raise ValueError(f"expected {1 << self.l} values, got {len(vals)}")
        object.__setattr__(self, "values", vals)

    def __getitem__(self, X):
        if isinstance(X, str):
            X = parse_bits(X.ljust(self.l, "0"))
        return self.values[X]

    def to_json(self) -> dict:
        return {"l": self.l, "values": list(self.values)}

    @classmethod
    def from_json(cls, obj: dict) -> "CostTable":
        return cls(int(obj["l"]), tuple(obj["values"]))
