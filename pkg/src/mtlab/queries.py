"""Query oracles and worst-case measurement for interactive strategies.

A strategy is any callable taking ``ask`` (1-based index -> bit) and
returning its answer.  Repeated questions about the same bit are free.
"""
from __future__ import annotations

from typing import Callable, Iterable


class Oracle:
    def __init__(self, y: int, offset: int = 0):
        self.y = y
        self.offset = offset
        self.seen: dict[int, int] = {}
        self.transcript: list[tuple[int, int]] = []

    def ask(self, i: int) -> int:
        b = self.seen.get(i)
        if b is None:
            b = self.y >> (i - 1 + self.offset) & 1
            self.seen[i] = b
            self.transcript.append((i, b))
        return b

    __call__ = ask

    @property
    def count(self) -> int:
        return len(self.seen)


def sub_asker(ask: Callable[[int], int], offset: int) -> Callable[[int], int]:
    """View of a block starting after ``offset`` bits of a larger input."""
    return lambda i: ask(offset + i)


def read_bits(ask: Callable[[int], int], start: int, width: int) -> int:
    """Read ``width`` bits at 1-based positions start..start+width-1, little-endian."""
    v = 0
    for t in range(width):
        v |= ask(start + t) << t
    return v


def run(strategy, y: int):
    """Run ``strategy`` on input ``y``; returns (answer, query count, transcript)."""
    o = Oracle(y)
    out = strategy(o.ask)
    return out, o.count, o.transcript


def worst_case(strategy, inputs: Iterable[int], check: Callable | None = None) -> int:
    """Max query count over ``inputs``; ``check(y, answer)`` must hold on each."""
    worst = 0
    for y in inputs:
        out, q, _ = run(strategy, y)
        if check is not None and not check(y, out):
            raise AssertionError(f"strategy answered {out!r} incorrectly on input {y}")
        worst = max(worst, q)
    return worst
