"""Truth tables for total functions {0,1}^n -> [alphabet].

Index convention used throughout the package: input ``j`` is the integer
whose bit ``i`` (0-based) is the value of variable ``x_{i+1}``.  Variable
indices in the public API are 1-based.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

MAX_ARITY = 24


def _dtype_for(alphabet: int):
    if alphabet <= 1 << 8:
        return np.uint8
    if alphabet <= 1 << 16:
        return np.uint16
    return np.uint32


def symbol_width(alphabet: int) -> int:
    """Bits per symbol in the hex serialization: ceil(log2(alphabet))."""
    return (alphabet - 1).bit_length()


class TruthTable:
    """Immutable truth table of a function on ``n`` Boolean inputs."""

    __slots__ = ("n", "alphabet", "_outputs", "_key")

    def __init__(self, n: int, alphabet: int, outputs):
        if not 0 <= n <= MAX_ARITY:
            raise ValueError(f"arity {n} outside [0, {MAX_ARITY}]")
        if alphabet < 1:
            raise ValueError("alphabet size must be positive")
        arr = np.asarray(outputs)
        if arr.shape != (1 << n,):
            raise ValueError(f"expected {1 << n} outputs, got shape {arr.shape}")
        if arr.size and (arr.min() < 0 or arr.max() >= alphabet):
            raise ValueError(f"output symbol outside [0, {alphabet})")
        arr = arr.astype(_dtype_for(alphabet), copy=True)
        arr.setflags(write=False)
        self.n = n
        self.alphabet = alphabet
        self._outputs = arr
        self._key = None

    @classmethod
    def from_function(cls, n: int, fn: Callable[[tuple], int], alphabet: int = 2) -> "TruthTable":
        """Tabulate ``fn(bits)`` where ``bits[i]`` is ``x_{i+1}``."""
        out = [fn(tuple((j >> i) & 1 for i in range(n))) for j in range(1 << n)]
        return cls(n, alphabet, out)

    @classmethod
    def constant(cls, n: int, value: int = 0, alphabet: int = 2) -> "TruthTable":
        return cls(n, alphabet, np.full(1 << n, value))

    @classmethod
    def variable(cls, n: int, i: int) -> "TruthTable":
        """The dictator function ``x_i`` on ``n`` bits."""
        _check_index(n, i)
        return cls(n, 2, (np.arange(1 << n) >> (i - 1)) & 1)

    @property
    def outputs(self) -> np.ndarray:
        return self._outputs

    @property
    def key(self) -> tuple:
        """Canonical hashable identity, used for memoization."""
        if self._key is None:
            self._key = (self.n, self.alphabet, self._outputs.tobytes())
        return self._key

    def __call__(self, x) -> int:
        return int(self._outputs[to_index(x)])

    def __eq__(self, other):
        if not isinstance(other, TruthTable):
            return NotImplemented
        return (self.n, self.alphabet) == (other.n, other.alphabet) and np.array_equal(
            self._outputs, other._outputs
        )

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        head = ",".join(str(v) for v in self._outputs[:16])
        more = ",..." if self._outputs.size > 16 else ""
        return f"TruthTable(n={self.n}, alphabet={self.alphabet}, outputs=[{head}{more}])"

    def to_json(self) -> dict:
        return {"n": self.n, "alphabet": self.alphabet, "outputs": pack_hex(self._outputs, self.alphabet)}

    @classmethod
    def from_json(cls, obj: dict) -> "TruthTable":
        n, alphabet = int(obj["n"]), int(obj["alphabet"])
        return cls(n, alphabet, unpack_hex(obj["outputs"], 1 << n, alphabet))


def pack_hex(symbols: np.ndarray, alphabet: int) -> str:
    """Pack symbols in index order, ``symbol_width`` bits each, little-endian."""
    w = symbol_width(alphabet)
    if w == 0:
        return ""
    sym = np.asarray(symbols, dtype=np.uint64)
    bits = ((sym[:, None] >> np.arange(w, dtype=np.uint64)) & 1).astype(np.uint8).ravel()
    return np.packbits(bits, bitorder="little").tobytes().hex()


def unpack_hex(text: str, count: int, alphabet: int) -> np.ndarray:
    w = symbol_width(alphabet)
    if w == 0:
        return np.zeros(count, dtype=np.int64)
    raw = np.frombuffer(bytes.fromhex(text), dtype=np.uint8)
    need = (count * w + 7) // 8
    if raw.size != need:
        raise ValueError(f"hex payload has {raw.size} bytes, expected {need}")
    bits = np.unpackbits(raw, bitorder="little")[: count * w].reshape(count, w).astype(np.int64)
    return (bits << np.arange(w)).sum(axis=1)


def to_index(x) -> int:
    """Input as an int index; accepts an int, a bit sequence, or a '0'/'1' string (x_1 first)."""
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, str):
        x = [int(c) for c in x]
    return sum(int(b) << i for i, b in enumerate(x))


def to_bits(j: int, n: int) -> tuple:
    return tuple((j >> i) & 1 for i in range(n))


def _check_index(n: int, i: int) -> None:
    if not 1 <= i <= n:
        raise IndexError(f"variable index {i} outside [1, {n}]")


def restrict_array(arr: np.ndarray, i0: int, b: int) -> np.ndarray:
    """Fix 0-based variable ``i0`` of a flat table to ``b``; remaining order kept."""
    return arr.reshape(-1, 2, 1 << i0)[:, b, :].ravel()


def restrict(f: TruthTable, i: int, b: int) -> TruthTable:
    """The (n-1)-variable function obtained by fixing ``x_i = b``."""
    _check_index(f.n, i)
    if b not in (0, 1):
        raise ValueError("bit must be 0 or 1")
    return TruthTable(f.n - 1, f.alphabet, restrict_array(f.outputs, i - 1, b))


def restrict_many(f: TruthTable, fixed: dict) -> TruthTable:
    """Apply several fixings ``{index: bit}`` (original 1-based indices) at once."""
    arr = f.outputs
    for i in sorted(fixed, reverse=True):
        _check_index(f.n, i)
        arr = restrict_array(arr, i - 1, fixed[i])
    return TruthTable(f.n - len(fixed), f.alphabet, arr)


def is_constant(f: TruthTable) -> bool:
    out = f.outputs
    return bool((out == out[0]).all())


@dataclass(frozen=True)
class Restriction:
    """Partial assignment of variables; ``fixed`` maps 1-based index -> bit."""

    n: int
    fixed: dict = field(default_factory=dict)

    def __post_init__(self):
        for i, b in self.fixed.items():
            _check_index(self.n, i)
            if b not in (0, 1):
                raise ValueError(f"bit for x_{i} must be 0 or 1")

    @classmethod
    def from_transcript(cls, n: int, transcript: Iterable[tuple]) -> "Restriction":
        fixed = {}
        for i, b in transcript:
            if fixed.get(i, b) != b:
                raise ValueError(f"transcript assigns x_{i} twice with different bits")
            fixed[i] = b
        return cls(n, fixed)

    def apply(self, f: TruthTable) -> TruthTable:
        if f.n != self.n:
            raise ValueError("restriction arity does not match function")
        return restrict_many(f, self.fixed)

    def masks(self) -> tuple[int, int]:
        """(fixed-position mask, fixed values) as 0-based bit masks."""
        mask = vals = 0
        for i, b in self.fixed.items():
            mask |= 1 << (i - 1)
            vals |= b << (i - 1)
        return mask, vals


class FunctionFamily:
    """Ordered collection of nonconstant Boolean functions on a common input."""

    def __init__(self, members: Sequence[TruthTable]):
        members = tuple(members)
        if not members:
            raise ValueError("a family needs at least one member")
        n = members[0].n
        for idx, f in enumerate(members, 1):
            if f.n != n:
                raise ValueError(f"member {idx} has arity {f.n}, expected {n}")
            if f.alphabet != 2:
                raise ValueError(f"member {idx} is not Boolean")
            if is_constant(f):
                raise ValueError(f"member {idx} is constant")
        self.n = n
        self.members = members

    @property
    def l(self) -> int:
        return len(self.members)

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __getitem__(self, i):
        return self.members[i]

    def __eq__(self, other):
        return isinstance(other, FunctionFamily) and self.members == other.members

    def to_json(self) -> dict:
        return {"n": self.n, "members": [f.to_json() for f in self.members]}

    @classmethod
    def from_json(cls, obj: dict) -> "FunctionFamily":
        fam = cls([TruthTable.from_json(m) for m in obj["members"]])
        if "n" in obj and int(obj["n"]) != fam.n:
            raise ValueError("family arity does not match its members")
        return fam


def bundle(F: FunctionFamily, X: int) -> TruthTable:
    """The tuple-valued function ``x -> (f_i(x) : X_i = 1)``.

    ``X`` is a mask with bit ``i-1`` set when ``f_i`` is selected; the value of
    the ``r``-th selected member lands in bit ``r`` of the output symbol.
    """
    if X <= 0:
        raise ValueError("bundle of the empty selection is undefined")
    if X >> F.l:
        raise ValueError(f"selection mask {X} exceeds family size {F.l}")
    selected = [i for i in range(F.l) if X >> i & 1]
    out = np.zeros(1 << F.n, dtype=np.int64)
    for rank, i in enumerate(selected):
        out |= F.members[i].outputs.astype(np.int64) << rank
    return TruthTable(F.n, 1 << len(selected), out)
