"""Points and subsets of the Boolean cube {0,1}^n.

A point is encoded as an unsigned integer with bit ``i`` holding coordinate
``i`` (0-based).  Subsets are explicit membership bitmaps of length ``2**n``
indexed by that encoding.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator

import numpy as np

DEFAULT_MAX_N = 24


class CapacityError(Exception):
    """Raised when a dimension or size exceeds a configured cap."""


def max_dimension() -> int:
    """Cube cap, overridable through ``SEPCUBE_MAX_N``."""
    raw = os.environ.get("SEPCUBE_MAX_N")
    if raw is None:
        return DEFAULT_MAX_N
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"SEPCUBE_MAX_N must be an integer, got {raw!r}") from None


def check_dimension(n: int) -> None:
    cap = max_dimension()
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    if n > cap:
        raise CapacityError(f"dimension {n} exceeds cube cap {cap}")


def popcount(x: int) -> int:
    return bin(x).count("1")


@dataclass(frozen=True)
class CubePoint:
    n: int
    bits: int

    def __post_init__(self):
        # n = 0 is allowed: it is the empty block of a partition with n = 1
        if self.n:
            check_dimension(self.n)
        if not 0 <= self.bits < (1 << self.n):
            raise ValueError(f"bits {self.bits} out of range for n={self.n}")

    @classmethod
    def from_coords(cls, coords: Iterable[int]) -> "CubePoint":
        coords = list(coords)
        bits = 0
        for i, c in enumerate(coords):
            if c not in (0, 1):
                raise ValueError(f"coordinate {i} is {c!r}, expected 0 or 1")
            bits |= c << i
        return cls(len(coords), bits)

    @classmethod
    def parse(cls, text: str) -> "CubePoint":
        """Parse a 0/1 string, coordinate 1 first."""
        return cls.from_coords(int(ch) for ch in text.strip())

    def coords(self) -> tuple[int, ...]:
        return tuple((self.bits >> i) & 1 for i in range(self.n))

    @property
    def weight(self) -> int:
        return popcount(self.bits)

    def __str__(self) -> str:
        return "".join(str(c) for c in self.coords())


def enum_cube(n: int) -> Iterator[CubePoint]:
    """All ``2**n`` points in increasing integer encoding."""
    check_dimension(n)
    for bits in range(1 << n):
        yield CubePoint(n, bits)


def bits_of(codes: np.ndarray, n: int) -> np.ndarray:
    """``(len(codes), n)`` uint8 array of the coordinates of each encoded point."""
    codes = np.asarray(codes, dtype=np.int64)
    return ((codes[:, None] >> np.arange(n, dtype=np.int64)) & 1).astype(np.uint8)


def iter_cube_chunks(n: int, chunk: int = 1 << 16) -> Iterator[tuple[int, np.ndarray]]:
    """Yield ``(start, bits)`` blocks covering the cube in encoding order."""
    check_dimension(n)
    total = 1 << n
    for start in range(0, total, chunk):
        stop = min(start + chunk, total)
        yield start, bits_of(np.arange(start, stop, dtype=np.int64), n)


@lru_cache(maxsize=32)
def cube_table(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Read-only ``(coordinates, is_odd)`` arrays for the whole cube, cached."""
    check_dimension(n)
    bits = bits_of(np.arange(1 << n), n).astype(np.int64)
    odd = weights(n) % 2 == 1
    bits.setflags(write=False)
    odd.setflags(write=False)
    return bits, odd


def weights(n: int) -> np.ndarray:
    """Hamming weight of every point, in encoding order."""
    check_dimension(n)
    return np.bitwise_count(np.arange(1 << n, dtype=np.int64)).astype(np.int64)


class BoolSet:
    """A subset of {0,1}^n stored as a read-only boolean bitmap."""

    __slots__ = ("n", "mask")

    def __init__(self, n: int, mask):
        check_dimension(n)
        mask = np.array(mask, dtype=bool).reshape(-1)
        if mask.shape[0] != 1 << n:
            raise ValueError(f"bitmap has length {mask.shape[0]}, expected {1 << n}")
        mask.setflags(write=False)
        self.n = n
        self.mask = mask

    @classmethod
    def empty(cls, n: int) -> "BoolSet":
        check_dimension(n)
        return cls(n, np.zeros(1 << n, dtype=bool))

    @classmethod
    def full(cls, n: int) -> "BoolSet":
        check_dimension(n)
        return cls(n, np.ones(1 << n, dtype=bool))

    @classmethod
    def from_points(cls, n: int, points: Iterable) -> "BoolSet":
        """Build from integer encodings, CubePoints or 0/1 strings."""
        check_dimension(n)
        mask = np.zeros(1 << n, dtype=bool)
        for p in points:
            if isinstance(p, str):
                p = CubePoint.parse(p)
            if isinstance(p, CubePoint):
                if p.n != n:
                    raise ValueError(f"point of dimension {p.n} in a set of dimension {n}")
                p = p.bits
            if not 0 <= p < 1 << n:
                raise ValueError(f"point {p} out of range for n={n}")
            mask[p] = True
        return cls(n, mask)

    @classmethod
    def from_int(cls, n: int, value: int) -> "BoolSet":
        """Bitmap given as a Python integer; bit ``k`` is membership of point ``k``."""
        check_dimension(n)
        size = 1 << n
        if not 0 <= value < 1 << size:
            raise ValueError("bitmap integer out of range")
        raw = np.frombuffer(value.to_bytes((size + 7) // 8, "little"), dtype=np.uint8)
        return cls(n, np.unpackbits(raw, bitorder="little")[:size])

    def __contains__(self, p) -> bool:
        if isinstance(p, CubePoint):
            if p.n != self.n:
                return False
            p = p.bits
        return bool(self.mask[p])

    def __len__(self) -> int:
        return int(self.mask.sum())

    def __iter__(self) -> Iterator[int]:
        return iter(int(k) for k in np.flatnonzero(self.mask))

    def points(self) -> list[CubePoint]:
        return [CubePoint(self.n, k) for k in self]

    def _check(self, other: "BoolSet") -> None:
        if not isinstance(other, BoolSet):
            raise TypeError(f"expected BoolSet, got {type(other).__name__}")
        if other.n != self.n:
            raise ValueError(f"dimension mismatch: {self.n} vs {other.n}")

    def __eq__(self, other) -> bool:
        if not isinstance(other, BoolSet):
            return NotImplemented
        return self.n == other.n and bool(np.array_equal(self.mask, other.mask))

    def __hash__(self):
        return hash((self.n, self.mask.tobytes()))

    def __or__(self, other: "BoolSet") -> "BoolSet":
        self._check(other)
        return BoolSet(self.n, self.mask | other.mask)

    def __and__(self, other: "BoolSet") -> "BoolSet":
        self._check(other)
        return BoolSet(self.n, self.mask & other.mask)

    def __xor__(self, other: "BoolSet") -> "BoolSet":
        self._check(other)
        return BoolSet(self.n, self.mask ^ other.mask)

    def __sub__(self, other: "BoolSet") -> "BoolSet":
        self._check(other)
        return BoolSet(self.n, self.mask & ~other.mask)

    def complement(self) -> "BoolSet":
        return BoolSet(self.n, ~self.mask)

    __invert__ = complement

    def to_text(self) -> str:
        body = np.where(self.mask, ord("1"), ord("0")).astype(np.uint8).tobytes().decode()
        return f"SET {self.n}\n{body}\n"

    def __repr__(self) -> str:
        if self.n <= 4:
            body = ", ".join(str(p) for p in self.points())
            return f"BoolSet(n={self.n}, {{{body}}})"
        return f"BoolSet(n={self.n}, size={len(self)})"


def odd_set(n: int) -> BoolSet:
    """Points of odd Hamming weight."""
    return BoolSet(n, weights(n) % 2 == 1)


def weight2_set(n: int) -> BoolSet:
    """Points with exactly two ones."""
    if n < 2:
        raise ValueError("weight-2 points need n >= 2")
    return BoolSet(n, weights(n) == 2)


def parse_boolset(text: str) -> BoolSet:
    """Read the two-line ``SET n`` / bitmap format."""
    from .polytope import ParseError

    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise ParseError("empty set file", 1)
    head = lines[0].split()
    if len(head) != 2 or head[0] != "SET":
        raise ParseError(f"expected 'SET n', got {lines[0]!r}", 1)
    try:
        n = int(head[1])
    except ValueError:
        raise ParseError(f"bad dimension {head[1]!r}", 1) from None
    check_dimension(n)
    body = "".join(lines[1:])
    if len(body) != 1 << n:
        raise ParseError(f"bitmap has {len(body)} characters, expected {1 << n}", 2)
    if set(body) - {"0", "1"}:
        raise ParseError("bitmap must contain only 0 and 1", 2)
    return BoolSet(n, np.frombuffer(body.encode(), dtype=np.uint8) == ord("1"))


def read_boolset(path) -> BoolSet:
    with open(path) as fh:
        return parse_boolset(fh.read())


def write_boolset(path, s: BoolSet) -> None:
    with open(path, "w") as fh:
        fh.write(s.to_text())


@dataclass(frozen=True)
class CoordPartition:
    """Split of the coordinates [0, n) into two blocks ``x1`` and ``x2``."""

    n: int
    x1: tuple[int, ...]
    x2: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.x1 + self.x2) != list(range(self.n)):
            raise ValueError("x1 and x2 must partition range(n)")

    @classmethod
    def halves(cls, n: int) -> "CoordPartition":
        """First ceil(n/2) coordinates versus the rest (empty when n = 1)."""
        check_dimension(n)
        k = (n + 1) // 2
        return cls(n, tuple(range(k)), tuple(range(k, n)))

    @classmethod
    def from_first_block(cls, n: int, x1: Iterable[int]) -> "CoordPartition":
        x1 = tuple(sorted(set(x1)))
        return cls(n, x1, tuple(i for i in range(n) if i not in x1))

    @property
    def n1(self) -> int:
        """Number of points of the first sub-cube."""
        return 1 << len(self.x1)

    @property
    def n2(self) -> int:
        return 1 << len(self.x2)


def _gather(bits: int, idx: tuple[int, ...]) -> int:
    out = 0
    for j, i in enumerate(idx):
        out |= ((bits >> i) & 1) << j
    return out


def _scatter(bits: int, idx: tuple[int, ...]) -> int:
    out = 0
    for j, i in enumerate(idx):
        out |= ((bits >> j) & 1) << i
    return out


def split_point(sigma: CubePoint, part: CoordPartition) -> tuple[CubePoint, CubePoint]:
    """Restrict ``sigma`` to the two blocks of ``part``."""
    if sigma.n != part.n:
        raise ValueError(f"point has dimension {sigma.n}, partition {part.n}")
    return (
        CubePoint(len(part.x1), _gather(sigma.bits, part.x1)),
        CubePoint(len(part.x2), _gather(sigma.bits, part.x2)),
    )


def join_point(s1: CubePoint, s2: CubePoint, part: CoordPartition) -> CubePoint:
    if s1.n != len(part.x1) or s2.n != len(part.x2):
        raise ValueError("restriction sizes do not match the partition")
    return CubePoint(part.n, _scatter(s1.bits, part.x1) | _scatter(s2.bits, part.x2))


def split_codes(part: CoordPartition) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized :func:`split_point` over the whole cube.

    Returns arrays ``(c1, c2)`` with ``c1[k]`` / ``c2[k]`` the sub-cube codes of
    point ``k``.
    """
    codes = np.arange(1 << part.n, dtype=np.int64)
    c1 = np.zeros_like(codes)
    c2 = np.zeros_like(codes)
    for j, i in enumerate(part.x1):
        c1 |= ((codes >> i) & 1) << j
    for j, i in enumerate(part.x2):
        c2 |= ((codes >> i) & 1) << j
    return c1, c2
