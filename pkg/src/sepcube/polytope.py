"""Exact-rational linear constraints, H-polytopes, affine maps and extended
formulations, with the plain-text file formats used by the CLI.

All arithmetic is done with :class:`fractions.Fraction` or Python/NumPy
integers; floats are rejected at the boundary.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Optional, Sequence

import numpy as np

from .cube import BoolSet, CoordPartition, check_dimension, iter_cube_chunks

Rat = Fraction

# int64 evaluation is used only when every partial sum provably fits.
_INT64_SAFE = 1 << 62


class ParseError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class DimensionError(ValueError):
    pass


class Relation(str, Enum):
    LE = "<="
    EQ = "="
    GE = ">="


def to_rat(value) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings; floats are refused."""
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    if isinstance(value, str):
        return parse_rat(value)
    raise TypeError(f"cannot use {type(value).__name__} as an exact rational")


def parse_rat(token: str, line: int = 0) -> Fraction:
    token = token.strip()
    num, sep, den = token.partition("/")
    try:
        p = int(num)
        q = int(den) if sep else 1
    except ValueError:
        raise ParseError(f"not a rational number: {token!r}", line) from None
    if q == 0:
        raise ParseError(f"zero denominator in {token!r}", line)
    return Fraction(p, q)


def format_rat(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def rat_vector(values: Iterable) -> tuple[Fraction, ...]:
    return tuple(to_rat(v) for v in values)


def integer_scale(values: Sequence[Fraction]) -> tuple[list[int], int]:
    """Scale a rational vector to coprime integers; returns (ints, positive factor)."""
    lcm = math.lcm(*(v.denominator for v in values)) if values else 1
    if lcm == 1:
        ints = [v.numerator for v in values]
    else:
        ints = [v.numerator * (lcm // v.denominator) for v in values]
    g = math.gcd(*ints) if ints else 0
    if g > 1:
        ints = [i // g for i in ints]
    return ints, lcm


@dataclass(frozen=True)
class Evaluation:
    satisfied: bool
    slack: Fraction


@dataclass(frozen=True)
class LinConstraint:
    """``coeffs . x  REL  rhs`` with exact rational data."""

    coeffs: tuple[Fraction, ...]
    rel: Relation
    rhs: Fraction

    def __post_init__(self):
        object.__setattr__(self, "coeffs", rat_vector(self.coeffs))
        object.__setattr__(self, "rel", Relation(self.rel))
        object.__setattr__(self, "rhs", to_rat(self.rhs))

    @classmethod
    def le(cls, coeffs, rhs) -> "LinConstraint":
        return cls(coeffs, Relation.LE, rhs)

    @classmethod
    def ge(cls, coeffs, rhs) -> "LinConstraint":
        return cls(coeffs, Relation.GE, rhs)

    @classmethod
    def eq(cls, coeffs, rhs) -> "LinConstraint":
        return cls(coeffs, Relation.EQ, rhs)

    @property
    def dim(self) -> int:
        return len(self.coeffs)

    def slack(self, x: Sequence) -> Fraction:
        if len(x) != self.dim:
            raise DimensionError(f"point has dimension {len(x)}, constraint {self.dim}")
        return sum((a * to_rat(v) for a, v in zip(self.coeffs, x) if a), Fraction(0)) - self.rhs

    def evaluate(self, x: Sequence) -> Evaluation:
        s = self.slack(x)
        if self.rel is Relation.LE:
            ok = s <= 0
        elif self.rel is Relation.GE:
            ok = s >= 0
        else:
            ok = s == 0
        return Evaluation(ok, s)

    def integer_row(self) -> tuple[tuple[int, ...], int, bool]:
        """Normalized form ``(a, b, is_eq)`` meaning ``a.x <= b`` or ``a.x = b``.

        ``a`` and ``b`` are coprime integers; ``>=`` is negated into ``<=`` and
        equalities have their first nonzero coefficient positive.  A row with
        no variables is scaled so that ``b`` is -1, 0 or 1.
        """
        ints, _ = integer_scale(self.coeffs + (self.rhs,))
        if self.rel is Relation.GE:
            ints = [-v for v in ints]
        a, b = ints[:-1], ints[-1]
        if not any(a):
            b = (b > 0) - (b < 0)
        is_eq = self.rel is Relation.EQ
        if is_eq:
            lead = next((v for v in a if v), b)
            if lead < 0:
                a = [-v for v in a]
                b = -b
        return tuple(a), b, is_eq

    def normalized(self) -> "LinConstraint":
        a, b, is_eq = self.integer_row()
        return LinConstraint(a, Relation.EQ if is_eq else Relation.LE, b)

    def __str__(self) -> str:
        return " ".join([*(format_rat(a) for a in self.coeffs), self.rel.value, format_rat(self.rhs)])


def eval_constraint(c: LinConstraint, x: Sequence) -> Evaluation:
    return c.evaluate(x)


@dataclass(frozen=True)
class HPolytope:
    """Intersection of finitely many closed linear constraints in R^dim.

    The set may be empty or unbounded; neither is checked here.
    """

    dim: int
    constraints: tuple[LinConstraint, ...]
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "constraints", tuple(self.constraints))
        for k, c in enumerate(self.constraints):
            if c.dim != self.dim:
                raise DimensionError(
                    f"constraint {k} has dimension {c.dim}, polytope has {self.dim}"
                )

    def __len__(self) -> int:
        return len(self.constraints)

    @property
    def n_equalities(self) -> int:
        return sum(c.rel is Relation.EQ for c in self.constraints)

    @property
    def n_inequalities(self) -> int:
        return len(self.constraints) - self.n_equalities

    def contains(self, x: Sequence) -> bool:
        if len(x) != self.dim:
            raise DimensionError(f"point has dimension {len(x)}, polytope has {self.dim}")
        x = rat_vector(x)
        return all(c.evaluate(x).satisfied for c in self.constraints)

    @cached_property
    def _int_system(self):
        rows = [c.integer_row() for c in self.constraints]
        a = [r[0] for r in rows]
        b = [r[1] for r in rows]
        eq = np.array([r[2] for r in rows], dtype=bool)
        width = max((sum(abs(v) for v in row) for row in a), default=0)
        big = max((abs(v) for v in b), default=0)
        return a, b, eq, width, big

    def members(self, points: np.ndarray) -> np.ndarray:
        """Membership of many integer points at once (rows of ``points``)."""
        points = np.asarray(points)
        if points.ndim != 2 or points.shape[1] != self.dim:
            raise DimensionError(f"expected points of shape (k, {self.dim})")
        if not self.constraints:
            return np.ones(points.shape[0], dtype=bool)
        a, b, eq, width, big = self._int_system
        scale = int(np.abs(points).max()) if points.size else 0
        if width * scale < _INT64_SAFE and big < _INT64_SAFE:
            A = np.array(a, dtype=np.int64).reshape(len(a), self.dim)
            B = np.array(b, dtype=np.int64)
            lhs = points.astype(np.int64) @ A.T
        else:
            A = np.array(a, dtype=object).reshape(len(a), self.dim)
            B = np.array(b, dtype=object)
            lhs = points.astype(object) @ A.T
        if not eq.any():
            return np.all(lhs <= B, axis=1)
        return np.all(np.where(eq, lhs == B, lhs <= B), axis=1)

    def boolean_points(self, threads: int = 1) -> BoolSet:
        return boolean_points(self, threads=threads)

    def with_label(self, label: str) -> "HPolytope":
        return HPolytope(self.dim, self.constraints, label)

    def __str__(self) -> str:
        return format_hpoly(self)


def contains_point(P: HPolytope, x: Sequence) -> bool:
    return P.contains(x)


def boolean_points(P: HPolytope, threads: int = 1) -> BoolSet:
    """``P`` intersected with {0,1}^dim, by enumerating the whole cube."""
    check_dimension(P.dim)
    chunks = list(iter_cube_chunks(P.dim))
    mask = np.zeros(1 << P.dim, dtype=bool)

    def work(item):
        start, bits = item
        mask[start:start + bits.shape[0]] = P.members(bits)

    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(threads) as pool:
            list(pool.map(work, chunks))
    else:
        for item in chunks:
            work(item)
    return BoolSet(P.dim, mask)


def box(dim: int, lo=0, hi=1, label: str = "box") -> HPolytope:
    """The axis-parallel box [lo, hi]^dim."""
    cons = []
    for i in range(dim):
        e = [0] * dim
        e[i] = 1
        cons.append(LinConstraint.ge(e, lo))
        cons.append(LinConstraint.le(e, hi))
    return HPolytope(dim, cons, label)


@dataclass(frozen=True)
class AffineMap:
    """``x -> matrix @ x + offset`` from R^source_dim to R^target_dim."""

    matrix: tuple[tuple[Fraction, ...], ...]
    offset: tuple[Fraction, ...]
    source_dim: int = field(default=-1)

    def __post_init__(self):
        rows = tuple(rat_vector(r) for r in self.matrix)
        object.__setattr__(self, "matrix", rows)
        object.__setattr__(self, "offset", rat_vector(self.offset))
        if len(self.offset) != len(rows):
            raise DimensionError(f"{len(rows)} matrix rows but {len(self.offset)} offsets")
        m = self.source_dim
        if m < 0:
            if not rows:
                raise DimensionError("source dimension is required for a map with no rows")
            m = len(rows[0])
            object.__setattr__(self, "source_dim", m)
        for k, r in enumerate(rows):
            if len(r) != m:
                raise DimensionError(f"matrix row {k} has length {len(r)}, expected {m}")

    @property
    def target_dim(self) -> int:
        return len(self.matrix)

    @classmethod
    def identity(cls, n: int) -> "AffineMap":
        return cls(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)), (0,) * n, n)

    @classmethod
    def linear(cls, matrix) -> "AffineMap":
        matrix = [list(r) for r in matrix]
        return cls(matrix, (0,) * len(matrix))

    def apply(self, x: Sequence) -> tuple[Fraction, ...]:
        if len(x) != self.source_dim:
            raise DimensionError(f"point has dimension {len(x)}, map expects {self.source_dim}")
        x = rat_vector(x)
        return tuple(
            sum((a * v for a, v in zip(row, x) if a), Fraction(0)) + b
            for row, b in zip(self.matrix, self.offset)
        )


def apply_map(f: AffineMap, x: Sequence) -> tuple[Fraction, ...]:
    return f.apply(x)


@dataclass(frozen=True)
class ExtendedFormulation:
    """``P = pi(Q)`` for an H-polytope ``Q`` and an affine map ``pi``."""

    Q: HPolytope
    pi: AffineMap
    part: Optional[CoordPartition] = None

    def __post_init__(self):
        if self.pi.source_dim != self.Q.dim:
            raise DimensionError(
                f"map source dimension {self.pi.source_dim} differs from Q dimension {self.Q.dim}"
            )
        if self.part is not None and self.part.n != self.pi.target_dim:
            raise DimensionError("partition dimension differs from the map target dimension")

    @property
    def target_dim(self) -> int:
        return self.pi.target_dim


# ---------------------------------------------------------------- text formats

def format_hpoly(P: HPolytope) -> str:
    out = []
    if P.label:
        out.append(f"# label: {P.label}")
    out.append(f"HPOLY {P.dim} {len(P.constraints)}")
    out.extend(str(c) for c in P.constraints)
    return "\n".join(out) + "\n"


def format_amap(f: AffineMap) -> str:
    out = [f"AMAP {f.target_dim} {f.source_dim}"]
    out.extend(" ".join(format_rat(v) for v in row) for row in f.matrix)
    out.append(" ".join(format_rat(v) for v in f.offset))
    return "\n".join(out) + "\n"


def format_ef(ef: ExtendedFormulation) -> str:
    text = format_hpoly(ef.Q) + format_amap(ef.pi)
    if ef.part is not None:
        idx = " ".join(str(i + 1) for i in ef.part.x1)
        text += f"PART {len(ef.part.x1)} {idx}\n"
    return text


class _Lines:
    """Cursor over meaningful lines, remembering 1-based source line numbers."""

    def __init__(self, text: str):
        self.items = []
        label = ""
        for no, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if line.startswith("# label:"):
                label = line[len("# label:"):].strip()
            elif line and not line.startswith("#"):
                self.items.append((no, line))
        self.label = label
        self.pos = 0

    def next(self, what: str) -> tuple[int, str]:
        if self.pos >= len(self.items):
            last = self.items[-1][0] if self.items else 0
            raise ParseError(f"unexpected end of input, expected {what}", last + 1)
        item = self.items[self.pos]
        self.pos += 1
        return item

    def peek(self) -> Optional[tuple[int, str]]:
        return self.items[self.pos] if self.pos < len(self.items) else None


def _header(lines: _Lines, keyword: str, nargs: int) -> tuple[int, list[int]]:
    no, line = lines.next(f"'{keyword}' header")
    parts = line.split()
    if not parts or parts[0] != keyword or len(parts) != nargs + 1:
        raise ParseError(f"expected '{keyword}' header with {nargs} integers, got {line!r}", no)
    try:
        vals = [int(p) for p in parts[1:]]
    except ValueError:
        raise ParseError(f"non-integer in header {line!r}", no) from None
    if any(v < 0 for v in vals):
        raise ParseError("negative size in header", no)
    return no, vals


def _read_hpoly(lines: _Lines) -> HPolytope:
    _, (d, m) = _header(lines, "HPOLY", 2)
    cons = []
    for _ in range(m):
        no, line = lines.next("constraint row")
        parts = line.split()
        if len(parts) != d + 2:
            raise ParseError(f"expected {d} coefficients, a relation and a rhs", no)
        rel = parts[d]
        if rel not in ("<=", "=", ">="):
            raise ParseError(f"unknown relation {rel!r}", no)
        coeffs = [parse_rat(t, no) for t in parts[:d]]
        cons.append(LinConstraint(coeffs, Relation(rel), parse_rat(parts[d + 1], no)))
    return HPolytope(d, cons, lines.label)


def _read_amap(lines: _Lines) -> AffineMap:
    hno, (n, m) = _header(lines, "AMAP", 2)
    rows = []
    for _ in range(n + 1):
        no, line = lines.next("map row")
        parts = line.split()
        want = m if len(rows) < n else n
        if len(parts) != want:
            raise ParseError(f"expected {want} entries, got {len(parts)}", no)
        rows.append([parse_rat(t, no) for t in parts])
    try:
        return AffineMap(rows[:n], rows[n], m)
    except DimensionError as exc:
        raise ParseError(str(exc), hno) from None


def _expect_end(lines: _Lines) -> None:
    extra = lines.peek()
    if extra is not None:
        raise ParseError(f"trailing content {extra[1]!r}", extra[0])


def parse_hpoly(text: str) -> HPolytope:
    lines = _Lines(text)
    P = _read_hpoly(lines)
    _expect_end(lines)
    return P


def parse_amap(text: str) -> AffineMap:
    lines = _Lines(text)
    f = _read_amap(lines)
    _expect_end(lines)
    return f


def parse_ef(text: str) -> ExtendedFormulation:
    lines = _Lines(text)
    Q = _read_hpoly(lines)
    amap_line = lines.peek()[0] if lines.peek() else 0
    pi = _read_amap(lines)
    part = None
    nxt = lines.peek()
    if nxt is not None and nxt[1].startswith("PART"):
        no, line = lines.next("PART line")
        parts = line.split()
        try:
            k = int(parts[1])
            idx = [int(p) - 1 for p in parts[2:]]
        except (IndexError, ValueError):
            raise ParseError(f"malformed PART line {line!r}", no) from None
        if len(idx) != k:
            raise ParseError(f"PART announces {k} indices but lists {len(idx)}", no)
        try:
            part = CoordPartition.from_first_block(pi.target_dim, idx)
            if len(part.x1) != k:
                raise ValueError("repeated or out-of-range index")
        except ValueError as exc:
            raise ParseError(f"bad partition: {exc}", no) from None
    _expect_end(lines)
    try:
        return ExtendedFormulation(Q, pi, part)
    except DimensionError as exc:
        raise ParseError(str(exc), amap_line) from None


def _read_file(path) -> str:
    with open(path) as fh:
        return fh.read()


def _write_file(path, text: str) -> None:
    with open(path, "w") as fh:
        fh.write(text)


def read_hpoly(path) -> HPolytope:
    return parse_hpoly(_read_file(path))


def write_hpoly(path, P: HPolytope) -> None:
    _write_file(path, format_hpoly(P))


def read_amap(path) -> AffineMap:
    return parse_amap(_read_file(path))


def write_amap(path, f: AffineMap) -> None:
    _write_file(path, format_amap(f))


def read_ef(path) -> ExtendedFormulation:
    return parse_ef(_read_file(path))


def write_ef(path, ef: ExtendedFormulation) -> None:
    _write_file(path, format_ef(ef))
