"""Fourier-Motzkin projection and the queries built on it.

This is the exact, self-contained oracle of the package: projections,
linear maximization, validity and containment are all answered by
eliminating variables from integer-normalized constraint rows.  Redundancy
control is purely syntactic (normalization, deduplication, keeping the
tightest of parallel rows), so intermediate systems can grow quickly; a
configurable cap turns runaway growth into :class:`ResourceCapError`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .cube import BoolSet, CapacityError
from .polytope import (
    DimensionError,
    ExtendedFormulation,
    HPolytope,
    LinConstraint,
    Relation,
    boolean_points,
    rat_vector,
)

DEFAULT_CAP = 20000


class ResourceCapError(CapacityError):
    """Intermediate Fourier-Motzkin system grew past the configured cap."""


class _Infeasible(Exception):
    pass


# A row is (coeffs, rhs, is_eq): coeffs . x <= rhs, or = rhs when is_eq.
Row = tuple[tuple[int, ...], int, bool]


def _normalize(a: Sequence[int], b: int, is_eq: bool) -> Optional[Row]:
    """Coprime integer form; ``None`` for a tautology, raises on a contradiction."""
    g = math.gcd(*a, b)
    if not any(a):
        if (is_eq and b != 0) or (not is_eq and b < 0):
            raise _Infeasible
        return None
    if g > 1:
        a = [v // g for v in a]
        b //= g
    if is_eq:
        lead = next(v for v in a if v)
        if lead < 0:
            a = [-v for v in a]
            b = -b
    return tuple(a), b, is_eq


class _System:
    """Deduplicating bag of normalized rows."""

    def __init__(self):
        self.le: dict[tuple[int, ...], int] = {}
        self.eq: dict[tuple[int, ...], int] = {}

    def add(self, a, b, is_eq) -> None:
        row = _normalize(a, b, is_eq)
        if row is None:
            return
        a, b, is_eq = row
        if is_eq:
            old = self.eq.get(a)
            if old is not None and old != b:
                raise _Infeasible
            self.eq[a] = b
        else:
            old = self.le.get(a)
            if old is None or b < old:
                self.le[a] = b

    def __len__(self) -> int:
        return len(self.le) + len(self.eq)

    def rows(self) -> list[Row]:
        return [(a, b, True) for a, b in self.eq.items()] + [(a, b, False) for a, b in self.le.items()]


def _rows_of(P: HPolytope) -> list[Row]:
    return [c.integer_row() for c in P.constraints]


def _substitute(rows: list[Row], k: int, pivot: Row, cap: int) -> _System:
    e, f, _ = pivot
    ek = e[k]
    sgn = 1 if ek > 0 else -1
    mult = abs(ek)
    out = _System()
    for row in rows:
        if row is pivot:
            continue
        a, b, is_eq = row
        ak = a[k]
        if ak == 0:
            out.add(a, b, is_eq)
            continue
        c = sgn * ak
        out.add([mult * x - c * y for x, y in zip(a, e)], mult * b - c * f, is_eq)
    if len(out) > cap:
        raise ResourceCapError(f"Fourier-Motzkin system exceeded {cap} constraints")
    return out


def _fm_step(rows: list[Row], k: int, cap: int) -> _System:
    pos, neg = [], []
    out = _System()
    for row in rows:
        ak = row[0][k]
        if ak > 0:
            pos.append(row)
        elif ak < 0:
            neg.append(row)
        else:
            out.add(*row)
    if len(out) + len(pos) * len(neg) > 20 * cap:
        raise ResourceCapError(
            f"eliminating variable {k} would combine {len(pos)} x {len(neg)} rows (cap {cap})"
        )
    for pa, pb, _ in pos:
        p = pa[k]
        for na, nb, _ in neg:
            q = -na[k]
            out.add([q * x + p * y for x, y in zip(pa, na)], q * pb + p * nb, False)
        if len(out) > cap:
            raise ResourceCapError(f"Fourier-Motzkin system exceeded {cap} constraints")
    return out


def _pick_pivot(rows: list[Row], targets: set[int]) -> Optional[tuple[int, Row]]:
    best = None
    for row in rows:
        a, _, is_eq = row
        if not is_eq:
            continue
        support = sum(1 for v in a if v)
        for k in targets:
            if a[k]:
                key = (support, abs(a[k]), k)
                if best is None or key < best[0]:
                    best = (key, k, row)
    return None if best is None else (best[1], best[2])


def _pick_variable(rows: list[Row], targets: set[int]) -> int:
    def cost(k):
        p = sum(1 for a, _, _ in rows if a[k] > 0)
        n = sum(1 for a, _, _ in rows if a[k] < 0)
        return (p * n - p - n, k)

    return min(targets, key=cost)


def _eliminate(rows: list[Row], targets: Iterable[int], cap: int) -> list[Row]:
    """Eliminate every variable in ``targets``; raises _Infeasible on a contradiction.

    Equalities are used as substitutions before any inequality pairing.
    """
    targets = set(targets)
    sysm = _System()
    for row in rows:
        sysm.add(*row)
    rows = sysm.rows()
    while targets:
        pivot = _pick_pivot(rows, targets)
        if pivot is not None:
            k, row = pivot
            rows = _substitute(rows, k, row, cap).rows()
        else:
            k = _pick_variable(rows, targets)
            rows = _fm_step(rows, k, cap).rows()
        targets.discard(k)
    return rows


def _to_polytope(rows: list[Row], keep: Sequence[int], label: str) -> HPolytope:
    cons = [
        LinConstraint([a[i] for i in keep], Relation.EQ if is_eq else Relation.LE, b)
        for a, b, is_eq in rows
    ]
    return HPolytope(len(keep), cons, label)


def empty_polytope(dim: int, label: str = "empty") -> HPolytope:
    """Canonical empty set: the single constraint ``0 >= 1``."""
    return HPolytope(dim, [LinConstraint.ge([0] * dim, 1)], label)


def fm_eliminate(P: HPolytope, var: int, cap: int = DEFAULT_CAP) -> HPolytope:
    """Project ``P`` along coordinate ``var`` (0-based); result lives in R^(dim-1)."""
    if not 0 <= var < P.dim:
        raise IndexError(f"variable {var} out of range for dimension {P.dim}")
    keep = [i for i in range(P.dim) if i != var]
    try:
        rows = _eliminate(_rows_of(P), [var], cap)
    except _Infeasible:
        return empty_polytope(P.dim - 1, P.label)
    return _to_polytope(rows, keep, P.label)


def project_onto(P: HPolytope, coords: Iterable[int], cap: int = DEFAULT_CAP) -> HPolytope:
    """Orthogonal projection onto the (0-based) coordinates ``coords``, in sorted order."""
    keep = sorted(set(coords))
    if any(not 0 <= i < P.dim for i in keep):
        raise IndexError(f"coordinates {keep} out of range for dimension {P.dim}")
    drop = [i for i in range(P.dim) if i not in keep]
    try:
        rows = _eliminate(_rows_of(P), drop, cap)
    except _Infeasible:
        return empty_polytope(len(keep), P.label)
    return _to_polytope(rows, keep, P.label)


def is_empty(P: HPolytope, cap: int = DEFAULT_CAP) -> bool:
    try:
        _eliminate(_rows_of(P), range(P.dim), cap)
    except _Infeasible:
        return True
    return False


class OptStatus(str, Enum):
    OPTIMAL = "optimal"
    UNBOUNDED = "unbounded"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class LinearMax:
    status: OptStatus
    value: Optional[Fraction] = None

    def __str__(self) -> str:
        return str(self.value) if self.status is OptStatus.OPTIMAL else self.status.value


def maximize_linear(P: HPolytope, c: Sequence, cap: int = DEFAULT_CAP) -> LinearMax:
    """Exact ``max c.x`` over ``P``.

    A fresh coordinate ``t = c.x`` is appended and every original coordinate
    is eliminated; the surviving rows bound ``t`` alone.
    """
    c = rat_vector(c)
    if len(c) != P.dim:
        raise DimensionError(f"objective has dimension {len(c)}, polytope has {P.dim}")
    d = P.dim
    rows = [(a + (0,), b, e) for a, b, e in _rows_of(P)]
    rows.append(LinConstraint.eq([-v for v in c] + [1], 0).integer_row())
    try:
        rows = _eliminate(rows, range(d), cap)
    except _Infeasible:
        return LinearMax(OptStatus.INFEASIBLE)
    lower: Optional[Fraction] = None
    upper: Optional[Fraction] = None
    for a, b, is_eq in rows:
        coef = a[d]
        bound = Fraction(b, coef)
        if is_eq or coef > 0:
            upper = bound if upper is None else min(upper, bound)
        if is_eq or coef < 0:
            lower = bound if lower is None else max(lower, bound)
    if lower is not None and upper is not None and lower > upper:
        return LinearMax(OptStatus.INFEASIBLE)
    if upper is None:
        return LinearMax(OptStatus.UNBOUNDED)
    return LinearMax(OptStatus.OPTIMAL, upper)


def is_valid(P: HPolytope, c: LinConstraint, cap: int = DEFAULT_CAP) -> bool:
    """Whether every point of ``P`` satisfies ``c`` (vacuously true if ``P`` is empty)."""
    if c.dim != P.dim:
        raise DimensionError(f"constraint has dimension {c.dim}, polytope has {P.dim}")
    a, b, is_eq = c.integer_row()
    checks = [(a, b)]
    if is_eq:
        checks.append((tuple(-v for v in a), -b))
    for coeffs, rhs in checks:
        res = maximize_linear(P, coeffs, cap)
        if res.status is OptStatus.INFEASIBLE:
            return True
        if res.status is OptStatus.UNBOUNDED or res.value > rhs:
            return False
    return True


def is_contained(P: HPolytope, Q: HPolytope, cap: int = DEFAULT_CAP) -> bool:
    """Whether ``P`` is a subset of ``Q``."""
    if P.dim != Q.dim:
        raise DimensionError(f"dimensions differ: {P.dim} vs {Q.dim}")
    return all(is_valid(P, c, cap) for c in Q.constraints)


def ef_image(ef: ExtendedFormulation, cap: int = DEFAULT_CAP) -> HPolytope:
    """H-representation of ``pi(Q)``.

    Works in the joint space (x, y) with the graph equalities
    ``y - M x = offset`` and eliminates the source coordinates ``x``.
    """
    m, n = ef.Q.dim, ef.target_dim
    rows = [(a + (0,) * n, b, e) for a, b, e in _rows_of(ef.Q)]
    for i, (mrow, off) in enumerate(zip(ef.pi.matrix, ef.pi.offset)):
        coeffs = [-v for v in mrow] + [int(j == i) for j in range(n)]
        rows.append(LinConstraint.eq(coeffs, off).integer_row())
    label = f"image of {ef.Q.label}" if ef.Q.label else "image"
    try:
        rows = _eliminate(rows, range(m), cap)
    except _Infeasible:
        return empty_polytope(n, label)
    return _to_polytope(rows, range(m, m + n), label)


def ef_boolean_points(ef: ExtendedFormulation, cap: int = DEFAULT_CAP, threads: int = 1) -> BoolSet:
    return boolean_points(ef_image(ef, cap), threads=threads)
