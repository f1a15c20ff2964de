"""Separating polytopes for subsets of the Boolean cube, their verifiers,
and the graph polytopes around the edge-indicator construction.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from .cube import BoolSet, CoordPartition, CubePoint, check_dimension, cube_table, odd_set, split_codes, split_point
from .polytope import (
    AffineMap,
    ExtendedFormulation,
    HPolytope,
    LinConstraint,
    ParseError,
    boolean_points,
    integer_scale,
    rat_vector,
)
from .project import DEFAULT_CAP, ef_boolean_points


class Graph:
    """Simple undirected graph on vertices ``0..nv-1``.

    Adjacency is kept as one integer bitset per vertex.  An optional
    bipartition ``(left, right)`` is validated against the edges.
    """

    __slots__ = ("nv", "adj", "bipartition")

    def __init__(self, nv: int, edges: Iterable[tuple[int, int]] = (), bipartition=None):
        if nv < 0:
            raise ValueError("vertex count must be nonnegative")
        adj = [0] * nv
        for u, v in edges:
            if not (0 <= u < nv and 0 <= v < nv):
                raise ValueError(f"edge ({u}, {v}) out of range for {nv} vertices")
            if u == v:
                raise ValueError(f"loop at vertex {u}")
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        self.nv = nv
        self.adj = tuple(adj)
        self.bipartition = None
        if bipartition is not None:
            left = tuple(sorted(set(bipartition[0])))
            right = tuple(sorted(set(bipartition[1])))
            if sorted(left + right) != list(range(nv)):
                raise ValueError("bipartition must split the vertex set")
            lmask = sum(1 << v for v in left)
            for u in left:
                if adj[u] & lmask:
                    raise ValueError("an edge lies inside the left part")
            rmask = sum(1 << v for v in right)
            for u in right:
                if adj[u] & rmask:
                    raise ValueError("an edge lies inside the right part")
            self.bipartition = (left, right)

    def adjacent(self, u: int, v: int) -> bool:
        return bool((self.adj[u] >> v) & 1)

    def neighbors(self, u: int) -> list[int]:
        return [v for v in range(self.nv) if (self.adj[u] >> v) & 1]

    def edges(self) -> list[tuple[int, int]]:
        """All edges ``(u, v)`` with ``u < v``, in lexicographic order."""
        return [(u, v) for u in range(self.nv) for v in range(u + 1, self.nv) if (self.adj[u] >> v) & 1]

    def non_edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.nv) for v in range(u + 1, self.nv) if not (self.adj[u] >> v) & 1]

    def induced(self, vertices: Sequence[int]) -> tuple["Graph", list[int]]:
        """Induced subgraph, relabelled ``0..k-1``; also returns the old labels."""
        vertices = list(vertices)
        pos = {v: i for i, v in enumerate(vertices)}
        sub = [(pos[u], pos[v]) for u, v in self.edges() if u in pos and v in pos]
        return Graph(len(vertices), sub), vertices

    def two_coloring(self) -> Optional[tuple[tuple[int, ...], tuple[int, ...]]]:
        """A bipartition if the graph is bipartite, otherwise ``None``."""
        if self.bipartition is not None:
            return self.bipartition
        color = [-1] * self.nv
        for s in range(self.nv):
            if color[s] >= 0:
                continue
            color[s] = 0
            queue = deque([s])
            while queue:
                u = queue.popleft()
                for v in self.neighbors(u):
                    if color[v] < 0:
                        color[v] = 1 - color[u]
                        queue.append(v)
                    elif color[v] == color[u]:
                        return None
        left = tuple(v for v in range(self.nv) if color[v] == 0)
        right = tuple(v for v in range(self.nv) if color[v] == 1)
        return left, right

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.nv, self.adj, self.bipartition) == (other.nv, other.adj, other.bipartition)

    def __repr__(self) -> str:
        return f"Graph(nv={self.nv}, edges={[(u + 1, v + 1) for u, v in self.edges()]})"

    @classmethod
    def from_weight2(cls, H: BoolSet) -> "Graph":
        """Graph whose edges are the weight-2 members of ``H``."""
        edges = []
        for code in H:
            bits = [i for i in range(H.n) if (code >> i) & 1]
            if len(bits) != 2:
                raise ValueError(f"point {CubePoint(H.n, code)} does not have weight 2")
            edges.append((bits[0], bits[1]))
        return cls(H.n, edges)


def _unit(dim: int, i: int) -> list[int]:
    e = [0] * dim
    e[i] = 1
    return e


# ------------------------------------------------------------ separators

def hamming_separator(A: BoolSet) -> HPolytope:
    """One constraint per cube point ``s``: Hamming distance to ``s`` is at least 1
    when ``s`` is excluded and at least 0 when it is a member.

    For Boolean ``x`` the distance is ``sum_{s_i=0} x_i + sum_{s_i=1} (1 - x_i)``,
    so an excluded point is cut off and every other point survives.
    """
    n = A.n
    check_dimension(n)
    cons = []
    plus, minus = Fraction(1), Fraction(-1)
    for s in range(1 << n):
        coeffs = [minus if (s >> i) & 1 else plus for i in range(n)]
        ones = bin(s).count("1")
        floor = 0 if A.mask[s] else 1
        cons.append(LinConstraint.ge(coeffs, floor - ones))
    return HPolytope(n, cons, "hamming")


def edge_polytope(H: BoolSet, n: Optional[int] = None) -> HPolytope:
    """Polytope with ``2n`` inequalities whose Boolean points are exactly ``H``.

    ``H`` must consist of weight-2 points, read as the edge set of a graph on
    the coordinates.  The constraints are ``x >= 0``, ``sum x = 2`` and, per
    vertex, ``x_i <= sum of x over the neighbours of i``.
    """
    if n is not None and n != H.n:
        raise ValueError(f"set has dimension {H.n}, expected {n}")
    return edge_polytope_of_graph(Graph.from_weight2(H))


def edge_polytope_of_graph(G: Graph, label: str = "edge") -> HPolytope:
    n = G.nv
    cons = [LinConstraint.ge(_unit(n, i), 0) for i in range(n)]
    cons.append(LinConstraint.eq([1] * n, 2))
    for i in range(n):
        row = [0] * n
        row[i] = 1
        for j in G.neighbors(i):
            row[j] = -1
        cons.append(LinConstraint.le(row, 0))
    return HPolytope(n, cons, label)


def lift_index(part: CoordPartition, s1: int, s2: int) -> tuple[int, int]:
    """Lifted coordinates of the sub-cube points ``s1`` and ``s2``.

    Coordinates list the first sub-cube in encoding order, then the second.
    """
    return s1, part.n1 + s2


def canonical_lift(sigma: CubePoint, part: CoordPartition) -> tuple[Fraction, ...]:
    """The 0/1 vector with ones at the slots of ``sigma``'s two restrictions."""
    if sigma.n != part.n:
        raise ValueError(f"point has dimension {sigma.n}, partition {part.n}")
    s1, s2 = split_point(sigma, part)
    vec = [Fraction(0)] * (part.n1 + part.n2)
    i, j = lift_index(part, s1.bits, s2.bits)
    vec[i] = vec[j] = Fraction(1)
    return tuple(vec)


def halfsquare_map(part: CoordPartition) -> AffineMap:
    """Linear map sending each lifted unit vector to its sub-cube point, padded with zeros."""
    n = part.n
    cols = []
    for s1 in range(part.n1):
        col = [0] * n
        for j, i in enumerate(part.x1):
            col[i] = (s1 >> j) & 1
        cols.append(col)
    for s2 in range(part.n2):
        col = [0] * n
        for j, i in enumerate(part.x2):
            col[i] = (s2 >> j) & 1
        cols.append(col)
    matrix = [[col[r] for col in cols] for r in range(n)]
    return AffineMap(matrix, (0,) * n, len(cols))


def halfsquare_separator(A: BoolSet, part: Optional[CoordPartition] = None) -> ExtendedFormulation:
    """Extended formulation of size O(2^(n/2)) whose image meets the cube in ``A``.

    Every point of ``A`` becomes an edge between its two half-restrictions in a
    bipartite graph on ``N1 + N2`` lifted coordinates.  ``Q`` is the edge
    polytope of that graph cut by the two slice equalities (first block sums
    to 1, second block sums to 1).
    """
    if part is None:
        part = CoordPartition.halves(A.n)
    if part.n != A.n:
        raise ValueError("partition dimension differs from the set dimension")
    dim = part.n1 + part.n2
    c1, c2 = split_codes(part)
    members = np.flatnonzero(A.mask)
    edges = [lift_index(part, int(c1[k]), int(c2[k])) for k in members]
    G = Graph(dim, edges)
    R = edge_polytope_of_graph(G)
    slice1 = [1] * part.n1 + [0] * part.n2
    slice2 = [0] * part.n1 + [1] * part.n2
    cons = list(R.constraints) + [LinConstraint.eq(slice1, 1), LinConstraint.eq(slice2, 1)]
    Q = HPolytope(dim, cons, "halfsquare")
    return ExtendedFormulation(Q, halfsquare_map(part), part)


# ------------------------------------------------------------ verification

class Method(str, Enum):
    CANONICAL_LIFT = "CANONICAL_LIFT"
    FM_ORACLE = "FM_ORACLE"
    DIRECT = "DIRECT"


@dataclass(frozen=True)
class Mismatch:
    point: CubePoint
    expected_in: bool

    def to_json(self) -> dict:
        return {"point": str(self.point), "expected": "in" if self.expected_in else "out"}


@dataclass(frozen=True)
class SeparationReport:
    target: BoolSet
    computed: BoolSet
    method: Method
    mismatches: tuple[Mismatch, ...] = field(default=())

    @classmethod
    def compare(cls, target: BoolSet, computed: BoolSet, method: Method) -> "SeparationReport":
        if target.n != computed.n:
            raise ValueError(f"dimension mismatch: {target.n} vs {computed.n}")
        diff = np.flatnonzero(target.mask != computed.mask)
        mism = tuple(Mismatch(CubePoint(target.n, int(k)), bool(target.mask[k])) for k in diff)
        return cls(target, computed, method, mism)

    @property
    def passed(self) -> bool:
        return not self.mismatches

    def to_json(self, max_mismatches: int = 64) -> dict:
        return {
            "method": self.method.value,
            "passed": self.passed,
            "n": self.target.n,
            "target_size": len(self.target),
            "computed_size": len(self.computed),
            "mismatch_count": len(self.mismatches),
            "mismatches": [m.to_json() for m in self.mismatches[:max_mismatches]],
        }


def verify_separation_direct(P: HPolytope, A: BoolSet, threads: int = 1) -> SeparationReport:
    if P.dim != A.n:
        raise ValueError(f"polytope dimension {P.dim} differs from set dimension {A.n}")
    return SeparationReport.compare(A, boolean_points(P, threads=threads), Method.DIRECT)


def lift_members(ef: ExtendedFormulation) -> BoolSet:
    """Cube points whose canonical lift lies in ``Q``.

    The lift of a point has exactly two ones, so each constraint is checked
    by adding two integer coefficients.
    """
    part = ef.part
    if part is None:
        raise ValueError("canonical lifting needs a coordinate partition")
    Q = ef.Q
    if Q.dim != part.n1 + part.n2:
        raise ValueError("Q does not live on the lifted coordinates of the partition")
    c1, c2 = split_codes(part)
    mask = np.ones(1 << part.n, dtype=bool)
    for c in Q.constraints:
        a, b, is_eq = c.integer_row()
        lhs = np.array(a, dtype=object)
        vals = lhs[c1] + lhs[part.n1 + c2]
        ok = (vals == b) if is_eq else (vals <= b)
        mask &= ok.astype(bool)
    return BoolSet(part.n, mask)


def verify_separation_ef(
    ef: ExtendedFormulation,
    A: BoolSet,
    method: Optional[Method] = None,
    cap: int = DEFAULT_CAP,
    threads: int = 1,
) -> SeparationReport:
    """Compare ``pi(Q)`` against ``A`` on the cube.

    By default the canonical-lift check is used whenever ``ef`` carries a
    partition; it is sound only for formulations built like
    :func:`halfsquare_separator`.  Otherwise, or with
    ``method=Method.FM_ORACLE``, the image is computed by Fourier-Motzkin.
    """
    if ef.target_dim != A.n:
        raise ValueError(f"formulation maps into R^{ef.target_dim}, set lives in dimension {A.n}")
    if method is None:
        method = Method.CANONICAL_LIFT if ef.part is not None else Method.FM_ORACLE
    if method is Method.CANONICAL_LIFT:
        computed = lift_members(ef)
    elif method is Method.FM_ORACLE:
        computed = ef_boolean_points(ef, cap=cap, threads=threads)
    else:
        raise ValueError(f"method {method} does not apply to extended formulations")
    return SeparationReport.compare(A, computed, method)


# ------------------------------------------------------------ graph polytopes

def pairwise_polytope(G: Graph) -> HPolytope:
    """``x_i + x_j <= 1`` for every non-adjacent pair; nothing else."""
    if G.nv < 2:
        raise ValueError("need at least two vertices")
    cons = []
    for i, j in G.non_edges():
        row = [0] * G.nv
        row[i] = row[j] = 1
        cons.append(LinConstraint.le(row, 1))
    return HPolytope(G.nv, cons, "pairwise")


def edge_hull_relaxation(G: Graph) -> HPolytope:
    """Relaxation of the edge polytope of a bipartite graph with O(nv) constraints.

    Each side sums to 1, and a left vertex plus all right vertices it does
    not see sum to at most 1.
    """
    if G.bipartition is None:
        raise ValueError("graph carries no bipartition")
    left, right = G.bipartition
    n = G.nv
    cons = [LinConstraint.ge(_unit(n, i), 0) for i in range(n)]
    cons.append(LinConstraint.eq([int(i in left) for i in range(n)], 1))
    cons.append(LinConstraint.eq([int(i in right) for i in range(n)], 1))
    for i in left:
        row = [0] * n
        row[i] = 1
        for j in right:
            if not G.adjacent(i, j):
                row[j] = 1
        cons.append(LinConstraint.le(row, 1))
    return HPolytope(n, cons, "edge-hull-relaxation")


def edge_indicator(G: Graph, u: int, v: int) -> tuple[int, ...]:
    return tuple(int(i in (u, v)) for i in range(G.nv))


# ------------------------------------------------------------ parity half-spaces

class OddNotContainedError(ValueError):
    """The half-space misses an odd-weight point (``witness``)."""

    code = "ODD_NOT_CONTAINED"

    def __init__(self, witness: CubePoint):
        super().__init__(f"ODD_NOT_CONTAINED: odd point {witness} violates the half-space")
        self.witness = witness


def halfspace_even_outside(a: Sequence, b, n: int) -> list[CubePoint]:
    """Even-weight points strictly outside ``{x : a.x >= b}``.

    The half-space must contain every odd-weight point; at most one even
    point can then fall outside, and callers may assert that.
    """
    check_dimension(n)
    a = rat_vector(a)
    if len(a) != n:
        raise ValueError(f"normal has dimension {len(a)}, expected {n}")
    ints, _ = integer_scale(list(a) + [rat_vector([b])[0]])
    coeffs, rhs = ints[:-1], ints[-1]
    bits, odd = cube_table(n)
    if sum(abs(v) for v in coeffs) < 1 << 62 and abs(rhs) < 1 << 62:
        vals = bits @ np.array(coeffs, dtype=np.int64)
    else:
        vals = bits.astype(object) @ np.array(coeffs, dtype=object)
    inside = vals >= rhs
    bad = np.flatnonzero(odd & ~inside)
    if bad.size:
        raise OddNotContainedError(CubePoint(n, int(bad[0])))
    return [CubePoint(n, int(k)) for k in np.flatnonzero(~odd & ~inside)]


def odd_exclusion_count(n: int) -> int:
    """Number of ``distance >= 1`` rows in the Hamming separator of the odd points."""
    P = hamming_separator(odd_set(n))
    return sum(1 for c in P.constraints if _is_exclusion(c))


def _is_exclusion(c: LinConstraint) -> bool:
    # distance >= 1 rows have rhs = 1 - weight; distance >= 0 rows have rhs = -weight
    ones = sum(1 for v in c.coeffs if v < 0)
    return c.rhs == 1 - ones


# ------------------------------------------------------------ graph files

def format_graph(G: Graph) -> str:
    """``GRAPH nv ne [BIPART k]`` then one ``u v`` line per edge (1-based).

    The BIPART tag is written only when the left side is exactly ``1..k``.
    """
    edges = G.edges()
    head = f"GRAPH {G.nv} {len(edges)}"
    if G.bipartition is not None:
        left = G.bipartition[0]
        if tuple(left) != tuple(range(len(left))):
            raise ValueError("file format requires the left side to be vertices 1..k")
        head += f" BIPART {len(left)}"
    return "\n".join([head] + [f"{u + 1} {v + 1}" for u, v in edges]) + "\n"


def parse_graph(text: str) -> Graph:
    lines = [(no, ln.strip()) for no, ln in enumerate(text.splitlines(), start=1)]
    lines = [(no, ln) for no, ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise ParseError("empty graph file", 1)
    no, head = lines[0]
    parts = head.split()
    if len(parts) not in (3, 5) or parts[0] != "GRAPH" or (len(parts) == 5 and parts[3] != "BIPART"):
        raise ParseError(f"expected 'GRAPH nv ne [BIPART k]', got {head!r}", no)
    try:
        nv, ne = int(parts[1]), int(parts[2])
        k = int(parts[4]) if len(parts) == 5 else None
    except ValueError:
        raise ParseError(f"non-integer in header {head!r}", no) from None
    if len(lines) - 1 != ne:
        raise ParseError(f"header announces {ne} edges, found {len(lines) - 1}", no)
    edges = []
    for eno, line in lines[1:]:
        try:
            u, v = (int(t) - 1 for t in line.split())
        except ValueError:
            raise ParseError(f"expected 'u v', got {line!r}", eno) from None
        if not (0 <= u < nv and 0 <= v < nv) or u == v:
            raise ParseError(f"invalid edge {line!r}", eno)
        edges.append((u, v))
    bip = None
    if k is not None:
        if not 0 <= k <= nv:
            raise ParseError(f"BIPART size {k} out of range", no)
        bip = (range(k), range(k, nv))
    try:
        return Graph(nv, edges, bip)
    except ValueError as exc:
        raise ParseError(str(exc), no) from None


def read_graph(path) -> Graph:
    with open(path) as fh:
        return parse_graph(fh.read())


def write_graph(path, G: Graph) -> None:
    with open(path, "w") as fh:
        fh.write(format_graph(G))
