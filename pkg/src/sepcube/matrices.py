"""Edge-versus-non-edge and edge-versus-independent-set disjointness matrices,
their partitions into combinatorial rectangles, and a checker for such
partitions.

Labels are tuples of 0-based vertices: an edge or non-edge ``(u, v)`` with
``u < v``, an independent set as its sorted vertex tuple.  Files print
vertices 1-based, pairs as ``u-v``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .cube import CapacityError
from .constructions import Graph
from .polytope import ParseError

Label = tuple[int, ...]

DEFAULT_EIS_CAP = 20


@dataclass(frozen=True)
class ZeroOneMatrix:
    rows: tuple[Label, ...]
    cols: tuple[Label, ...]
    entries: np.ndarray

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.rows)
        cols = tuple(tuple(c) for c in self.cols)
        if len(set(rows)) != len(rows) or len(set(cols)) != len(cols):
            raise ValueError("row and column labels must be unique")
        entries = np.array(self.entries, dtype=bool).reshape(len(rows), len(cols))
        entries.setflags(write=False)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "entries", entries)

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    def ones(self) -> int:
        return int(self.entries.sum())

    def submatrix(self, cols: Sequence[Label]) -> "ZeroOneMatrix":
        index = {c: j for j, c in enumerate(self.cols)}
        picked = [index[tuple(c)] for c in cols]
        return ZeroOneMatrix(self.rows, cols, self.entries[:, picked])

    def __eq__(self, other) -> bool:
        if not isinstance(other, ZeroOneMatrix):
            return NotImplemented
        return (
            self.rows == other.rows
            and self.cols == other.cols
            and bool(np.array_equal(self.entries, other.entries))
        )


def _disjointness(rows: Sequence[Label], cols: Sequence[Label], nv: int) -> np.ndarray:
    """Entry ``[i, j]`` is 1 iff label ``rows[i]`` and label ``cols[j]`` share no vertex."""
    def incidence(labels):
        inc = np.zeros((len(labels), nv), dtype=np.int32)
        for k, lab in enumerate(labels):
            inc[k, list(lab)] = 1
        return inc

    if not rows or not cols:
        return np.zeros((len(rows), len(cols)), dtype=bool)
    return (incidence(rows) @ incidence(cols).T) == 0


def ene_matrix(G: Graph) -> ZeroOneMatrix:
    """Rows are edges, columns non-edges (same-side pairs included), both sorted."""
    if G.nv < 2:
        raise ValueError("need at least two vertices")
    rows, cols = G.edges(), G.non_edges()
    return ZeroOneMatrix(rows, cols, _disjointness(rows, cols, G.nv))


def independent_sets(G: Graph, cap: int = DEFAULT_EIS_CAP) -> list[Label]:
    """All independent sets including the empty set, by size then lexicographically."""
    if G.nv > cap:
        raise CapacityError(f"{G.nv} vertices exceeds the independent-set cap {cap}")
    found: list[Label] = []

    def grow(current: list[int], start: int, blocked: int):
        found.append(tuple(current))
        for v in range(start, G.nv):
            if not (blocked >> v) & 1:
                current.append(v)
                grow(current, v + 1, blocked | G.adj[v] | (1 << v))
                current.pop()

    grow([], 0, 0)
    found.sort(key=lambda s: (len(s), s))
    return found


def eis_matrix(G: Graph, max_vertices: int = DEFAULT_EIS_CAP) -> ZeroOneMatrix:
    """Rows are edges, columns all independent sets; 1 where they are disjoint."""
    cols = independent_sets(G, max_vertices)
    rows = G.edges()
    return ZeroOneMatrix(rows, cols, _disjointness(rows, cols, G.nv))


# ------------------------------------------------------------ rectangles

@dataclass(frozen=True)
class Rectangle:
    """All-ones block ``rows x cols``; ``name`` records which family produced it."""

    rows: frozenset
    cols: frozenset
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "rows", frozenset(tuple(r) for r in self.rows))
        object.__setattr__(self, "cols", frozenset(tuple(c) for c in self.cols))

    def is_empty(self) -> bool:
        return not self.rows or not self.cols

    def entries(self) -> set[tuple[Label, Label]]:
        return {(r, c) for r in self.rows for c in self.cols}


@dataclass(frozen=True)
class RectDecomposition:
    rectangles: tuple[Rectangle, ...]
    shape: tuple[int, int]

    def __len__(self) -> int:
        return len(self.rectangles)

    def __iter__(self):
        return iter(self.rectangles)


def _emit(out: list[Rectangle], rows, cols, name: str) -> None:
    rect = Rectangle(rows, cols, name)
    if not rect.is_empty():
        out.append(rect)


def _cross_families(
    G: Graph,
    left: Sequence[int],
    right: Sequence[int],
    universe: Sequence[int],
    out: list[Rectangle],
) -> None:
    """Rectangles covering (edge between ``left`` and ``right``, disjoint non-edge).

    Non-edges range over pairs of ``universe`` not adjacent in ``G``.  The
    families are indexed by a left vertex (non-edge at that vertex crossing to
    the right side while it sees the edge's right end), by a right vertex (the
    edge's right end) and again by a left vertex (the edge's left end, with the
    non-edge inside the left side).
    """
    lset, rset = set(left), set(right)
    univ = sorted(universe)
    non_edges = [
        (u, v) for i, u in enumerate(univ) for v in univ[i + 1:] if not G.adjacent(u, v)
    ]

    def edge(u, v):
        return (u, v) if u < v else (v, u)

    for l in left:
        rows = [edge(l1, r1) for r1 in right if G.adjacent(l, r1) for l1 in left if l1 != l and G.adjacent(l1, r1)]
        cols = [edge(l, r2) for r2 in right if not G.adjacent(l, r2)]
        _emit(out, rows, cols, f"A[{l + 1}]")
    for r in right:
        rows = [edge(l1, r) for l1 in left if G.adjacent(l1, r)]
        cols = []
        for u, v in non_edges:
            if r in (u, v):
                continue
            if u in rset and v in rset:
                cols.append((u, v))
            elif u in lset and v in rset and not G.adjacent(u, r):
                cols.append((u, v))
            elif v in lset and u in rset and not G.adjacent(v, r):
                cols.append((u, v))
        _emit(out, rows, cols, f"B[{r + 1}]")
    for l in left:
        rows = [edge(l, r1) for r1 in right if G.adjacent(l, r1)]
        cols = [(u, v) for u, v in non_edges if u in lset and v in lset and l not in (u, v)]
        _emit(out, rows, cols, f"C[{l + 1}]")


def ene_decompose_bipartite(G: Graph) -> RectDecomposition:
    """Partition of the ones of ``ene_matrix(G)`` into at most ``2|L| + |R|`` rectangles."""
    if G.bipartition is None:
        raise ValueError("graph carries no bipartition")
    left, right = G.bipartition
    out: list[Rectangle] = []
    _cross_families(G, left, right, range(G.nv), out)
    return RectDecomposition(tuple(out), (len(G.edges()), len(G.non_edges())))


def _induced_coloring(G: Graph, vertices: Sequence[int]):
    sub, labels = G.induced(vertices)
    coloring = sub.two_coloring()
    if coloring is None:
        return None
    return [labels[v] for v in coloring[0]], [labels[v] for v in coloring[1]]


def _decompose(G: Graph, vertices: list[int], out: list[Rectangle]) -> None:
    if len(vertices) < 4:
        # two disjoint pairs need four vertices
        return
    coloring = _induced_coloring(G, vertices)
    if coloring is not None:
        left, right = coloring
        if len(left) > len(right):
            left, right = right, left
        _cross_families(G, left, right, vertices, out)
        return
    half = (len(vertices) + 1) // 2
    v1, v2 = vertices[:half], vertices[half:]
    # edge crossing the cut: the bipartite families with the smaller side first
    _cross_families(G, v2, v1, vertices, out)

    def inside(part):
        return [(u, v) for i, u in enumerate(part) for v in part[i + 1:] if G.adjacent(u, v)]

    def outside(part):
        return [(u, v) for i, u in enumerate(part) for v in part[i + 1:] if not G.adjacent(u, v)]

    e1, e2 = inside(v1), inside(v2)
    # edge inside one side, non-edge inside the other side
    _emit(out, e1, outside(v2), "D[1]")
    _emit(out, e2, outside(v1), "D[2]")
    # edge inside one side, non-edge crossing: index by the non-edge's end on that side
    for u in v1:
        cols = [(u, w) if u < w else (w, u) for w in v2 if not G.adjacent(u, w)]
        _emit(out, [e for e in e1 if u not in e], cols, f"X[{u + 1}]")
    for w in v2:
        cols = [(u, w) if u < w else (w, u) for u in v1 if not G.adjacent(u, w)]
        _emit(out, [e for e in e2 if w not in e], cols, f"X[{w + 1}]")
    # edge and non-edge inside the same side
    _decompose(G, v1, out)
    _decompose(G, v2, out)


def ene_decompose_general(G: Graph) -> RectDecomposition:
    """Rectangle partition of ``ene_matrix(G)`` for any graph, O(nv log nv) pieces.

    Bipartite (sub)graphs use the bipartite families directly; otherwise the
    vertices are halved by label order and each edge/non-edge pair is routed
    by where its edge and non-edge sit relative to the cut.
    """
    if G.nv < 2:
        raise ValueError("need at least two vertices")
    out: list[Rectangle] = []
    _decompose(G, list(range(G.nv)), out)
    return RectDecomposition(tuple(out), (len(G.edges()), len(G.non_edges())))


@dataclass(frozen=True)
class DecompVerdict:
    passed: bool
    reason: Optional[str] = None
    row: Optional[Label] = None
    col: Optional[Label] = None
    rectangle: Optional[int] = None

    def to_json(self) -> dict:
        out = {"passed": self.passed}
        if not self.passed:
            out.update(
                reason=self.reason,
                row=format_label(self.row),
                col=format_label(self.col),
                rectangle=self.rectangle,
            )
        return out


def verify_decomposition(M: ZeroOneMatrix, D: Iterable[Rectangle]) -> DecompVerdict:
    """Check that the rectangles are entry-disjoint and cover exactly the ones of ``M``.

    Rectangles are scanned in order; within one, entries are visited row-major
    in ``M``'s label order.  A double cover is reported before a covered zero.
    Uncovered ones are reported last, again row-major.
    """
    rindex = {r: i for i, r in enumerate(M.rows)}
    cindex = {c: j for j, c in enumerate(M.cols)}
    cover = np.zeros(M.shape, dtype=bool)
    for k, rect in enumerate(D):
        try:
            ri = sorted(rindex[r] for r in rect.rows)
            ci = sorted(cindex[c] for c in rect.cols)
        except KeyError as exc:
            raise KeyError(f"rectangle {k} uses unknown label {format_label(exc.args[0])}") from None
        if not ri or not ci:
            continue
        block = np.ix_(ri, ci)
        hit = np.argwhere(cover[block])
        if hit.size:
            i, j = hit[0]
            return DecompVerdict(False, "double-cover", M.rows[ri[i]], M.cols[ci[j]], k)
        hit = np.argwhere(~M.entries[block])
        if hit.size:
            i, j = hit[0]
            return DecompVerdict(False, "covers-zero", M.rows[ri[i]], M.cols[ci[j]], k)
        cover[block] = True
    missing = np.argwhere(M.entries & ~cover)
    if missing.size:
        i, j = missing[0]
        return DecompVerdict(False, "uncovered", M.rows[i], M.cols[j])
    return DecompVerdict(True)


def general_count_bound(nv: int, constant: float) -> float:
    return constant * nv * math.log2(nv) if nv > 1 else 0.0


# ------------------------------------------------------------ text formats

def format_label(label: Optional[Label]) -> Optional[str]:
    if label is None:
        return None
    if not label:
        return "{}"
    return "-".join(str(v + 1) for v in label)


def parse_label(token: str) -> Label:
    if token == "{}":
        return ()
    try:
        vals = tuple(int(t) - 1 for t in token.split("-"))
    except ValueError:
        raise ValueError(f"bad label {token!r}") from None
    if any(v < 0 for v in vals):
        raise ValueError(f"bad label {token!r}")
    return vals


def format_matrix(M: ZeroOneMatrix, fmt: str = "dense") -> str:
    r, c = M.shape
    out = []
    if fmt == "dense":
        out.append(f"MATRIX dense {r} {c}")
    elif fmt == "sparse":
        out.append(f"MATRIX sparse {r} {c} {M.ones()}")
    else:
        raise ValueError(f"unknown matrix format {fmt!r}")
    out.append(" ".join(["ROWS:"] + [format_label(x) for x in M.rows]))
    out.append(" ".join(["COLS:"] + [format_label(x) for x in M.cols]))
    if fmt == "dense":
        # a matrix without columns has no row lines at all
        if c:
            out.extend(" ".join("1" if v else "0" for v in row) for row in M.entries)
    else:
        out.extend(f"{i + 1} {j + 1}" for i, j in np.argwhere(M.entries))
    return "\n".join(out) + "\n"


def parse_matrix(text: str) -> ZeroOneMatrix:
    lines = [(no, ln.strip()) for no, ln in enumerate(text.splitlines(), start=1) if ln.strip()]
    if len(lines) < 3:
        raise ParseError("matrix file needs a header and two label lines", len(lines) + 1)
    no, head = lines[0]
    parts = head.split()
    if len(parts) < 4 or parts[0] != "MATRIX" or parts[1] not in ("dense", "sparse"):
        raise ParseError(f"bad matrix header {head!r}", no)
    fmt = parts[1]
    try:
        r, c = int(parts[2]), int(parts[3])
        k = int(parts[4]) if fmt == "sparse" else None
    except (ValueError, IndexError):
        raise ParseError(f"bad matrix header {head!r}", no) from None

    def labels(item, key):
        lno, line = item
        toks = line.split()
        if not toks or toks[0] != key:
            raise ParseError(f"expected {key} line", lno)
        try:
            return [parse_label(t) for t in toks[1:]]
        except ValueError as exc:
            raise ParseError(str(exc), lno) from None

    rows, cols = labels(lines[1], "ROWS:"), labels(lines[2], "COLS:")
    if len(rows) != r or len(cols) != c:
        raise ParseError("label count differs from the header", lines[1][0])
    body = lines[3:]
    entries = np.zeros((r, c), dtype=bool)
    if fmt == "dense":
        if len(body) != (r if c else 0):
            raise ParseError(f"expected {r if c else 0} matrix rows, got {len(body)}", no)
        for i, (lno, line) in enumerate(body):
            toks = line.split()
            if len(toks) != c or set(toks) - {"0", "1"}:
                raise ParseError(f"expected {c} entries of 0/1", lno)
            entries[i] = [t == "1" for t in toks]
    else:
        if len(body) != k:
            raise ParseError(f"expected {k} entries, got {len(body)}", no)
        for lno, line in body:
            try:
                i, j = (int(t) - 1 for t in line.split())
            except ValueError:
                raise ParseError(f"bad entry {line!r}", lno) from None
            if not (0 <= i < r and 0 <= j < c):
                raise ParseError(f"entry {line!r} out of range", lno)
            entries[i, j] = True
    return ZeroOneMatrix(rows, cols, entries)


def format_decomposition(D: RectDecomposition) -> str:
    out = [f"RECT {len(D.rectangles)}"]
    for rect in D.rectangles:
        out.append(" ".join(["ROWS:"] + [format_label(x) for x in sorted(rect.rows)]))
        out.append(" ".join(["COLS:"] + [format_label(x) for x in sorted(rect.cols)]))
    return "\n".join(out) + "\n"


def parse_decomposition(text: str, shape: tuple[int, int] = (0, 0)) -> RectDecomposition:
    lines = [(no, ln.strip()) for no, ln in enumerate(text.splitlines(), start=1) if ln.strip()]
    if not lines or lines[0][1].split()[0] != "RECT":
        raise ParseError("expected 'RECT k' header", lines[0][0] if lines else 1)
    try:
        k = int(lines[0][1].split()[1])
    except (IndexError, ValueError):
        raise ParseError("expected 'RECT k' header", lines[0][0]) from None
    if len(lines) != 1 + 2 * k:
        raise ParseError(f"expected {2 * k} rectangle lines, got {len(lines) - 1}", lines[-1][0])
    rects = []
    for t in range(k):
        (rno, rline), (cno, cline) = lines[1 + 2 * t], lines[2 + 2 * t]
        if not rline.startswith("ROWS:"):
            raise ParseError("expected ROWS: line", rno)
        if not cline.startswith("COLS:"):
            raise ParseError("expected COLS: line", cno)
        try:
            rows = [parse_label(x) for x in rline.split()[1:]]
            cols = [parse_label(x) for x in cline.split()[1:]]
        except ValueError as exc:
            raise ParseError(str(exc), rno) from None
        rects.append(Rectangle(rows, cols))
    return RectDecomposition(tuple(rects), shape)
