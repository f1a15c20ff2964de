import random
from fractions import Fraction

import pytest

from sepcube.constructions import (
    Graph,
    edge_hull_relaxation,
    edge_indicator,
    edge_polytope_of_graph,
    halfsquare_separator,
    pairwise_polytope,
)
from sepcube.cube import BoolSet
from sepcube.polytope import AffineMap, ExtendedFormulation, HPolytope, LinConstraint, box
from sepcube.project import (
    OptStatus,
    ResourceCapError,
    ef_boolean_points,
    empty_polytope,
    fm_eliminate,
    is_contained,
    is_empty,
    is_valid,
    maximize_linear,
    project_onto,
)

from oracles import satisfies, vertex_max, vertices

le, ge, eq = LinConstraint.le, LinConstraint.ge, LinConstraint.eq


def same_set_on_grid(P, Q, lo=-3, hi=3, den=2):
    """Compare membership of two polytopes on a small rational grid."""
    import itertools

    vals = [Fraction(k, den) for k in range(lo * den, hi * den + 1)]
    return all(P.contains(x) == Q.contains(x) for x in itertools.product(vals, repeat=P.dim))


def test_fm_substitution_example():
    # coordinates (x, y): 0 <= y <= 1, x = y
    P = HPolytope(2, [ge([0, 1], 0), le([0, 1], 1), eq([1, -1], 0)])
    R = fm_eliminate(P, 1)
    assert R.dim == 1
    assert same_set_on_grid(R, box(1))


def test_fm_pairing_example():
    P = HPolytope(2, [le([1, 1], 1), le([1, -1], 1)])
    R = fm_eliminate(P, 1)
    assert same_set_on_grid(R, HPolytope(1, [le([1], 1)]))
    assert [c.integer_row() for c in R.constraints] == [((1,), 1, False)]


def test_fm_infeasibility_preserved():
    P = HPolytope(2, [le([0, 1], 0), ge([0, 1], 1)])
    R = fm_eliminate(P, 1)
    assert any(not any(c.coeffs) and c.integer_row()[1] < 0 for c in R.constraints)
    assert is_empty(R) and is_empty(P)


def test_project_box():
    R = project_onto(box(3), [0, 1])
    assert R.dim == 2
    assert same_set_on_grid(R, box(2))


def test_project_point():
    P = HPolytope(2, [eq([1, 0], 1), eq([0, 1], 2)])
    R = project_onto(P, [0])
    assert same_set_on_grid(R, HPolytope(1, [eq([1], 1)]))


def test_project_index_errors():
    with pytest.raises(IndexError):
        fm_eliminate(box(2), 2)
    with pytest.raises(IndexError):
        project_onto(box(2), [5])


def test_maximize_examples():
    assert maximize_linear(box(2), [1, 1]).value == 2
    assert maximize_linear(HPolytope(1, [ge([1], 0)]), [1]).status is OptStatus.UNBOUNDED
    assert maximize_linear(empty_polytope(2), [1, 0]).status is OptStatus.INFEASIBLE
    # 4-cycle 1-2-3-4-1
    R = edge_polytope_of_graph(Graph(4, [(0, 1), (1, 2), (2, 3), (3, 0)]))
    for i in range(4):
        m = maximize_linear(R, [int(j == i) for j in range(4)])
        assert m.status is OptStatus.OPTIMAL and m.value == 1


@pytest.mark.parametrize("d", range(1, 7))
def test_maximize_box_all_ones(d):
    assert maximize_linear(box(d), [1] * d).value == d


def test_is_valid_examples():
    assert is_valid(box(2), le([1, 1], 2))
    assert not is_valid(box(2), le([1, 1], 1))
    assert is_valid(empty_polytope(2), le([1, 1], -5))
    assert is_valid(HPolytope(2, [eq([1, 1], 1)]), eq([2, 2], 2))
    assert not is_valid(box(2), eq([1, 0], 0))


def test_is_valid_bipartite_relaxation():
    G = Graph(6, [(0, 3), (0, 4), (1, 4), (2, 5)], ([0, 1, 2], [3, 4, 5]))
    R = edge_hull_relaxation(G)
    for i, j in G.non_edges():
        c = [0] * 6
        c[i] = c[j] = 1
        assert is_valid(R, le(c, 1))


def test_is_contained_examples():
    assert is_contained(box(2), box(2, 0, 2))
    assert not is_contained(box(2, 0, 2), box(2))


def test_edge_indicators_in_relaxation(rng):
    for _ in range(100):
        nv = rng.randint(2, 10)
        k = rng.randint(1, nv - 1)
        G = Graph(nv, [(u, v) for u in range(k) for v in range(k, nv) if rng.random() < 0.5], (range(k), range(k, nv)))
        R = edge_hull_relaxation(G)
        # conv(edge indicators) is contained iff every vertex is a member
        assert all(R.contains(edge_indicator(G, u, v)) for u, v in G.edges())


def test_ef_boolean_points_examples():
    assert ef_boolean_points(ExtendedFormulation(box(2), AffineMap.identity(2))) == BoolSet.full(2)
    A = BoolSet.from_points(2, ["10"])
    assert ef_boolean_points(halfsquare_separator(A)) == A
    A = BoolSet.from_points(2, ["11", "00"])
    assert ef_boolean_points(halfsquare_separator(A)) == A
    assert ef_boolean_points(ExtendedFormulation(empty_polytope(3), AffineMap.identity(3))) == BoolSet.empty(3)


def test_resource_cap():
    ef = halfsquare_separator(BoolSet.from_int(6, random.Random(2).getrandbits(64)))
    with pytest.raises(ResourceCapError):
        ef_boolean_points(ef, cap=50)


def random_bounded(rng, d, m):
    cons = list(box(d, -2, 2).constraints)
    for _ in range(m):
        cons.append(
            LinConstraint(
                [rng.randint(-3, 3) for _ in range(d)],
                rng.choice(["<=", ">=", "<=", ">=", "="]),
                rng.randint(-3, 3),
            )
        )
    return HPolytope(d, cons)


def test_maximize_matches_vertex_enumeration():
    rng = random.Random(17)
    for _ in range(150):
        d = rng.randint(1, 4)
        P = random_bounded(rng, d, rng.randint(0, 5))
        c = [Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(d)]
        expect = vertex_max(P, c)
        got = maximize_linear(P, c)
        if expect is None:
            assert got.status is OptStatus.INFEASIBLE
        else:
            assert got.status is OptStatus.OPTIMAL and got.value == expect


def fiber(P, keep, x):
    """The slice of ``P`` over ``x`` in the kept coordinates, as a polytope in the rest."""
    rest = [i for i in range(P.dim) if i not in keep]
    cons = []
    for c in P.constraints:
        shift = sum(c.coeffs[i] * v for i, v in zip(keep, x))
        cons.append(LinConstraint([c.coeffs[i] for i in rest], c.rel, c.rhs - shift))
    return HPolytope(len(rest), cons)


def test_projection_soundness():
    rng = random.Random(23)
    for _ in range(60):
        d = rng.randint(2, 5)
        P = random_bounded(rng, d, rng.randint(0, 7))
        keep = sorted(rng.sample(range(d), rng.randint(1, d - 1)))
        R = project_onto(P, keep)
        for _ in range(15):
            x = [Fraction(rng.randint(-6, 6), rng.randint(1, 3)) for _ in keep]
            lifted = bool(vertices(fiber(P, keep, x)))
            assert R.contains(x) == lifted


def test_projection_keeps_vertices_shadows():
    rng = random.Random(29)
    for _ in range(40):
        d = rng.randint(2, 4)
        P = random_bounded(rng, d, rng.randint(0, 5))
        keep = sorted(rng.sample(range(d), rng.randint(1, d - 1)))
        R = project_onto(P, keep)
        for v in vertices(P):
            assert satisfies(R, [v[i] for i in keep])
        assert is_empty(R) == (not vertices(P))


def test_pairwise_polytope_counts():
    assert len(pairwise_polytope(Graph(4, [(i, j) for i in range(4) for j in range(i + 1, 4)]))) == 0
    assert len(pairwise_polytope(Graph(3, []))) == 3
