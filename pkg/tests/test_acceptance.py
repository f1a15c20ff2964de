"""Acceptance criteria, one test each, at the stated sizes and time limits.

Every test records a PASS/FAIL line that is printed in the terminal summary.
Tolerances are exact: all comparisons are on exact rationals or bit masks.
"""
import itertools
import random
import time
from contextlib import contextmanager

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from sepcube.constructions import (
    Graph,
    Method,
    OddNotContainedError,
    edge_hull_relaxation,
    edge_indicator,
    edge_polytope,
    halfspace_even_outside,
    halfsquare_separator,
    hamming_separator,
    odd_exclusion_count,
    pairwise_polytope,
    verify_separation_ef,
)
from sepcube.cube import BoolSet, odd_set, weight2_set
from sepcube.matrices import (
    ene_decompose_bipartite,
    ene_decompose_general,
    ene_matrix,
    general_count_bound,
    verify_decomposition,
)
from sepcube.polytope import boolean_points
from sepcube.project import OptStatus, ef_boolean_points, is_contained, maximize_linear
from sepcube.suite import GENERAL_COUNT_CONSTANT, random_odd_halfspace


class Tally:
    def __init__(self):
        self.checked = 0
        self.failures = []

    def check(self, ok, detail):
        self.checked += 1
        if not ok and len(self.failures) < 5:
            self.failures.append(detail)


@contextmanager
def criterion(number, title, limit):
    tally = Tally()
    start = time.perf_counter()
    try:
        yield tally
    finally:
        elapsed = time.perf_counter() - start
        ok = not tally.failures and elapsed < limit
        ACCEPTANCE_LINES.append(
            f"{'PASS' if ok else 'FAIL'} criterion {number}: {title} "
            f"[{tally.checked} checks, {elapsed:.1f}s of {limit}s]"
            + (f" first failures: {tally.failures}" if tally.failures else "")
        )
    assert not tally.failures, tally.failures
    assert elapsed < limit, f"took {elapsed:.1f}s, limit {limit}s"


def all_sets(n):
    return (BoolSet.from_int(n, v) for v in range(1 << (1 << n)))


def random_sets(rng, n, count):
    return (BoolSet.from_int(n, rng.getrandbits(1 << n)) for _ in range(count))


def unit(n, i):
    return [int(j == i) for j in range(n)]


def test_criterion_1_hamming():
    rng = random.Random("criterion-1")
    with criterion(1, "Hamming separator, exhaustive n<=3 and 200 random A for n=4..10", 30) as t:
        for n in range(1, 11):
            sets = all_sets(n) if n <= 3 else random_sets(rng, n, 200)
            for A in sets:
                P = hamming_separator(A)
                t.check(boolean_points(P) == A and len(P) == 1 << n, f"n={n} {A!r}")


def subsets_of_weight2(n):
    codes = np.flatnonzero(weight2_set(n).mask)
    for bits in range(1 << len(codes)):
        yield BoolSet.from_points(n, [int(codes[i]) for i in range(len(codes)) if (bits >> i) & 1])


def test_criterion_2_edge_polytope():
    rng = random.Random("criterion-2")
    with criterion(2, "edge polytope, exhaustive n<=4, 200 random H for n=5..14, x_i<=1 for n<=6", 60) as t:
        for n in range(2, 15):
            if n <= 4:
                sets = subsets_of_weight2(n)
            else:
                w2 = weight2_set(n).mask
                sets = (BoolSet(n, w2 & (np.array([rng.random() for _ in range(1 << n)]) < 0.5)) for _ in range(200))
            for H in sets:
                R = edge_polytope(H)
                t.check(boolean_points(R) == H and R.n_inequalities == 2 * n, f"n={n} {H!r}")
                if n <= 6:
                    for i in range(n):
                        m = maximize_linear(R, unit(n, i))
                        bounded = m.status is OptStatus.INFEASIBLE or (m.status is OptStatus.OPTIMAL and m.value <= 1)
                        t.check(bounded, f"n={n} {H!r} x_{i + 1} max {m}")


def test_criterion_3_halfsquare():
    rng = random.Random("criterion-3")
    with criterion(3, "halfsquare separator by canonical lift, exhaustive n<=3, 100 random A for n=4..10", 60) as t:
        for n in range(1, 11):
            sets = all_sets(n) if n <= 3 else random_sets(rng, n, 100)
            for A in sets:
                ef = halfsquare_separator(A)
                rep = verify_separation_ef(ef, A)
                size = ef.part.n1 + ef.part.n2
                count_ok = ef.Q.n_inequalities == 2 * size <= 4 * 2 ** ((n + 1) // 2)
                t.check(rep.passed and rep.method is Method.CANONICAL_LIFT and count_ok, f"n={n} {A!r}")


def test_criterion_4_oracle_equivalence():
    rng = random.Random("criterion-4")
    with criterion(4, "FM oracle verdicts equal canonical-lift verdicts, exhaustive n<=3, 200 random A at n=4", 600) as t:
        for n in range(1, 5):
            sets = all_sets(n) if n <= 3 else random_sets(rng, n, 200)
            for A in sets:
                ef = halfsquare_separator(A)
                lift = verify_separation_ef(ef, A, Method.CANONICAL_LIFT).computed
                t.check(ef_boolean_points(ef) == lift, f"n={n} {A!r}")


def test_criterion_5_parity_halfspace():
    rng = random.Random("criterion-5")
    with criterion(5, "parity half-space check, integer grids n=2..4 and 10^4 random half-spaces per n<=10", 120) as t:
        for n in (2, 3, 4):
            for a in itertools.product(range(-2, 3), repeat=n):
                for b in range(-2, 3):
                    try:
                        out = halfspace_even_outside(a, b, n)
                    except OddNotContainedError:
                        continue
                    t.check(len(out) <= 1, f"n={n} a={a} b={b}")
        for n in range(1, 11):
            for _ in range(10_000):
                a, b = random_odd_halfspace(rng, n)
                t.check(len(halfspace_even_outside(a, b, n)) <= 1, f"n={n} a={a} b={b}")


def test_criterion_6_parity_tightness():
    with criterion(6, "Hamming separator of ODD_n has exactly 2^(n-1) exclusion rows, n<=12", 5) as t:
        for n in range(1, 13):
            t.check(odd_exclusion_count(n) == 1 << (n - 1), f"n={n}")
        t.check(boolean_points(hamming_separator(odd_set(12))) == odd_set(12), "n=12 membership")


def random_bipartite(rng, nv):
    k = rng.randint(1, nv - 1)
    p = rng.random()
    return Graph(nv, [(u, v) for u in range(k) for v in range(k, nv) if rng.random() < p], (range(k), range(k, nv)))


def test_criterion_7_bipartite_relaxation():
    rng = random.Random("criterion-7")
    with criterion(7, "R'_G holds every edge indicator and lies in Q_G, 50 bipartite graphs <=10 vertices", 120) as t:
        for _ in range(50):
            G = random_bipartite(rng, rng.randint(2, 10))
            R = edge_hull_relaxation(G)
            left = G.bipartition[0]
            t.check(all(R.contains(edge_indicator(G, u, v)) for u, v in G.edges()), f"indicators {G!r}")
            t.check(is_contained(R, pairwise_polytope(G)), f"containment {G!r}")
            t.check(R.n_inequalities == G.nv + len(left) and R.n_equalities == 2, f"counts {G!r}")


def test_criterion_8_ene_decomposition():
    rng = random.Random("criterion-8")
    title = f"ENE partitions, 500 bipartite <=40 vertices (<=2nv), 200 general <=32 vertices (<={GENERAL_COUNT_CONSTANT} nv log2 nv)"
    with criterion(8, title, 120) as t:
        for _ in range(500):
            G = random_bipartite(rng, rng.randint(2, 40))
            D = ene_decompose_bipartite(G)
            t.check(verify_decomposition(ene_matrix(G), D).passed and len(D) <= 2 * G.nv, f"bipartite {G!r}")
        for _ in range(200):
            nv = rng.randint(2, 32)
            p = rng.random()
            G = Graph(nv, [e for e in itertools.combinations(range(nv), 2) if rng.random() < p])
            D = ene_decompose_general(G)
            bound = general_count_bound(nv, GENERAL_COUNT_CONSTANT)
            t.check(verify_decomposition(ene_matrix(G), D).passed and len(D) <= bound, f"general {G!r}")


def test_criterion_9_lower_bounds_not_reproducible():
    ACCEPTANCE_LINES.append(
        "N/A  criterion 9: the 2^(n/3) and 2^(n/2) separation lower bounds are counting results "
        "over all polytopes; no desk-scale experiment certifies them (covered by criteria 1-8)"
    )
    pytest.skip("lower bounds over all separating polytopes are not reproducible by experiment")
