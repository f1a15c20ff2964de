"""Seeded randomized property checks behind the ``suite`` subcommand."""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .constructions import (
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
from .cube import BoolSet, check_dimension, cube_table, weight2_set
from .matrices import (
    ene_decompose_bipartite,
    ene_decompose_general,
    ene_matrix,
    general_count_bound,
    verify_decomposition,
)
from .polytope import boolean_points
from .project import OptStatus, is_contained, maximize_linear

# Rectangle-count constant for general graphs: count <= C * nv * log2(nv).
GENERAL_COUNT_CONSTANT = 3


@dataclass
class PropertyResult:
    name: str
    checked: int = 0
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def fail(self, detail: str) -> None:
        if len(self.failures) < 20:
            self.failures.append(detail)

    def to_json(self) -> dict:
        return {"name": self.name, "checked": self.checked, "passed": self.passed, "failures": self.failures}


@dataclass
class SuiteConfig:
    seed: int = 7
    max_n: int = 8
    trials: int = 20
    n: Optional[int] = None
    exhaustive: bool = False

    def dims(self, lo: int, hi: int) -> range:
        if self.n is not None:
            return range(self.n, self.n + 1) if lo <= self.n <= hi else range(0)
        return range(lo, min(hi, self.max_n) + 1)


def random_set(rng: random.Random, n: int) -> BoolSet:
    return BoolSet.from_int(n, rng.getrandbits(1 << n))


def all_sets(n: int):
    for value in range(1 << (1 << n)):
        yield BoolSet.from_int(n, value)


def random_weight2_subset(rng: random.Random, n: int) -> BoolSet:
    mask = weight2_set(n).mask & np.array([rng.random() < 0.5 for _ in range(1 << n)])
    return BoolSet(n, mask)


def random_bipartite(rng: random.Random, nv: int, density: Optional[float] = None) -> Graph:
    k = rng.randint(1, nv - 1)
    p = rng.random() if density is None else density
    left, right = range(k), range(k, nv)
    return Graph(nv, [(u, v) for u in left for v in right if rng.random() < p], (left, right))


def random_graph(rng: random.Random, nv: int) -> Graph:
    p = rng.random()
    return Graph(nv, [(u, v) for u in range(nv) for v in range(u + 1, nv) if rng.random() < p])


def random_odd_halfspace(rng: random.Random, n: int):
    """Rejection sampling: propose ``b`` near the smallest odd value, keep it if feasible."""
    bits, odd = cube_table(n)
    odd_bits = bits[odd]
    while True:
        a = [Fraction(rng.randint(-20, 20), rng.randint(1, 12)) for _ in range(n)]
        den = math.lcm(*(x.denominator for x in a))
        ints = np.array([int(x * den) for x in a], dtype=np.int64)
        low = Fraction(int((odd_bits @ ints).min()), den)
        b = low + Fraction(rng.randint(-30, 30), rng.randint(1, 12))
        if b <= low:
            return a, b


def check_hamming(cfg: SuiteConfig, rng: random.Random) -> PropertyResult:
    res = PropertyResult("hamming")
    for n in cfg.dims(1, cfg.max_n):
        sets = all_sets(n) if n <= 3 else (random_set(rng, n) for _ in range(cfg.trials))
        for A in sets:
            P = hamming_separator(A)
            res.checked += 1
            if len(P) != 1 << n or boolean_points(P) != A:
                res.fail(f"n={n} A={A!r}")
    return res


def check_edge(cfg: SuiteConfig, rng: random.Random) -> PropertyResult:
    res = PropertyResult("edge")
    for n in cfg.dims(2, min(cfg.max_n, 14)):
        if n <= 4:
            w2 = np.flatnonzero(weight2_set(n).mask)
            sets = (
                BoolSet.from_points(n, [int(w2[i]) for i in range(len(w2)) if (bits >> i) & 1])
                for bits in range(1 << len(w2))
            )
        else:
            sets = (random_weight2_subset(rng, n) for _ in range(cfg.trials))
        for H in sets:
            R = edge_polytope(H)
            res.checked += 1
            if R.n_inequalities != 2 * n or boolean_points(R) != H:
                res.fail(f"n={n} H={H!r}")
                continue
            if n <= 6:
                for i in range(n):
                    m = maximize_linear(R, [int(j == i) for j in range(n)])
                    if m.status is OptStatus.UNBOUNDED or (m.status is OptStatus.OPTIMAL and m.value > 1):
                        res.fail(f"n={n} H={H!r} coordinate {i + 1} max {m}")
    return res


def check_halfsquare(cfg: SuiteConfig, rng: random.Random) -> PropertyResult:
    res = PropertyResult("halfsquare")
    for n in cfg.dims(1, cfg.max_n):
        sets = all_sets(n) if n <= 3 else (random_set(rng, n) for _ in range(cfg.trials))
        for A in sets:
            ef = halfsquare_separator(A)
            res.checked += 1
            size = ef.part.n1 + ef.part.n2
            ok = verify_separation_ef(ef, A).passed
            ok = ok and ef.Q.n_inequalities == 2 * size <= 4 * 2 ** ((n + 1) // 2)
            if not ok:
                res.fail(f"n={n} A={A!r}")
    return res


def check_oracle(cfg: SuiteConfig, rng: random.Random) -> PropertyResult:
    res = PropertyResult("oracle")
    for n in cfg.dims(1, min(cfg.max_n, 4)):
        sets = all_sets(n) if n <= 3 else (random_set(rng, n) for _ in range(cfg.trials))
        for A in sets:
            ef = halfsquare_separator(A)
            res.checked += 1
            lift = verify_separation_ef(ef, A, Method.CANONICAL_LIFT)
            fm = verify_separation_ef(ef, A, Method.FM_ORACLE)
            if lift.computed != fm.computed:
                res.fail(f"n={n} A={A!r}")
    return res


def check_odd_halfspace(cfg: SuiteConfig, rng: random.Random) -> PropertyResult:
    res = PropertyResult("odd-halfspace")
    grid_dims = [n for n in (2, 3, 4) if n in cfg.dims(2, 4)]
    for n in grid_dims:
        for a in itertools.product(range(-2, 3), repeat=n):
            for b in range(-2, 3):
                try:
                    out = halfspace_even_outside(a, b, n)
                except OddNotContainedError:
                    continue
                res.checked += 1
                if len(out) > 1:
                    res.fail(f"n={n} a={a} b={b} outside={[str(p) for p in out]}")
    if cfg.exhaustive:
        return res
    for n in cfg.dims(2, min(cfg.max_n, 10)):
        for _ in range(cfg.trials):
            a, b = random_odd_halfspace(rng, n)
            res.checked += 1
            if len(halfspace_even_outside(a, b, n)) > 1:
                res.fail(f"n={n} a={a} b={b}")
    return res


def check_parity_count(cfg: SuiteConfig, rng: random.Random) -> PropertyResult:
    res = PropertyResult("parity-count")
    for n in cfg.dims(1, min(cfg.max_n, 12)):
        res.checked += 1
        if odd_exclusion_count(n) != 1 << (n - 1):
            res.fail(f"n={n}")
    return res


def check_relaxation(cfg: SuiteConfig, rng: random.Random) -> PropertyResult:
    res = PropertyResult("relaxation")
    for _ in range(cfg.trials):
        G = random_bipartite(rng, rng.randint(2, 10))
        left = G.bipartition[0]
        R = edge_hull_relaxation(G)
        res.checked += 1
        ok = R.n_inequalities == G.nv + len(left) and R.n_equalities == 2
        ok = ok and all(R.contains(edge_indicator(G, u, v)) for u, v in G.edges())
        ok = ok and is_contained(R, pairwise_polytope(G))
        if not ok:
            res.fail(repr(G))
    return res


def check_ene(cfg: SuiteConfig, rng: random.Random) -> PropertyResult:
    res = PropertyResult("ene")
    for _ in range(cfg.trials):
        G = random_bipartite(rng, rng.randint(2, 40))
        D = ene_decompose_bipartite(G)
        res.checked += 1
        if not verify_decomposition(ene_matrix(G), D).passed or len(D) > 2 * G.nv:
            res.fail(f"bipartite {G!r}")
    for _ in range(cfg.trials):
        G = random_graph(rng, rng.randint(2, 32))
        D = ene_decompose_general(G)
        res.checked += 1
        bound = general_count_bound(G.nv, GENERAL_COUNT_CONSTANT)
        if not verify_decomposition(ene_matrix(G), D).passed or len(D) > bound:
            res.fail(f"general {G!r}")
    return res


PROPERTIES: dict[str, Callable[[SuiteConfig, random.Random], PropertyResult]] = {
    "hamming": check_hamming,
    "edge": check_edge,
    "halfsquare": check_halfsquare,
    "oracle": check_oracle,
    "odd-halfspace": check_odd_halfspace,
    "parity-count": check_parity_count,
    "relaxation": check_relaxation,
    "ene": check_ene,
}

ALIASES = {"ode-halfspace": "odd-halfspace"}


def run_suite(cfg: SuiteConfig, only: Optional[list[str]] = None) -> list[PropertyResult]:
    check_dimension(cfg.max_n)
    if cfg.n is not None:
        check_dimension(cfg.n)
    names = [ALIASES.get(x, x) for x in only] if only else list(PROPERTIES)
    unknown = [x for x in names if x not in PROPERTIES]
    if unknown:
        raise KeyError(f"unknown properties: {', '.join(unknown)}")
    results = []
    for name in names:
        # each property gets its own stream so selections stay reproducible
        rng = random.Random(f"{cfg.seed}:{name}")
        results.append(PROPERTIES[name](cfg, rng))
    return results
