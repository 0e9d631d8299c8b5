"""Seeded random instances for fuzzing and the acceptance suites."""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np

from .core import CornerSystem, SubSystem, Universe
from .instances import build_graph_universe, build_powerset_universe
from .oracle import brute_profiles
from .profiles import ProfileSet, is_closed
from .quotient import is_orderly
from .regularization import make_corner_system

STRATEGIES = ("induced", "poset_sup", "comparable")


def random_connected_graph(rng: random.Random, max_vertices: int = 6, min_vertices: int = 2):
    """Edges of a connected graph: a random spanning tree plus random extra edges."""
    n = rng.randint(min_vertices, max_vertices)
    verts = list(range(1, n + 1))
    edges = set()
    for i in range(1, n):
        j = rng.randrange(i)
        edges.add((verts[j], verts[i]))
    p = rng.random()
    for i in range(n):
        for j in range(i + 1, n):
            if (verts[i], verts[j]) not in edges and rng.random() < p:
                edges.add((verts[i], verts[j]))
    return sorted(edges)


def random_graph_universe(seed: int, max_vertices: int = 6) -> Universe:
    rng = random.Random(seed)
    edges = random_connected_graph(rng, max_vertices)
    return build_graph_universe(edges, name=f"random-graph-{seed}")


@dataclass
class CornerInstance:
    seed: int
    universe: Universe
    system: CornerSystem
    profiles: ProfileSet
    strategy: str

    def __repr__(self):
        return (f"CornerInstance(seed={self.seed}, {self.universe.name}, pairs={len(self.system) // 2}, "
                f"profiles={len(self.profiles)}, {self.strategy})")


def _pick_pairs(rng: random.Random, U: Universe, candidates: np.ndarray, max_pairs: int) -> np.ndarray:
    reps = [int(c) for c in candidates if c <= U.inv[c]]
    rng.shuffle(reps)
    reps = reps[: rng.randint(min(3, len(reps), max_pairs), max(1, min(max_pairs, len(reps))))]
    return np.unique(np.array(reps + [int(U.inv[r]) for r in reps], dtype=np.int64))


def _base(rng: random.Random, regular: bool):
    if rng.random() < 0.5:
        U = build_powerset_universe(rng.randint(3, 5))
        x = np.arange(len(U))
        small = U.leq[x, U.inv]
    else:
        U = build_graph_universe(random_connected_graph(rng, 5, 3), name="random-graph")
        small = U.leq[np.arange(len(U)), U.inv]
    cand = np.flatnonzero(~(small | small[U.inv])) if regular else np.arange(len(U))
    return U, cand


def random_corner_instance(seed: int, *, regular: bool = True, max_pairs: int = 12,
                           min_profiles: int = 2, attempts: int = 200) -> CornerInstance:
    """A random corner system with a profile family it is orderly for.

    Elements are drawn from a small powerset or graph universe (avoiding
    small separations when ``regular``), a corner strategy is applied, and the
    family is a random subset of the oracle-enumerated profiles.  Draws are
    repeated until the family has ``min_profiles`` closed profiles and the
    system is orderly for it.
    """
    rng = random.Random(seed)
    for _ in range(attempts):
        U, cand = _base(rng, regular)
        if not len(cand):
            continue
        ids = _pick_pairs(rng, U, cand, max_pairs)
        strategy = rng.choice(STRATEGIES)
        S = make_corner_system(SubSystem(U, ids), strategy)
        every = brute_profiles(S)
        if len(every) < min_profiles:
            continue
        pool = list(every)
        rng.shuffle(pool)
        for cut in range(len(pool), min_profiles - 1, -1):
            sub = ProfileSet(sorted(pool[:cut], key=lambda P: P.key))
            if all(is_closed(P) for P in sub) and is_orderly(S, sub):
                return CornerInstance(seed, U, S, sub, strategy)
    raise RuntimeError(f"no orderly instance found for seed {seed}")
