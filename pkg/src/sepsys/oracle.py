"""Brute-force ground truth.

Nothing here calls into the builders: profiles are found by scanning every
orientation, and trees are re-checked straight from the definitions using
only the raw tables (``inv``, ``leq``, corner/join, ``order``).
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field

import numpy as np

from .core import CornerSystem, Universe
from .instances import limits
from .profiles import Profile, ProfileSet


class OracleLimitExceeded(ValueError):
    pass


@dataclass
class VerificationReport:
    instance: str = ""
    checks: list[str] = field(default_factory=list)
    violations: list[tuple[str, tuple, str]] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    def fail(self, check: str, witness: tuple, detail: str = ""):
        self.violations.append((check, witness, detail))

    def lines(self) -> list[str]:
        out = [f"instance {self.instance}: {'PASS' if self.ok else 'FAIL'}"]
        out += [f"  check {c}: {self.timings.get(c, 0.0):.3f}s" for c in self.checks]
        out += [f"  violation {c}: witness {w} {d}".rstrip() for c, w, d in self.violations]
        return out


# ---------------------------------------------------------------------------
# profiles by exhaustive orientation scan


def brute_profiles(S: CornerSystem, limit: int | None = None, chunk: int = 1 << 16) -> ProfileSet:
    """Every profile of S, by testing all 2^pairs orientations against the definition.

    Orientations are bitmasks over the local elements, so S may have at most
    64 elements (the pair limit keeps it well below that).
    """
    if limit is None:
        limit = limits()["brute_pairs"]
    m = len(S)
    ids = S.ids
    inv = S.inv
    pairs = [(i, int(inv[i])) for i in range(m) if i < inv[i]]
    if len(pairs) > limit:
        raise OracleLimitExceeded(f"{len(pairs)} involution pairs exceed the oracle limit {limit}")
    if m > 64:
        raise OracleLimitExceeded(f"{m} elements exceed the 64-element bitmask")
    one = np.uint64(1)
    bit = [one << np.uint64(i) for i in range(m)]
    # forbidden[p]: elements q of another pair with p* <= q
    forbidden = []
    for p in range(m):
        f = np.uint64(0)
        for q in range(m):
            if q != p and q != inv[p] and S.leq[inv[p], q]:
                f |= bit[q]
        forbidden.append(f)
    # s, t chosen and (s v t)* chosen is forbidden
    triples = sorted({bit[s] | bit[t] | bit[int(inv[S.corner[s, t]])]
                      for s in range(m) for t in range(m) if S.corner[s, t] >= 0})
    fixed = np.uint64(0)
    for i in range(m):
        if inv[i] == i:
            fixed |= bit[i]

    found = []
    total = 1 << len(pairs)
    for lo in range(0, total, chunk):
        codes = np.arange(lo, min(total, lo + chunk), dtype=np.uint64)
        O = np.full(len(codes), fixed, dtype=np.uint64)
        for b, (a, a_inv) in enumerate(pairs):
            on = (codes >> np.uint64(b)) & one
            O |= np.where(on == 1, bit[a_inv], bit[a])
        bad = np.zeros(len(O), dtype=bool)
        for p in range(m):
            if forbidden[p]:
                bad |= ((O & bit[p]) != 0) & ((O & forbidden[p]) != 0)
        O = O[~bad]
        for w in triples:
            if not len(O):
                break
            O = O[(O & w) != w]
        for o in O.tolist():
            found.append(tuple(sorted(int(ids[i]) for i in range(m) if o >> i & 1)))
    found.sort()
    order = getattr(S, "k", None)
    return ProfileSet(Profile(S, frozenset(c), order) for c in found)


# ---------------------------------------------------------------------------
# distinguishing, from the definition


def _dist(U: Universe, s: int, P: Profile, Q: Profile) -> bool:
    si = int(U.inv[s])
    if si == s:
        return False
    return (s in P.chosen and si in Q.chosen) or (si in P.chosen and s in Q.chosen)


def brute_min_order(P: Profile, Q: Profile) -> int | None:
    """Least order of a separation distinguishing P and Q, or None."""
    U = P.system.universe
    best = None
    for s in range(len(U)):
        if _dist(U, s, P, Q):
            o = int(U.order[s])
            if best is None or o < best:
                best = o
    return best


def _nested(U: Universe, s: int, t: int) -> bool:
    si, ti = int(U.inv[s]), int(U.inv[t])
    L = U.leq
    return bool(L[s, t] or L[s, ti] or L[si, t] or L[si, ti])


def _trivial(U: Universe, s: int) -> bool:
    si = int(U.inv[s])
    for t in range(len(U)):
        ti = int(U.inv[t])
        if t in (s, si):
            continue
        if U.leq[s, t] and U.leq[s, ti] and s != t and s != ti:
            return True
    return False


def verify_tree(T, profiles, U: Universe, instance: str = "") -> VerificationReport:
    """Check T against the tree-of-tangles guarantees for ``profiles`` in U.

    Checks: tree set (nested, no trivial / co-trivial / degenerate element),
    every distinguishable pair efficiently distinguished by T, every element of
    T efficiently distinguishing some pair, and the maximal-element property.
    """
    rep = VerificationReport(instance=instance)
    profiles = list(profiles)
    T = sorted({int(t) for t in T} | {int(U.inv[t]) for t in T})

    def run(name, fn):
        t0 = time.perf_counter()
        fn()
        rep.checks.append(name)
        rep.timings[name] = time.perf_counter() - t0

    def tree_set():
        for s in T:
            if int(U.inv[s]) == s:
                rep.fail("tree-set", (s,), "degenerate element")
            elif _trivial(U, s):
                rep.fail("tree-set", (s,), "trivial element")
            elif _trivial(U, int(U.inv[s])):
                rep.fail("tree-set", (s,), "co-trivial element")
        for s, t in itertools.combinations(T, 2):
            if not _nested(U, s, t):
                rep.fail("tree-set", (s, t), "crossing pair")

    mins = {}

    def min_orders():
        for i, j in itertools.combinations(range(len(profiles)), 2):
            mins[i, j] = brute_min_order(profiles[i], profiles[j])

    def efficient():
        for (i, j), m in mins.items():
            if m is None:
                continue
            if not any(_dist(U, t, profiles[i], profiles[j]) and U.order[t] == m for t in T):
                rep.fail("efficient-distinguishing", (i, j), f"no element of order {m} separates them")

    def useful():
        for t in T:
            if not any(m is not None and U.order[t] == m and _dist(U, t, profiles[i], profiles[j])
                       for (i, j), m in mins.items()):
                rep.fail("usefulness", (t,), "distinguishes no pair efficiently")

    def maximal():
        for i, P in enumerate(profiles):
            X = [t for t in T if t in P.chosen]
            tops = [x for x in X if not any(y != x and U.leq[x, y] for y in X)]
            for x in X:
                if not any(U.leq[x, y] for y in tops):
                    rep.fail("maximal-element", (i, x), "not below a maximal element of P ∩ T")

    run("tree-set", tree_set)
    run("min-orders", min_orders)
    run("efficient-distinguishing", efficient)
    run("usefulness", useful)
    run("maximal-element", maximal)
    return rep


def verify_abstract(T, S: CornerSystem, profiles) -> VerificationReport:
    """The three guarantees of the abstract tree-set construction, by definition.

    T must be nested and free of trivial/degenerate elements in S, separate
    every two distinct profiles, consist of separations that each separate
    some pair, and satisfy the maximal-element property.
    """
    rep = VerificationReport(instance="corner-system")
    profiles = list(profiles)
    pos = {int(g): i for i, g in enumerate(S.ids)}
    inv = {int(S.ids[i]): int(S.ids[S.inv[i]]) for i in range(len(S))}
    T = sorted({int(t) for t in T} | {inv[int(t)] for t in T})

    def le(a, b):
        return bool(S.leq[pos[a], pos[b]])

    def trivial(s):
        for t in inv:
            if t in (s, inv[s]):
                continue
            if s != t and s != inv[t] and le(s, t) and le(s, inv[t]):
                return True
        return False

    def sep(t, P, Q):
        return t != inv[t] and ((t in P.chosen and inv[t] in Q.chosen) or (inv[t] in P.chosen and t in Q.chosen))

    rep.checks += ["tree-set", "distinguishes-all", "usefulness", "maximal-element"]
    for s in T:
        if inv[s] == s or trivial(s) or trivial(inv[s]):
            rep.fail("tree-set", (s,), "trivial, co-trivial or degenerate")
    for s, t in itertools.combinations(T, 2):
        if not (le(s, t) or le(s, inv[t]) or le(inv[s], t) or le(inv[s], inv[t])):
            rep.fail("tree-set", (s, t), "crossing pair")
    for i, j in itertools.combinations(range(len(profiles)), 2):
        if profiles[i].chosen != profiles[j].chosen and not any(sep(t, profiles[i], profiles[j]) for t in T):
            rep.fail("distinguishes-all", (i, j), "")
    for t in T:
        if not any(sep(t, P, Q) for P, Q in itertools.combinations(profiles, 2)):
            rep.fail("usefulness", (t,), "")
    for i, P in enumerate(profiles):
        X = [t for t in T if t in P.chosen]
        tops = [x for x in X if not any(y != x and le(x, y) for y in X)]
        for x in X:
            if not any(le(x, y) for y in tops):
                rep.fail("maximal-element", (i, x), "")
    return rep
