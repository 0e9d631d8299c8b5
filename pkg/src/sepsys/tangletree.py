"""Trees of tangles, built one order at a time.

Start from ``T_0 = ∅``.  For a k-profile P induced by the family, let Q_P be
the (k+1)-profiles inducing P, N_P the maximal elements of ``P ∩ T_k`` and
U_P the separations every element of N_P points towards.  The order-k
separations of U_P, with the corner map induced by the universe, form a
system in which the restrictions of Q_P can be separated by a tree set T_P.
``T_{k+1}`` is T_k together with every T_P.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import HypothesisViolation, SubSystem, Universe, is_tree_set, maximal_elements, minimal_elements
from .profiles import (
    Distinction,
    Profile,
    ProfileSet,
    distinguishing_mask,
    distinguishes_efficiently,
    induced,
    is_closed,
    is_regular_profile,
    robust_corner,
    robustness_witness,
)
from .quotient import f_image, orderly_witness
from .regularization import tree_set_nonregular


@dataclass(frozen=True)
class LevelState:
    k: int
    tree: frozenset
    profiles: ProfileSet
    certificates: dict = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class FocusContext:
    P: Profile
    Q_P: ProfileSet
    N_P: tuple
    U_P: SubSystem
    tree: frozenset


@dataclass
class TreeOfTangles:
    tree: frozenset
    certificates: dict
    levels: list
    profiles: ProfileSet

    def oriented(self) -> list[int]:
        """One element per involution pair (the smaller id), ascending."""
        if not self.profiles:
            return []
        U = self.profiles[0].universe
        return sorted(t for t in self.tree if t <= U.inv[t])


def _sorted(profiles) -> ProfileSet:
    return ProfileSet(sorted(ProfileSet(profiles), key=lambda P: P.key))


def induced_set(profiles, k: int) -> ProfileSet:
    """Profiles of order at most k induced by the family."""
    return _sorted(induced(P, min(k, P.order)) for P in profiles)


def focus(P: Profile, state: LevelState, profiles) -> FocusContext:
    U = P.universe
    k = P.order
    Q_P = ProfileSet(Q for Q in induced_set(profiles, k + 1)
                     if Q.order == k + 1 and induced(Q, k) == P)
    X = sorted(s for s in P.chosen if s in state.tree)
    N_P = tuple(maximal_elements(U.whole(), X))
    mask = np.ones(len(U), dtype=bool)
    for n in N_P:
        mask &= U.leq[n] | U.leq[n][U.inv]
    ids = np.flatnonzero(mask)
    if not (mask == mask[U.inv]).all():
        raise HypothesisViolation("U_P is not closed under the involution")
    J = U.join[np.ix_(ids, ids)]
    M = U.meet[np.ix_(ids, ids)]
    if not (mask[J].all() and mask[M].all()):
        i, j = np.argwhere(~(mask[J] & mask[M]))[0]
        raise HypothesisViolation("U_P is not closed under joins and meets", witness=(int(ids[i]), int(ids[j])))
    return FocusContext(P, Q_P, N_P, SubSystem(U, ids), state.tree)


def _points_towards(U: Universe, n: int, u: int) -> bool:
    return bool(U.leq[n, u] or U.leq[n, U.inv[u]])


def find_focus_distinguisher(r: int, ctx: FocusContext) -> int:
    """A separation of U_P of order k oriented by Q_P exactly like r.

    Follows the construction: X is the fiber of r among separations of order
    at most k, s its smallest element, N' the elements of N_P below s*, X'
    the members x of X with every element of N' below x*, and t a maximal
    element of X'.  If t is not yet in U_P, corners with an offending n are
    tried in its place, which is where robustness enters.
    """
    P = ctx.P
    U = P.universe
    k = P.order
    Q = tuple(ctx.Q_P)
    S1 = U.subsystem_k(k + 1)
    img = f_image(r, Q, S1)
    if img.is_trivial():
        raise ValueError("r does not separate two profiles of Q_P")
    if not ctx.N_P:
        return int(r)
    X = [x for x in S1 if f_image(x, Q, S1) == img]
    W = U.whole()
    lows = minimal_elements(W, X)
    s = lows[0]
    if len(lows) > 1 or not all(U.leq[s, x] for x in X):
        raise HypothesisViolation("fiber of r has no smallest element", witness=tuple(lows))
    s_inv = int(U.inv[s])
    N1 = [n for n in ctx.N_P if U.leq[n, s_inv]]
    X1 = [x for x in X if all(U.leq[n, U.inv[x]] for n in N1)]
    t = maximal_elements(W, X1)[0]
    in_fiber = {x: True for x in X}
    for _ in range(len(U)):
        bad = [n for n in ctx.N_P if not _points_towards(U, n, t)]
        if not bad:
            if U.order[t] != k:
                raise HypothesisViolation("focus distinguisher has the wrong order", witness=t)
            return int(t)
        n = bad[0]
        if any(U.leq[q, U.inv[n]] for q in X) and n not in N1:
            raise HypothesisViolation("fiber element below n* but n is not in N'", witness=(n, t))
        Q1 = next(q for q in Q if t in q.chosen)
        Q2 = next(q for q in Q if U.inv[t] in q.chosen)
        c = robust_corner(n, t, Q1, Q2)
        c = c if c in in_fiber else int(U.inv[c])
        if c not in in_fiber or c == t:
            raise HypothesisViolation("robust corner leaves the fiber of r", witness=(n, t, c))
        t = c
    raise HypothesisViolation("no focus distinguisher found", witness=r)


def _certify(t: int, Q_P) -> tuple[Profile, Profile]:
    U = Q_P[0].universe
    ti = int(U.inv[t])
    for A in Q_P:
        if t not in A.chosen:
            continue
        for B in Q_P:
            if ti in B.chosen and distinguishes_efficiently(t, A, B) is Distinction.YES_EFFICIENT:
                return A, B
    raise HypothesisViolation("tree element distinguishes no pair of Q_P efficiently", witness=t)


def build_level(state: LevelState, profiles) -> LevelState:
    k = state.k
    tree = set(state.tree)
    certs = dict(state.certificates)
    for P in state.profiles:
        if P.order != k:
            continue
        ctx = focus(P, state, profiles)
        if len(ctx.Q_P) < 2:
            continue
        U = P.universe
        level = SubSystem(U, ctx.U_P.ids[U.order[ctx.U_P.ids] == k])
        keep = set(int(x) for x in level.ids)
        restr = [Profile(level, frozenset(s for s in Q.chosen if s in keep), None) for Q in ctx.Q_P]
        seen = {}
        for i, R in enumerate(restr):
            if R.chosen in seen:
                A, B = ctx.Q_P[seen[R.chosen]], ctx.Q_P[i]
                r = int(np.flatnonzero(distinguishing_mask(A, B))[0])
                u = find_focus_distinguisher(r, ctx)
                raise HypothesisViolation("two profiles of Q_P agree on the order-k separations of U_P",
                                          witness=(k, seen[R.chosen], i, u))
            seen[R.chosen] = i
        w = orderly_witness(level, restr)
        if w is not None:
            raise HypothesisViolation("order-k separations of U_P are not orderly", witness=w)
        T_P = tree_set_nonregular(level, restr)
        for t in T_P:
            certs.setdefault(int(t), _certify(int(t), ctx.Q_P))
        tree |= set(int(t) for t in T_P)
    return LevelState(k + 1, frozenset(tree), induced_set(profiles, k + 1), certs)


def check_preconditions(profiles) -> None:
    for i, P in enumerate(profiles):
        if not is_regular_profile(P):
            raise HypothesisViolation(
                "profile is not regular; use tree_set_nonregular on a single level instead", witness=i)
        w = robustness_witness(P)
        if w is not None:
            raise HypothesisViolation("profile is not robust", witness=(i, w))
        if not is_closed(P):
            raise HypothesisViolation("profile is not closed", witness=i)


def tree_of_tangles(U: Universe, profiles) -> TreeOfTangles:
    """A tree set efficiently distinguishing every two distinguishable profiles.

    Profiles must be regular and robust k-profiles of the submodular
    universe U.  Every element of the result efficiently distinguishes two
    of them (``certificates`` maps it to their indices, the element lying in
    the first), and each profile's share of the tree lies below its maximal
    elements.
    """
    fam = _sorted(profiles)
    if not fam:
        return TreeOfTangles(frozenset(), {}, [], fam)
    for P in fam:
        if P.universe is not U:
            raise ValueError("profiles must belong to the given universe")
    check_preconditions(fam)
    state = LevelState(0, frozenset(), induced_set(fam, 0), {})
    levels = [state]
    for _ in range(max(P.order for P in fam)):
        state = build_level(state, fam)
        levels.append(state)
    T = state.tree
    if not is_tree_set(T, U.whole()):
        raise HypothesisViolation("levels produced a set that is not a tree set")

    def lift(Q):
        return next(i for i, P in enumerate(fam) if P.order >= Q.order and induced(P, Q.order) == Q)

    certificates = {}
    for t in sorted(T):
        A, B = state.certificates[t]
        i, j = lift(A), lift(B)
        if distinguishes_efficiently(t, fam[i], fam[j]) is not Distinction.YES_EFFICIENT:
            raise HypothesisViolation("certificate does not lift to the family", witness=(t, i, j))
        certificates[t] = (i, j)
    return TreeOfTangles(T, certificates, levels, fam)
