"""Profiles: consistent orientations closed under corners.

A profile P of a separation system with corner map is a consistent
orientation such that ``(s v t)* ∉ P`` whenever ``s, t ∈ P`` and the corner
``s v t`` exists.  Two consequences drive the enumerator: a profile is
down-closed (choosing p forces every r <= p from another pair), and it
contains every existing corner of two of its elements.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .core import CornerSystem, HypothesisViolation, Orientation, Universe, is_consistent


@dataclass(frozen=True, eq=False)
class Profile(Orientation):
    """A profile; ``order`` is k when ``system`` is S_k of a universe."""

    order: int | None = None

    @property
    def key(self):
        return (self.order, tuple(sorted(self.chosen)))

    def __eq__(self, other):
        if not isinstance(other, Profile):
            return NotImplemented
        return self.order == other.order and self.chosen == other.chosen

    def __hash__(self):
        return hash((self.order, self.chosen))

    def __repr__(self):
        return f"Profile(order={self.order}, |P|={len(self.chosen)})"

    @property
    def universe(self) -> Universe | None:
        return self.system.universe


class ProfileSet(tuple):
    """A tuple of profiles with duplicates (equal order and chosen set) dropped."""

    def __new__(cls, profiles: Iterable[Profile] = ()):
        seen = set()
        out = []
        for p in profiles:
            if p not in seen:
                seen.add(p)
                out.append(p)
        return super().__new__(cls, out)

    def sets(self) -> "ProfileSet":
        """Drop profiles whose chosen set repeats, ignoring the order tag."""
        seen = set()
        out = []
        for p in self:
            if p.chosen not in seen:
                seen.add(p.chosen)
                out.append(p)
        return ProfileSet(out)


class Distinction(enum.Enum):
    NO = "no"
    YES_INEFFICIENT = "yes_inefficient"
    YES_EFFICIENT = "yes_efficient"


# ---------------------------------------------------------------------------
# enumeration


def _propagate(val, batch, below, corner, inv) -> bool:
    """Choose ``batch`` and everything it forces; False on a conflict.

    ``val`` holds 1 (chosen), -1 (inverse chosen), 0 (open) and is updated in place.
    """
    m = len(val)
    while len(batch):
        batch = np.unique(batch)
        batch = batch[val[batch] != 1]
        if not len(batch):
            break
        if (val[batch] == -1).any():
            return False
        picked = np.zeros(m, dtype=bool)
        picked[batch] = True
        # both orientations of a pair, or a degenerate element (inv(d) = d)
        if (picked & picked[inv]).any():
            return False
        val[batch] = 1
        val[inv[batch]] = -1
        chosen = np.flatnonzero(val == 1)
        forced = below[batch].any(axis=0)
        c = corner[np.ix_(batch, chosen)]
        forced[c[c >= 0]] = True
        batch = np.flatnonzero(forced & (val != 1))
    return True


def _pair_order(S: CornerSystem) -> list[tuple[int, int]]:
    """Local involution pairs, ascending by order function (if any) then id."""
    pairs = [(i, int(S.inv[i])) for i in range(len(S)) if i <= S.inv[i]]
    if S.universe is not None and S.universe.order is not None:
        o = S.universe.order[S.ids]
        pairs.sort(key=lambda p: (int(o[p[0]]), p[0]))
    return pairs


def enumerate_profiles(S: CornerSystem, *, regular_only: bool = False, order: int | None = None) -> ProfileSet:
    """All profiles of ``S``, sorted by their ascending id sequence.

    Backtracks over involution pairs with forced-choice propagation.  With
    ``regular_only`` every small element is chosen up front, which yields
    exactly the profiles without co-small elements.
    """
    if order is None:
        order = getattr(S, "k", None)
    m = len(S)
    if S.degenerate_mask.any():
        return ProfileSet()
    inv, corner = S.inv, S.corner
    same_pair = np.eye(m, dtype=bool) | np.eye(m, dtype=bool)[:, inv]
    below = S.leq.T & ~same_pair  # below[i, j]: j <= i, j from another pair
    val = np.zeros(m, dtype=np.int8)
    if regular_only and not _propagate(val, np.flatnonzero(S.small_mask), below, corner, inv):
        return ProfileSet()
    pairs = _pair_order(S)
    found = []
    stack = [(val, 0)]
    while stack:
        val, p = stack.pop()
        while p < len(pairs) and val[pairs[p][0]] != 0:
            p += 1
        if p == len(pairs):
            found.append(tuple(sorted(S.ids[val == 1].tolist())))
            continue
        a, b = pairs[p]
        # push b first so that a is explored first
        for choice in (b, a):
            v = val.copy()
            if _propagate(v, np.array([choice]), below, corner, inv):
                stack.append((v, p + 1))
    found.sort()
    return ProfileSet(Profile(S, frozenset(c), order) for c in found)


def k_profiles(U: Universe, k: int, *, regular_only: bool = False) -> ProfileSet:
    """The k-profiles of ``U`` (profiles of S_k), tagged with order k."""
    return enumerate_profiles(U.subsystem_k(k), regular_only=regular_only, order=k)


def satisfies_profile_property(O: Orientation) -> bool:
    S = O.system
    idx = np.flatnonzero(O.local_mask)
    if not len(idx):
        return True
    c = S.corner[np.ix_(idx, idx)]
    c = c[c >= 0]
    return not bool(O.local_mask[S.inv[c]].any())


def is_profile(O: Orientation) -> bool:
    return O.is_orientation() and is_consistent(O) and satisfies_profile_property(O) \
        and not bool(O.system.degenerate_mask.any())


# ---------------------------------------------------------------------------
# induced profiles and distinguishing


def induced(P: Profile, l: int) -> Profile:
    """The l-profile ``P ∩ S_l`` induced by the k-profile P."""
    if P.order is None or P.universe is None:
        raise ValueError("induced profiles need a k-profile of a universe")
    if l > P.order:
        raise ValueError(f"cannot induce an order-{l} profile from an order-{P.order} profile")
    if l == P.order:
        return P
    U = P.universe
    S_l = U.subsystem_k(l)
    return Profile(S_l, frozenset(s for s in P.chosen if U.order[s] < l), l)


def _same_universe(P: Profile, Q: Profile) -> Universe:
    U = P.universe
    if U is None or U is not Q.universe:
        raise ValueError("profiles must come from the same universe")
    if U.order is None:
        raise ValueError("universe has no order function")
    return U


def distinguishing_mask(P: Profile, Q: Profile) -> np.ndarray:
    """Universe elements s with s ∈ P and s* ∈ Q (s non-degenerate)."""
    U = _same_universe(P, Q)
    return P.mask & Q.mask[U.inv] & ~U.degenerate_mask


def min_distinguishing_order(P: Profile, Q: Profile) -> int | None:
    U = _same_universe(P, Q)
    d = distinguishing_mask(P, Q)
    return int(U.order[d].min()) if d.any() else None


def distinguishes(s: int, P: Orientation, Q: Orientation) -> bool:
    inv = P.system.inverse(s) if s in P.system else Q.system.inverse(s)
    if s == inv:
        return False
    return (s in P.chosen and inv in Q.chosen) or (inv in P.chosen and s in Q.chosen)


def distinguishes_efficiently(s: int, P: Profile, Q: Profile) -> Distinction:
    U = _same_universe(P, Q)
    s_inv = int(U.inv[s])
    if s == s_inv:
        return Distinction.NO
    if not ((s in P.chosen and s_inv in Q.chosen) or (s_inv in P.chosen and s in Q.chosen)):
        return Distinction.NO
    if U.order[s] == min_distinguishing_order(P, Q):
        return Distinction.YES_EFFICIENT
    return Distinction.YES_INEFFICIENT


# ---------------------------------------------------------------------------
# profile properties


def robustness_witness(P: Profile):
    """A pair (r, s) breaking robustness, or None."""
    U = P.universe
    if U is None or U.order is None:
        raise ValueError("robustness needs a universe with an order function")
    if not P.chosen:
        return None
    R = np.array(sorted(P.chosen), dtype=np.int64)
    o, mask = U.order, P.mask
    rs = U.inv[R]
    m1 = U.meet[rs].astype(np.int64)            # r* ∧ s over all s
    m2 = U.meet[rs][:, U.inv].astype(np.int64)  # r* ∧ s*
    limit = o[R][:, None]
    bad = (o[m1] < limit) & (o[m2] < limit) & mask[m1] & mask[m2]
    if not bad.any():
        return None
    i, s = np.argwhere(bad)[0]
    return int(R[i]), int(s)


def is_robust(P: Profile) -> bool:
    return robustness_witness(P) is None


def is_regular_profile(P: Orientation) -> bool:
    """No co-small element (s* <= s) in P."""
    return not bool((P.local_mask & P.system.cosmall_mask).any())


def is_closed(P: Orientation) -> bool:
    """Every chain of P has a supremum in the ambient structure lying in P.

    A finite chain's supremum is its maximum.  What is checked is that for
    comparable a <= b in P the corner of a and b exists and equals b, which
    is all a two-element chain can ask for and extends to longer chains.
    """
    S = P.system
    idx = np.flatnonzero(P.local_mask)
    if not len(idx):
        return True
    sub = S.leq[np.ix_(idx, idx)]
    c = S.corner[np.ix_(idx, idx)]
    top = np.broadcast_to(idx[None, :], sub.shape)
    return bool(np.all(~sub | (c == top)))


def robust_corner(r: int, s: int, Q: Profile, Q2: Profile) -> int:
    """A corner of r and s efficiently distinguishing Q and Q2.

    Requires r to distinguish two robust profiles efficiently, s to
    distinguish Q and Q2 efficiently, and ``ord(r) < ord(s)``.
    """
    U = _same_universe(Q, Q2)
    if not U.order[r] < U.order[s]:
        raise ValueError(f"need ord(r) < ord(s), got {U.order[r]} and {U.order[s]}")
    if distinguishes_efficiently(s, Q, Q2) is not Distinction.YES_EFFICIENT:
        raise ValueError("s does not distinguish the two profiles efficiently")
    ri, si = int(U.inv[r]), int(U.inv[s])
    for a, b in ((r, s), (r, si), (ri, s), (ri, si)):
        c = int(U.meet[a, b])
        if distinguishes_efficiently(c, Q, Q2) is Distinction.YES_EFFICIENT:
            return c
    raise HypothesisViolation(
        "no corner of r and s distinguishes the profiles efficiently; "
        "an input profile is not robust or a precondition fails", witness=(r, s))
