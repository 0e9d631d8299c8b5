"""Corner-map systems and turning a non-regular system into a regular one.

The essential core drops trivial, co-trivial and degenerate elements.  The
regularization then also drops every relation ``s <= s*``, keeping a corner
only where it is still the supremum for the thinned order.  Profiles carry
over by intersection, and any tree set of the result is a tree set of the
original distinguishing the same profiles.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .core import CornerSystem, HypothesisViolation, is_regular_system
from .profiles import Profile, ProfileSet, is_closed, is_profile
from .quotient import abstract_tree_set, family, orderly_witness

log = logging.getLogger(__name__)

STRATEGIES = ("induced", "poset_sup", "comparable")


def _suprema(leq: np.ndarray) -> np.ndarray:
    """corner[i, j] = least common upper bound of i and j in ``leq``, or -1."""
    m = len(leq)
    out = np.full((m, m), -1, dtype=np.int64)
    for i in range(m):
        ub = leq[i][None, :] & leq  # ub[j, u]: u above i and j
        # u is least among ub[j] if u <= every member of ub[j]
        below_all = ~(ub[:, None, :] & ~leq[None, :, :]).any(axis=2)  # [j, u]
        least = ub & below_all
        has = least.any(axis=1)
        out[i, has] = least.argmax(axis=1)[has]
    return out


def make_corner_system(S: CornerSystem, strategy: str = "induced") -> CornerSystem:
    """Equip the elements of S with a corner map.

    ``induced`` uses the universe join when it lands in S, ``poset_sup`` the
    supremum within S for S's own order, ``comparable`` only the larger of
    two comparable elements.
    """
    m = len(S)
    if strategy == "induced":
        U = S.universe
        if U is None:
            raise ValueError("the induced corner map needs a universe")
        pos = np.full(len(U), -1, dtype=np.int64)
        pos[S.ids] = np.arange(m)
        corner = pos[U.join[np.ix_(S.ids, S.ids)].astype(np.int64)]
    elif strategy == "poset_sup":
        corner = _suprema(S.leq)
    elif strategy == "comparable":
        j = np.broadcast_to(np.arange(m)[None, :], (m, m))
        corner = np.where(S.leq, j, np.where(S.leq.T, j.T, -1))
    else:
        raise ValueError(f"unknown corner strategy {strategy!r}; use one of {STRATEGIES}")
    return CornerSystem(S.ids, S.inv, S.leq, corner, space=S.space, universe=S.universe,
                        labels=S._labels)


def _removable(S: CornerSystem) -> np.ndarray:
    return S.trivial_mask | S.cotrivial_mask | S.degenerate_mask


def essential_core(S: CornerSystem) -> CornerSystem:
    """S without its trivial, co-trivial and degenerate elements (judged in S)."""
    core = S.restrict(~_removable(S))
    if _removable(core).any():
        log.debug("essential core of %r is not a fixpoint: %d elements become trivial",
                  S, int(_removable(core).sum()))
    return core


def core_is_fixpoint(S: CornerSystem) -> bool:
    core = essential_core(S)
    return not _removable(core).any()


@dataclass
class RegularizationResult:
    original: CornerSystem
    core: CornerSystem
    regular: CornerSystem
    projected_profiles: ProfileSet

    @property
    def elem_map(self) -> dict[int, int]:
        return {int(s): int(s) for s in self.regular.ids}


def _regular_part(core: CornerSystem) -> CornerSystem:
    m = len(core)
    leq = core.leq & (np.arange(m)[:, None] != core.inv[None, :])
    c = core.corner
    corner = np.full((m, m), -1, dtype=np.int64)
    js = np.arange(m)
    for i in range(m):
        row = c[i]
        ok = row >= 0
        if not ok.any():
            continue
        u = np.maximum(row, 0)
        upper = leq[i, u] & leq[js, u]
        ub = leq[i][None, :] & leq  # ub[j, w]: w above both i and j
        least = ~(ub & ~leq[u]).any(axis=1)
        good = ok & upper & least
        corner[i, good] = row[good]
    return CornerSystem(core.ids, core.inv, leq, corner, space=core.space,
                        universe=core.universe, labels=core._labels)


def project(profiles, S_reg: CornerSystem) -> ProfileSet:
    keep = set(int(x) for x in S_reg.ids)
    return ProfileSet(Profile(S_reg, frozenset(s for s in P.chosen if s in keep), None)
                      for P in profiles).sets()


def regularize(S: CornerSystem, profiles=None) -> RegularizationResult:
    """Regularize S; with ``profiles``, also project them and re-check that
    profile-ness, orderliness and closedness survive."""
    core = essential_core(S)
    reg = _regular_part(core)
    if not is_regular_system(reg):
        raise HypothesisViolation("regularization left a small element",
                                  witness=int(reg.ids[np.flatnonzero(reg.small_mask)[0]]))
    proj = ProfileSet()
    if profiles is not None:
        fam = family(profiles)
        proj = project(fam, reg)
        for P in proj:
            if not is_profile(P):
                raise HypothesisViolation("projected profile is not a profile", witness=P)
        if orderly_witness(S, fam) is None:
            w = orderly_witness(reg, proj)
            if w is not None:
                raise HypothesisViolation("regularization broke orderliness", witness=w)
        if all(is_closed(P) for P in fam) and not all(is_closed(P) for P in proj):
            raise HypothesisViolation("regularization broke closedness")
    return RegularizationResult(S, core, reg, proj)


def tree_set_nonregular(S: CornerSystem, profiles) -> frozenset:
    """A tree set of S distinguishing the profile family; S need not be regular."""
    fam = family(profiles)
    if len(fam) <= 1:
        return frozenset()
    res = regularize(S, fam)
    return abstract_tree_set(res.regular, res.projected_profiles)
