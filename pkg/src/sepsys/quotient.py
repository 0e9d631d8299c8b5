"""Condensing a separation system by how it splits a profile family.

``f_P(s)`` is the set of profiles in the family containing ``s*``.  Its
image, ordered by inclusion with complement as involution, is again a
separation system.  The good images (nested with every image) other than
∅ and the whole family form a tree set; lifting each to the greatest
element of its fiber, taken opposite to a consistent orientation, gives a
nested set of separations of S isomorphic to it.

Images are bitmasks over the family, in family order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import CornerSystem, HypothesisViolation, is_regular_system, maximal_elements
from .profiles import ProfileSet, is_closed


@dataclass(frozen=True)
class ImageSeparation:
    """A subset of the profile family, as a bitmask over ``size`` profiles."""

    mask: int
    size: int

    @property
    def full(self) -> int:
        return (1 << self.size) - 1

    def inverse(self) -> ImageSeparation:
        return ImageSeparation(self.mask ^ self.full, self.size)

    def le(self, other: ImageSeparation) -> bool:
        return self.mask & ~other.mask == 0

    def lt(self, other: ImageSeparation) -> bool:
        return self.mask != other.mask and self.le(other)

    def nested_with(self, other: ImageSeparation) -> bool:
        a, b, full = self.mask, other.mask, self.full
        return a & ~b == 0 or a & b == 0 or a | b == full or b & ~a == 0

    def separates(self, i: int, j: int) -> bool:
        return bool(self.mask >> i & 1) != bool(self.mask >> j & 1)

    @property
    def members(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.size) if self.mask >> i & 1)

    def is_trivial(self) -> bool:
        return self.mask == 0 or self.mask == self.full

    def __repr__(self):
        return f"Image{{{','.join(map(str, self.members))}}}/{self.size}"


@dataclass(frozen=True)
class Fiber:
    image: ImageSeparation
    members: tuple[int, ...]


@dataclass
class LiftedTreeSet:
    image_tree: frozenset
    orientation: frozenset
    lifted: dict = field(default_factory=dict)
    result: frozenset = frozenset()


def family(profiles) -> ProfileSet:
    """Profiles merged by chosen set; equal profiles cannot be told apart."""
    return ProfileSet(profiles).sets()


def _membership(S: CornerSystem, profiles) -> np.ndarray:
    """C[j, i]: profile j contains the i-th element of S."""
    if not len(profiles):
        return np.zeros((0, len(S)), dtype=bool)
    return np.array([P.mask[S.ids] for P in profiles], dtype=bool).reshape(len(profiles), len(S))


def _image_matrix(S: CornerSystem, profiles) -> np.ndarray:
    """M[j, i]: profile j contains the inverse of element i (i.e. j ∈ f(i))."""
    C = _membership(S, profiles)
    if not len(profiles):
        return C
    oriented = C | C[:, S.inv]
    if not oriented.all():
        j, i = np.argwhere(~oriented)[0]
        raise ValueError(f"profile {j} does not orient separation {int(S.ids[i])}")
    return C[:, S.inv]


def _masks(M: np.ndarray) -> list[int]:
    out = []
    for col in M.T:
        v = 0
        for j in np.flatnonzero(col):
            v |= 1 << int(j)
        out.append(v)
    return out


def image_map(S: CornerSystem, profiles) -> dict[int, ImageSeparation]:
    """f for every element of S."""
    M = _image_matrix(S, profiles)
    n = len(profiles)
    return {int(g): ImageSeparation(v, n) for g, v in zip(S.ids, _masks(M))}


def f_image(s: int, profiles, S: CornerSystem | None = None) -> ImageSeparation:
    """{P : s* ∈ P} for the profile family."""
    profiles = tuple(profiles)
    if not profiles:
        return ImageSeparation(0, 0)
    if S is None:
        S = profiles[0].system
    if s not in S:
        raise ValueError(f"separation {s} is not in the system")
    s_inv = S.inverse(s)
    v = 0
    for j, P in enumerate(profiles):
        if s_inv in P.chosen:
            v |= 1 << j
        elif s not in P.chosen:
            raise ValueError(f"profile {j} does not orient separation {s}")
    return ImageSeparation(v, len(profiles))


def fibers(S: CornerSystem, profiles) -> dict[ImageSeparation, Fiber]:
    groups: dict[ImageSeparation, list[int]] = {}
    for s, img in image_map(S, profiles).items():
        groups.setdefault(img, []).append(s)
    return {img: Fiber(img, tuple(sorted(m))) for img, m in sorted(groups.items(), key=lambda kv: kv[0].mask)}


def weak_submodularity_witness(S: CornerSystem, profiles):
    M = _image_matrix(S, profiles).astype(np.int32)
    # f(s) ⊆ f(t)  <=>  no profile in f(s) missing from f(t)
    sub = (M.T @ (1 - M)) == 0
    bad = sub & (S.corner < 0) & (S.meet_table < 0)
    if not bad.any():
        return None
    i, j = np.argwhere(bad)[0]
    return int(S.ids[i]), int(S.ids[j])


def is_weakly_submodular(S: CornerSystem, profiles) -> bool:
    return weak_submodularity_witness(S, profiles) is None


def orderly_witness(S: CornerSystem, profiles):
    """A pair (s, t) breaking orderliness, or None.

    Orderly: whenever some profile contains s and t and some profile contains
    s* and t*, both corners s v t and s* v t* exist.
    """
    C = _membership(S, profiles).astype(np.int32)
    if not len(C):
        return None
    together = (C.T @ C) > 0
    opposed = together[np.ix_(S.inv, S.inv)]
    missing = (S.corner < 0) | (S.corner[np.ix_(S.inv, S.inv)] < 0)
    bad = together & opposed & missing
    if not bad.any():
        return None
    i, j = np.argwhere(bad)[0]
    return int(S.ids[i]), int(S.ids[j])


def is_orderly(S: CornerSystem, profiles) -> bool:
    return orderly_witness(S, profiles) is None


def good_image_tree_set(S: CornerSystem, profiles) -> frozenset:
    """T(S, P): images nested with every image, minus ∅ and the whole family."""
    images = sorted(set(image_map(S, profiles).values()), key=lambda a: a.mask)
    good = [a for a in images if not a.is_trivial() and all(a.nested_with(b) for b in images)]
    return frozenset(good)


def separator_for(P, Q, S: CornerSystem, profiles) -> int:
    """A separation in P but not in Q whose image is good.

    Takes a maximal element of ``{x ∈ S : x ∈ P, x ∉ Q}``, the top of a
    maximal chain of such elements.
    """
    if P.chosen == Q.chosen:
        raise ValueError("P and Q are equal")
    w = orderly_witness(S, profiles)
    if w is not None:
        raise HypothesisViolation("system is not orderly for the profile family", witness=w)
    cand = [x for x in S if x in P.chosen and x not in Q.chosen]
    if not cand:
        raise ValueError("P and Q do not differ on S")
    s = maximal_elements(S, cand)[0]
    good = good_image_tree_set(S, profiles)
    if f_image(s, profiles, S) not in good:
        raise HypothesisViolation("maximal separator has a crossed image", witness=s)
    return s


def greatest_in_fiber(X: Fiber, S: CornerSystem, profiles=None) -> int:
    """The unique element of the fiber above all others."""
    if not X.members:
        raise ValueError("empty fiber")
    g = maximal_elements(S, X.members)[0]
    gi = S.local(g)
    idx = S.locals_of(X.members)
    if not S.leq[idx, gi].all():
        bad = [x for x, ok in zip(X.members, S.leq[idx, gi]) if not ok]
        raise HypothesisViolation("fiber has no greatest element (is the system orderly?)",
                                  witness=(g, bad[0]))
    return g


def _close_images(T_img) -> frozenset:
    return frozenset(T_img) | frozenset(a.inverse() for a in T_img)


def is_image_tree_set(T_img) -> bool:
    T = sorted(_close_images(T_img), key=lambda a: a.mask)
    for a in T:
        if a.is_trivial():
            return False
        for b in T:
            if not a.nested_with(b):
                return False
            # trivial in T: a < b and a < b*
            if b != a and b != a.inverse() and a.lt(b) and a.lt(b.inverse()):
                return False
    return True


def lift_tree_set(T_img, S: CornerSystem, profiles, anchor) -> LiftedTreeSet:
    """Represent each image by a separation of S, preserving order.

    The orientation ``o = {A : anchor ∉ A}`` is consistent: if A, B ∈ o and
    the complement of A lies in B then the anchor lies in B.  For A ∈ o the
    representative is ``m(A*)*``, otherwise ``m(A)``, where m picks the
    greatest element of a fiber.
    """
    profiles = tuple(profiles)
    T = _close_images(T_img)
    if not is_image_tree_set(T):
        raise ValueError("image set is not a regular tree set")
    try:
        a = next(i for i, P in enumerate(profiles) if P.chosen == anchor.chosen)
    except StopIteration:
        raise ValueError("anchor is not in the profile family") from None
    fib = fibers(S, profiles)
    o = frozenset(A for A in T if not A.mask >> a & 1)

    def m(A):
        if A not in fib:
            raise ValueError(f"no separation of S has image {A}")
        return greatest_in_fiber(fib[A], S, profiles)

    lifted = {}
    for A in sorted(T, key=lambda x: x.mask):
        lifted[A] = S.inverse(m(A.inverse())) if A in o else m(A)
    imgs = image_map(S, profiles)
    for A, s in lifted.items():
        if imgs[s] != A:
            raise HypothesisViolation("lift does not invert f", witness=(A, s))
    for A in T:
        for B in T:
            if A.le(B) and not S.le(lifted[A], lifted[B]):
                raise HypothesisViolation("lift is not order-preserving", witness=(A, B))
    return LiftedTreeSet(T, o, lifted, frozenset(lifted.values()))


def abstract_tree_set(S: CornerSystem, profiles) -> frozenset:
    """A tree set of S distinguishing every two distinct profiles.

    Requires S regular and orderly for the family, with closed profiles.
    Each element separates two profiles, and within each profile every
    element of the tree lies below a maximal one.
    """
    fam = family(profiles)
    if len(fam) <= 1:
        return frozenset()
    if not is_regular_system(S):
        i = int(np.flatnonzero(S.small_mask)[0])
        raise HypothesisViolation("system is not regular; regularize it first", witness=int(S.ids[i]))
    w = orderly_witness(S, fam)
    if w is not None:
        raise HypothesisViolation("system is not orderly for the profile family", witness=w)
    for P in fam:
        if not is_closed(P):
            raise HypothesisViolation("profile is not closed", witness=P)
    T_img = good_image_tree_set(S, fam)
    for i in range(len(fam)):
        for j in range(i + 1, len(fam)):
            if not any(A.separates(i, j) for A in T_img):
                raise HypothesisViolation("good images fail to separate two profiles", witness=(i, j))
    return lift_tree_set(T_img, S, fam, fam[0]).result
