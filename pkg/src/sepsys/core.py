"""Finite universes of oriented separations and separation systems with corner maps.

Separations are integer handles.  A :class:`Universe` owns dense tables for
the involution, the partial order, joins, meets and the (optional) order
function.  A :class:`CornerSystem` is a finite separation system whose corner
map may be partial; :class:`SubSystem` is the special case of an
involution-closed subset of a universe with the induced corner map.

All structures are immutable after construction.  Tables are stored with
local indices; the public methods speak in global separation ids.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np


class HypothesisViolation(Exception):
    """Raised when an input breaks a hypothesis an algorithm relies on.

    ``witness`` carries whatever concrete data exhibits the failure.
    """

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


def _index_dtype(n: int):
    return np.int16 if n < 2**15 else np.int32


class Universe:
    """A finite lattice of oriented separations with an order-reversing involution.

    ``join``/``meet`` are dense ``n x n`` tables of element ids; ``order`` is
    an optional integer array.  The constructor only checks shapes: use
    :func:`validate_universe` to check the lattice axioms.
    """

    def __init__(self, inv, leq, join, meet=None, order=None, labels=None, name=""):
        self.inv = np.asarray(inv, dtype=np.int64)
        n = len(self.inv)
        self.leq = np.asarray(leq, dtype=bool)
        self.join = np.asarray(join, dtype=_index_dtype(n))
        if meet is None:
            # s ∧ t = (s* ∨ t*)*
            meet = self.inv[self.join[np.ix_(self.inv, self.inv)]]
        self.meet = np.asarray(meet, dtype=_index_dtype(n))
        self.order = None if order is None else np.asarray(order, dtype=np.int64)
        if self.leq.shape != (n, n) or self.join.shape != (n, n) or self.meet.shape != (n, n):
            raise ValueError("universe tables must be n x n")
        if self.order is not None and self.order.shape != (n,):
            raise ValueError("order function must have one value per element")
        self.labels = list(labels) if labels is not None else [str(i) for i in range(n)]
        self.name = name
        self._subsystems: dict[int, SubSystem] = {}
        self._whole: SubSystem | None = None

    def __len__(self) -> int:
        return len(self.inv)

    def __repr__(self) -> str:
        return f"Universe({self.name or 'anonymous'}, n={len(self)})"

    @property
    def has_order(self) -> bool:
        return self.order is not None

    def label(self, s: int) -> str:
        return str(self.labels[s])

    def ord(self, s: int) -> int:
        if self.order is None:
            raise ValueError("universe has no order function")
        return int(self.order[s])

    @cached_property
    def degenerate_mask(self) -> np.ndarray:
        return self.inv == np.arange(len(self))

    def whole(self) -> SubSystem:
        """The universe viewed as a separation system with total corner map (cached)."""
        if self._whole is None:
            self._whole = self.subsystem_of(np.arange(len(self)))
        return self._whole

    def subsystem_of(self, members: Iterable[int]) -> SubSystem:
        return SubSystem(self, members)

    def subsystem_k(self, k: int) -> SubSystem:
        """S_k, the separations of order less than ``k`` (memoised per k)."""
        if self.order is None:
            raise ValueError("S_k needs an order function")
        if k < 0:
            raise ValueError("k must be non-negative")
        k = min(k, int(self.order.max(initial=-1)) + 1)
        if k not in self._subsystems:
            sub = SubSystem(self, np.flatnonzero(self.order < k))
            sub.k = k
            self._subsystems[k] = sub
        return self._subsystems[k]

    @cached_property
    def max_order(self) -> int:
        if self.order is None:
            raise ValueError("universe has no order function")
        return int(self.order.max(initial=0))


class CornerSystem:
    """A finite separation system ``(S, <=, *, v)`` with a partial corner map.

    ``ids`` are the global separation ids (ascending).  ``inv``, ``leq`` and
    ``corner`` are local tables: ``corner[i, j]`` is the local index of the
    corner of elements ``i`` and ``j``, or ``-1`` where undefined.  ``space``
    is the size of the global id space, used for profile masks.
    """

    def __init__(self, ids, inv, leq, corner, *, space=None, universe=None, labels=None):
        self.ids = np.asarray(ids, dtype=np.int64)
        m = len(self.ids)
        if m and np.any(np.diff(self.ids) <= 0):
            raise ValueError("ids must be strictly increasing")
        self.inv = np.asarray(inv, dtype=np.int64).reshape(m)
        self.leq = np.asarray(leq, dtype=bool).reshape(m, m)
        self.corner = np.asarray(corner, dtype=np.int64).reshape(m, m)
        self.universe = universe
        if space is None:
            space = len(universe) if universe is not None else (int(self.ids.max()) + 1 if m else 0)
        self.space = space
        self._labels = labels
        pos = np.full(space, -1, dtype=np.int64)
        pos[self.ids] = np.arange(m)
        self._pos = pos

    # -- element access ---------------------------------------------------

    def __len__(self) -> int:
        return len(self.ids)

    def __iter__(self) -> Iterator[int]:
        return iter(self.ids.tolist())

    def __contains__(self, s) -> bool:
        return 0 <= s < self.space and self._pos[s] >= 0

    def __repr__(self) -> str:
        return f"{type(self).__name__}(|S|={len(self)})"

    def local(self, s: int) -> int:
        if s not in self:
            raise KeyError(f"separation {s} is not in the system")
        return int(self._pos[s])

    def locals_of(self, ids) -> np.ndarray:
        return self._pos[np.asarray(ids, dtype=np.int64)]

    def label(self, s: int) -> str:
        if self._labels is not None:
            return str(self._labels[self.local(s)])
        if self.universe is not None:
            return self.universe.label(s)
        return str(s)

    def inverse(self, s: int) -> int:
        return int(self.ids[self.inv[self.local(s)]])

    def le(self, s: int, t: int) -> bool:
        return bool(self.leq[self.local(s), self.local(t)])

    def join(self, s: int, t: int) -> int | None:
        c = self.corner[self.local(s), self.local(t)]
        return None if c < 0 else int(self.ids[c])

    def meet(self, s: int, t: int) -> int | None:
        i, j = self.inv[self.local(s)], self.inv[self.local(t)]
        c = self.corner[i, j]
        return None if c < 0 else int(self.ids[self.inv[c]])

    def ord(self, s: int) -> int:
        if self.universe is None:
            raise ValueError("system has no ambient universe with an order function")
        return self.universe.ord(s)

    def pairs(self) -> list[tuple[int, int]]:
        """Involution pairs as (s, s*) with s the smaller id; degenerate s gives (s, s)."""
        out = []
        for i in range(len(self)):
            j = int(self.inv[i])
            if i <= j:
                out.append((int(self.ids[i]), int(self.ids[j])))
        return out

    # -- derived masks (local) ----------------------------------------------

    @cached_property
    def meet_table(self) -> np.ndarray:
        c = self.corner[np.ix_(self.inv, self.inv)]
        return np.where(c >= 0, self.inv[np.maximum(c, 0)], -1)

    @cached_property
    def degenerate_mask(self) -> np.ndarray:
        return self.inv == np.arange(len(self))

    @cached_property
    def small_mask(self) -> np.ndarray:
        return self.leq[np.arange(len(self)), self.inv]

    @cached_property
    def cosmall_mask(self) -> np.ndarray:
        return self.small_mask[self.inv]

    @cached_property
    def trivial_mask(self) -> np.ndarray:
        m = len(self)
        if m == 0:
            return np.zeros(0, dtype=bool)
        eye = np.eye(m, dtype=bool)
        lt = self.leq & ~eye
        witness = lt & lt[:, self.inv]
        # the witness t must come from a different involution pair
        same_pair = eye | eye[:, self.inv]
        return (witness & ~same_pair).any(axis=1)

    @cached_property
    def cotrivial_mask(self) -> np.ndarray:
        return self.trivial_mask[self.inv]

    def restrict(self, keep, leq=None, corner=None) -> CornerSystem:
        """Sub-system on the local elements in ``keep`` (must be inv-closed).

        By default the order and corner map are restricted; a corner whose
        value falls outside ``keep`` becomes undefined.
        """
        keep = np.asarray(keep, dtype=bool)
        if np.any(keep != keep[self.inv]):
            raise ValueError("restriction must be closed under the involution")
        idx = np.flatnonzero(keep)
        new_pos = np.full(len(self), -1, dtype=np.int64)
        new_pos[idx] = np.arange(len(idx))
        if leq is None:
            leq = self.leq[np.ix_(idx, idx)]
        if corner is None:
            c = self.corner[np.ix_(idx, idx)]
            corner = np.where(c >= 0, new_pos[np.maximum(c, 0)], -1)
        labels = None if self._labels is None else [self._labels[i] for i in idx]
        return CornerSystem(self.ids[idx], new_pos[self.inv[idx]], leq, corner,
                            space=self.space, universe=self.universe, labels=labels)


class SubSystem(CornerSystem):
    """An involution-closed subset of a universe with the induced corner map.

    ``corner(s, t)`` is defined exactly when the universe join of s and t is a member.
    ``k`` is set when the subsystem is S_k.
    """

    k: int | None = None

    def __init__(self, universe: Universe, members):
        ids = np.unique(np.asarray(list(members) if not isinstance(members, np.ndarray) else members,
                                   dtype=np.int64))
        inv_g = universe.inv[ids]
        pos = np.full(len(universe), -1, dtype=np.int64)
        pos[ids] = np.arange(len(ids))
        if np.any(pos[inv_g] < 0):
            raise ValueError("members must be closed under the involution")
        joins = universe.join[np.ix_(ids, ids)].astype(np.int64)
        super().__init__(ids, pos[inv_g], universe.leq[np.ix_(ids, ids)], pos[joins],
                         space=len(universe), universe=universe)


@dataclass(frozen=True, eq=False)
class Orientation:
    """A choice of exactly one element from each involution pair of ``system``."""

    system: CornerSystem
    chosen: frozenset

    def __post_init__(self):
        object.__setattr__(self, "chosen", frozenset(int(s) for s in self.chosen))

    @cached_property
    def mask(self) -> np.ndarray:
        """Membership over the global id space."""
        m = np.zeros(self.system.space, dtype=bool)
        if self.chosen:
            m[np.fromiter(self.chosen, dtype=np.int64)] = True
        return m

    @cached_property
    def local_mask(self) -> np.ndarray:
        return self.mask[self.system.ids]

    def __contains__(self, s) -> bool:
        return s in self.chosen

    def __len__(self) -> int:
        return len(self.chosen)

    def __iter__(self):
        return iter(sorted(self.chosen))

    def is_orientation(self) -> bool:
        if not all(s in self.system for s in self.chosen):
            return False
        lm = self.local_mask
        return bool(np.where(self.system.degenerate_mask, lm, lm ^ lm[self.system.inv]).all())


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Violation:
    invariant: str
    witness: tuple
    count: int = 1

    def __str__(self):
        extra = f" (+{self.count - 1} more)" if self.count > 1 else ""
        return f"{self.invariant}: witness {self.witness}{extra}"


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def add(self, invariant: str, bad: np.ndarray):
        """Record ``invariant`` if the boolean array ``bad`` has any True entry."""
        if bad.any():
            w = tuple(int(x) for x in np.argwhere(bad)[0])
            self.violations.append(Violation(invariant, w, int(bad.sum())))

    def names(self) -> set[str]:
        return {v.invariant for v in self.violations}


def _rows_subset(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Per-row test ``a[i] ⊆ b[i]`` on packed bit rows."""
    return ~np.any(a & ~b, axis=-1)


def validate_universe(U: Universe) -> ValidationReport:
    """Check every universe invariant; violations are returned, not raised."""
    rep = ValidationReport()
    n = len(U)
    inv = U.inv
    if np.any((inv < 0) | (inv >= n)):
        rep.add("inv-range", (inv < 0) | (inv >= n))
        return rep
    if np.any((U.join < 0) | (U.join >= n)) or np.any((U.meet < 0) | (U.meet >= n)):
        rep.add("table-range", (U.join < 0) | (U.join >= n) | (U.meet < 0) | (U.meet >= n))
        return rep
    leq = U.leq
    idx = np.arange(n)
    rep.add("involution", inv[inv] != idx)
    rep.add("reflexive", ~leq[idx, idx])
    rep.add("antisymmetric", leq & leq.T & ~np.eye(n, dtype=bool))
    if n:
        f = leq.astype(np.float32)
        rep.add("transitive", ((f @ f) > 0) & ~leq)
    rep.add("order-reversing", leq != leq[np.ix_(inv, inv)].T)

    join, meet = U.join.astype(np.int64), U.meet.astype(np.int64)
    rep.add("join-upper-bound", ~(leq[idx[:, None], join] & leq[idx[None, :], join]))
    rep.add("meet-lower-bound", ~(leq[meet, idx[:, None]] & leq[meet, idx[None, :]]))
    if n:
        up = np.packbits(leq, axis=1)
        down = np.packbits(leq.T, axis=1)
        bad_join = np.zeros((n, n), dtype=bool)
        bad_meet = np.zeros((n, n), dtype=bool)
        for s in range(n):
            # every common upper bound of s,t must lie above join(s,t)
            bad_join[s] = ~_rows_subset(up & up[s], up[join[s]])
            bad_meet[s] = ~_rows_subset(down & down[s], down[meet[s]])
        rep.add("join-least", bad_join)
        rep.add("meet-greatest", bad_meet)
    rep.add("de-morgan", inv[join] != meet[np.ix_(inv, inv)])

    if U.order is not None:
        o = U.order
        rep.add("order-nonnegative", o < 0)
        rep.add("order-symmetric", o != o[inv])
        rep.add("submodular", o[join] + o[meet] > o[:, None] + o[None, :])
    return rep


def validate_corner_system(S: CornerSystem) -> ValidationReport:
    """Check the separation-system and corner-map axioms of ``S``."""
    rep = ValidationReport()
    m = len(S)
    idx = np.arange(m)
    inv, leq, c = S.inv, S.leq, S.corner
    rep.add("involution", inv[inv] != idx)
    rep.add("reflexive", ~leq[idx, idx])
    rep.add("antisymmetric", leq & leq.T & ~np.eye(m, dtype=bool))
    if m:
        f = leq.astype(np.float32)
        rep.add("transitive", ((f @ f) > 0) & ~leq)
    rep.add("order-reversing", leq != leq[np.ix_(inv, inv)].T)
    rep.add("corner-comparable", (leq | leq.T) & (c < 0))
    rep.add("corner-symmetric", (c >= 0) != (c.T >= 0))
    defined = c >= 0
    cv = np.maximum(c, 0)
    upper = leq[idx[:, None], cv] & leq[idx[None, :], cv]
    rep.add("corner-upper-bound", defined & ~upper)
    bad = np.zeros((m, m), dtype=bool)
    for s in range(m):
        common = leq & leq[s][None, :]
        bad[s] = np.any(common & ~leq[cv[s]], axis=1) & defined[s]
    rep.add("corner-least", bad)
    return rep


# ---------------------------------------------------------------------------
# predicates


def subsystem_k(U: Universe, k: int) -> SubSystem:
    return U.subsystem_k(k)


def classify(S: CornerSystem, s: int) -> frozenset[str]:
    """Flags among small, cosmall, degenerate, trivial, cotrivial for ``s`` in ``S``."""
    i = S.local(s)
    flags = []
    for name, mask in (("small", S.small_mask), ("cosmall", S.cosmall_mask),
                       ("degenerate", S.degenerate_mask), ("trivial", S.trivial_mask),
                       ("cotrivial", S.cotrivial_mask)):
        if mask[i]:
            flags.append(name)
    return frozenset(flags)


def is_regular_system(S: CornerSystem) -> bool:
    return not bool(S.small_mask.any())


def nested(S: CornerSystem, s: int, t: int) -> bool:
    i, j = S.local(s), S.local(t)
    a, b = S.inv[i], S.inv[j]
    leq = S.leq
    return bool(leq[i, j] or leq[i, b] or leq[a, j] or leq[a, b])


def points_towards(S: CornerSystem, s: int, t: int) -> bool:
    """s points towards t iff s <= t or s <= t*."""
    i, j = S.local(s), S.local(t)
    return bool(S.leq[i, j] or S.leq[i, S.inv[j]])


def is_consistent(O: Orientation) -> bool:
    """No chosen p, q from distinct involution pairs with p* <= q."""
    S = O.system
    lm = O.local_mask
    idx = np.flatnonzero(lm)
    if len(idx) == 0:
        return True
    sub = S.leq[np.ix_(S.inv[idx], idx)]
    same_pair = (idx[:, None] == idx[None, :]) | (S.inv[idx][:, None] == idx[None, :])
    return not bool((sub & ~same_pair).any())


def nested_mask(S: CornerSystem, idx: np.ndarray) -> np.ndarray:
    """Pairwise nestedness matrix for local indices ``idx``."""
    inv = S.inv[idx]
    leq = S.leq
    return (leq[np.ix_(idx, idx)] | leq[np.ix_(idx, inv)]
            | leq[np.ix_(inv, idx)] | leq[np.ix_(inv, inv)])


def close_under_inverse(S: CornerSystem, X: Iterable[int]) -> frozenset:
    return frozenset(int(x) for s in X for x in (s, S.inverse(s)))


def is_tree_set(X: Iterable[int], S: CornerSystem) -> bool:
    """Nested, and no element trivial, co-trivial or degenerate in ``S``."""
    X = close_under_inverse(S, X)
    if not X:
        return True
    idx = S.locals_of(sorted(X))
    bad = S.trivial_mask | S.cotrivial_mask | S.degenerate_mask
    if bad[idx].any():
        return False
    return bool(nested_mask(S, idx).all())


def maximal_elements(S: CornerSystem, X: Sequence[int]) -> list[int]:
    """The <=-maximal members of X, ascending by id."""
    X = sorted(set(int(x) for x in X))
    if not X:
        return []
    idx = S.locals_of(X)
    sub = S.leq[np.ix_(idx, idx)] & ~np.eye(len(idx), dtype=bool)
    return [X[i] for i in np.flatnonzero(~sub.any(axis=1))]


def minimal_elements(S: CornerSystem, X: Sequence[int]) -> list[int]:
    X = sorted(set(int(x) for x in X))
    if not X:
        return []
    idx = S.locals_of(X)
    sub = S.leq[np.ix_(idx, idx)] & ~np.eye(len(idx), dtype=bool)
    return [X[j] for j in np.flatnonzero(~sub.any(axis=0))]
