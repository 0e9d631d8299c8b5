"""Instance construction and (de)serialization.

Three instance kinds are understood:

* ``graph``    -- oriented vertex bipartitions ``(A, B)`` of a simple graph,
* ``powerset`` -- subsets of ``{1..n}`` under inclusion and complement,
* ``explicit`` -- full tables; a complete join table gives a universe, a
  partial one (``null`` entries) gives a corner system.

Size limits default to ``graph_vertices=8, powerset_n=12, brute_pairs=24`` and
may be overridden with ``SEPSYS_LIMITS="graph_vertices=6,brute_pairs=16"``.
"""

from __future__ import annotations

import itertools
import json
import os
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .core import CornerSystem, Universe

FORMAT_VERSION = 1

DEFAULT_LIMITS = {"graph_vertices": 8, "powerset_n": 12, "brute_pairs": 24}


class InstanceError(ValueError):
    """Malformed or oversized instance input."""


def limits() -> dict[str, int]:
    out = dict(DEFAULT_LIMITS)
    raw = os.environ.get("SEPSYS_LIMITS", "")
    for item in filter(None, (p.strip() for p in raw.split(","))):
        key, _, value = item.partition("=")
        key = key.strip()
        if key not in out:
            raise InstanceError(f"unknown limit {key!r} in SEPSYS_LIMITS")
        try:
            out[key] = int(value)
        except ValueError:
            raise InstanceError(f"limit {key} must be an integer, got {value!r}") from None
    return out


# ---------------------------------------------------------------------------
# generators


def _popcount(a: np.ndarray) -> np.ndarray:
    a = a.astype(np.int64)
    c = np.zeros_like(a)
    while np.any(a):
        c += a & 1
        a >>= 1
    return c


def build_graph_universe(edges, vertices=None, name="graph") -> Universe:
    """Universe of oriented separations ``(A, B)`` of a finite simple graph.

    ``A ∪ B = V`` and no edge joins ``A∖B`` to ``B∖A``.  ``(A,B) <= (C,D)`` iff
    ``A ⊆ C`` and ``B ⊇ D``; the order is ``|A ∩ B|``.
    """
    edges = [tuple(e) for e in edges]
    seen = set()
    for e in edges:
        if len(e) != 2 or e[0] == e[1]:
            raise InstanceError(f"not a simple edge: {e!r}")
        key = frozenset(e)
        if key in seen:
            raise InstanceError(f"multigraph input: repeated edge {e!r}")
        seen.add(key)
    verts = sorted(set(vertices or ()) | {v for e in edges for v in e}, key=str)
    nv = len(verts)
    if nv > limits()["graph_vertices"]:
        raise InstanceError(f"graph has {nv} vertices, limit is {limits()['graph_vertices']}")
    bit = {v: 1 << i for i, v in enumerate(verts)}
    emasks = [(bit[u], bit[v]) for u, v in edges]

    seps = []
    # 0: only in A, 1: in both, 2: only in B
    for assign in itertools.product((0, 1, 2), repeat=nv):
        a = sum(1 << i for i, x in enumerate(assign) if x != 2)
        b = sum(1 << i for i, x in enumerate(assign) if x != 0)
        a_only, b_only = a & ~b, b & ~a
        if any((a_only & u and b_only & v) or (a_only & v and b_only & u) for u, v in emasks):
            continue
        seps.append((bin(a & b).count("1"), a, b))
    seps.sort(key=lambda t: (t[0], _set_key(t[1], nv), _set_key(t[2], nv)))
    n = len(seps)
    A = np.array([s[1] for s in seps], dtype=np.int64)
    B = np.array([s[2] for s in seps], dtype=np.int64)
    lookup = np.full(1 << (2 * nv), -1, dtype=np.int64)
    lookup[(A << nv) | B] = np.arange(n)
    inv = lookup[(B << nv) | A]

    dtype = np.int16 if n < 2**15 else np.int32
    leq = np.zeros((n, n), dtype=bool)
    join = np.zeros((n, n), dtype=dtype)
    meet = np.zeros((n, n), dtype=dtype)
    for lo in range(0, n, 512):
        a, b = A[lo:lo + 512, None], B[lo:lo + 512, None]
        leq[lo:lo + 512] = ((a & ~A[None, :]) == 0) & ((B[None, :] & ~b) == 0)
        join[lo:lo + 512] = lookup[((a | A[None, :]) << nv) | (b & B[None, :])]
        meet[lo:lo + 512] = lookup[((a & A[None, :]) << nv) | (b | B[None, :])]
    order = np.array([s[0] for s in seps], dtype=np.int64)
    labels = [_graph_label(a, b, verts) for _, a, b in seps]
    u = Universe(inv, leq, join, meet, order, labels=labels, name=name)
    u.vertices = verts
    u.sides = list(zip(A.tolist(), B.tolist()))
    return u


def _set_key(mask: int, nv: int):
    return tuple(i for i in range(nv) if mask >> i & 1)


def _graph_label(a: int, b: int, verts) -> str:
    def side(m):
        return "".join(str(v) for i, v in enumerate(verts) if m >> i & 1) or "∅"
    return f"({side(a)}|{side(b)})"


def build_powerset_universe(n: int, name=None) -> Universe:
    """Subsets of ``{1..n}``; the id of a subset is its bitmask (bit i-1 for element i)."""
    if n < 0:
        raise InstanceError("ground set size must be non-negative")
    if n > limits()["powerset_n"]:
        raise InstanceError(f"powerset size {n} exceeds limit {limits()['powerset_n']}")
    size = 1 << n
    full = size - 1
    x = np.arange(size, dtype=np.int64)
    inv = full ^ x
    leq = (x[:, None] & ~x[None, :]) == 0
    join = x[:, None] | x[None, :]
    meet = x[:, None] & x[None, :]
    pc = _popcount(x)
    order = np.minimum(pc, n - pc)
    labels = ["{" + ",".join(str(i + 1) for i in range(n) if s >> i & 1) + "}" for s in range(size)]
    return Universe(inv, leq, join, meet, order, labels=labels, name=name or f"powerset{n}")


def powerset_id(elements) -> int:
    return sum(1 << (e - 1) for e in elements)


# ---------------------------------------------------------------------------
# explicit tables


def _closure(n: int, pairs) -> np.ndarray:
    leq = np.eye(n, dtype=bool)
    for s, t in pairs:
        leq[s, t] = True
    # Warshall
    for k in range(n):
        leq |= leq[:, k:k + 1] & leq[k:k + 1, :]
    return leq


def build_explicit(payload: dict, name="explicit"):
    """Universe or CornerSystem from explicit tables.

    ``elements`` names the separations (ids are positions), ``inv`` gives the
    involution, ``leq_pairs`` generate the order (reflexive-transitive closure),
    ``join`` is an ``n x n`` matrix of ids or ``null`` (alternatively a
    ``corners`` list of ``[s, t, c]`` triples), ``ord`` is optional.
    """
    try:
        labels = list(payload["elements"])
        n = len(labels)
        inv = [int(x) for x in payload["inv"]]
        pairs = [(int(s), int(t)) for s, t in payload.get("leq_pairs", [])]
    except (KeyError, TypeError, ValueError) as exc:
        raise InstanceError(f"bad explicit instance: {exc}") from None
    if len(inv) != n or any(not 0 <= x < n for x in inv):
        raise InstanceError("inv must map every element id into range")
    if any(not (0 <= s < n and 0 <= t < n) for s, t in pairs):
        raise InstanceError("leq_pairs reference unknown ids")
    # the order must be reversed by the involution, so close the generators under it
    pairs += [(inv[t], inv[s]) for s, t in pairs]
    leq = _closure(n, pairs)
    corner = np.full((n, n), -1, dtype=np.int64)
    if "join" in payload:
        table = payload["join"]
        if len(table) != n or any(len(row) != n for row in table):
            raise InstanceError("join must be an n x n matrix")
        for i, row in enumerate(table):
            for j, c in enumerate(row):
                if c is not None:
                    corner[i, j] = int(c)
    for s, t, c in payload.get("corners", []):
        corner[s, t] = corner[t, s] = c
    if np.any(corner >= n):
        raise InstanceError("corner values out of range")
    # comparable pairs always have their corner: the larger element
    ii, jj = np.nonzero(leq)
    corner[ii, jj] = np.where(corner[ii, jj] >= 0, corner[ii, jj], jj)
    corner[jj, ii] = corner[ii, jj]
    order = payload.get("ord")
    if order is not None and len(order) != n:
        raise InstanceError("ord must have one entry per element")
    if (corner >= 0).all():
        return Universe(inv, leq, corner, order=order, labels=labels, name=name)
    return CornerSystem(np.arange(n), inv, leq, corner, labels=labels)


# ---------------------------------------------------------------------------
# instance files


@dataclass(frozen=True)
class InstanceSpec:
    kind: str
    payload: dict
    name: str

    def build(self):
        if self.kind == "graph":
            return build_graph_universe(self.payload["edges"], self.payload.get("vertices"), name=self.name)
        if self.kind == "powerset":
            return build_powerset_universe(int(self.payload["n"]), name=self.name)
        if self.kind == "explicit":
            return build_explicit(self.payload, name=self.name)
        raise InstanceError(f"unknown instance kind {self.kind!r}")

    def canonical(self) -> dict:
        """Canonical JSON-able form: sorted keys, normalised edge lists."""
        payload = dict(self.payload)
        if self.kind == "graph":
            payload["edges"] = sorted(sorted([u, v], key=str) for u, v in payload["edges"])
            if "vertices" in payload:
                payload["vertices"] = sorted(payload["vertices"], key=str)
        return {"version": FORMAT_VERSION, "kind": self.kind, "name": self.name, **payload}


def parse_instance(data: dict, default_name="instance") -> InstanceSpec:
    if not isinstance(data, dict):
        raise InstanceError("instance must be a JSON object")
    version = data.get("version", FORMAT_VERSION)
    if version != FORMAT_VERSION:
        raise InstanceError(f"unsupported instance format version {version}")
    kind = data.get("kind", "explicit" if "elements" in data else None)
    if kind not in ("graph", "powerset", "explicit"):
        raise InstanceError(f"unknown instance kind {kind!r}")
    payload = {k: v for k, v in data.items() if k not in ("version", "kind", "name")}
    if kind == "graph" and not isinstance(payload.get("edges"), list):
        raise InstanceError("graph instance needs an 'edges' list")
    if kind == "powerset" and not isinstance(payload.get("n"), int):
        raise InstanceError("powerset instance needs an integer 'n'")
    return InstanceSpec(kind, payload, data.get("name", default_name))


def serialize_instance(spec: InstanceSpec) -> str:
    return json.dumps(spec.canonical(), sort_keys=True, indent=1, ensure_ascii=False) + "\n"


def fixture_names() -> list[str]:
    d = resources.files("sepsys") / "fixtures"
    return sorted(p.name[:-5] for p in d.iterdir() if p.name.endswith(".json"))


def load_instance(path_or_name) -> InstanceSpec:
    """Load from a path, or from a shipped fixture name such as ``inst-2tri``."""
    p = Path(path_or_name)
    if p.is_file():
        text = p.read_text(encoding="utf-8")
        default = p.stem
    else:
        stem = p.name[:-5] if p.name.endswith(".json") else p.name
        ref = resources.files("sepsys") / "fixtures" / f"{stem.lower()}.json"
        if not ref.is_file():
            raise InstanceError(f"no such instance file or fixture: {path_or_name}")
        text = ref.read_text(encoding="utf-8")
        default = stem
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"invalid JSON in {path_or_name}: {exc}") from None
    return parse_instance(data, default_name=default)


def universe_to_explicit(U: Universe) -> dict:
    """Explicit-table payload for a universe (covering relation only)."""
    n = len(U)
    leq = U.leq & ~np.eye(n, dtype=bool)
    # Hasse edges suffice: the closure is recomputed on load
    two_step = (leq.astype(np.int32) @ leq.astype(np.int32)) > 0
    cover = leq & ~two_step
    out = {
        "elements": [U.label(i) for i in range(n)],
        "inv": U.inv.tolist(),
        "leq_pairs": np.argwhere(cover).tolist(),
        "join": U.join.astype(int).tolist(),
    }
    if U.order is not None:
        out["ord"] = U.order.tolist()
    return out
