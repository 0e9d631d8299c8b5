"""Command line: ``sepsys <command> ...``.

Exit codes: 0 success, 1 a verification violation was found, 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from .core import CornerSystem, HypothesisViolation, Universe, validate_corner_system, validate_universe
from .instances import InstanceError, load_instance
from .profiles import Profile, ProfileSet, enumerate_profiles, is_robust, k_profiles
from .quotient import (
    abstract_tree_set,
    good_image_tree_set,
    image_map,
    is_orderly,
    is_weakly_submodular,
)
from .regularization import essential_core, regularize, tree_set_nonregular
from .tangletree import tree_of_tangles


class InputError(Exception):
    pass


def _load(name):
    try:
        spec = load_instance(name)
        obj = spec.build()
    except (InstanceError, KeyError, TypeError, ValueError) as exc:
        raise InputError(str(exc)) from None
    rep = validate_universe(obj) if isinstance(obj, Universe) else validate_corner_system(obj)
    if not rep.ok:
        raise InputError(f"instance {spec.name} fails validation: {', '.join(sorted(rep.names()))}")
    return spec, obj


def _need_universe(obj, what):
    if not isinstance(obj, Universe) or obj.order is None:
        raise InputError(f"{what} needs a universe with an order function")
    return obj


def _fmt(S, ids) -> str:
    return "{" + ", ".join(S.label(s) if hasattr(S, "label") else str(s) for s in sorted(ids)) + "}"


def tangle_profiles(U: Universe, max_order: int | None = None) -> ProfileSet:
    """Regular robust profiles of every order up to ``max_order`` (default: all)."""
    top = U.max_order + 1 if max_order is None else max_order
    return ProfileSet(P for k in range(top + 1) for P in k_profiles(U, k, regular_only=True) if is_robust(P))


def tot_document(name: str, U: Universe, res) -> dict:
    return {
        "instance": name,
        "tree": sorted(int(t) for t in res.tree),
        "separations": [
            {"id": int(t), "label": U.label(t), "order": int(U.order[t]), "inverse": int(U.inv[t]),
             "certificate": list(res.certificates[t])}
            for t in sorted(res.tree)
        ],
        "profiles": [
            {"index": i, "order": P.order, "chosen": sorted(int(s) for s in P.chosen)}
            for i, P in enumerate(res.profiles)
        ],
    }


def tot_dot(U: Universe, tree) -> str:
    T = sorted(tree)
    lines = ["digraph tree_set {", "  rankdir=LR;"]
    for t in T:
        lines.append(f'  n{t} [label="{U.label(t)} ord {int(U.order[t])}"];')
    for s in T:
        for t in T:
            if s != t and U.leq[s, t] and not any(u not in (s, t) and U.leq[s, u] and U.leq[u, t] for u in T):
                lines.append(f"  n{s} -> n{t};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _dump(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------------------
# commands


def cmd_profiles(args, out):
    spec, obj = _load(args.instance)
    if isinstance(obj, CornerSystem):
        found = enumerate_profiles(obj, regular_only=args.regular_only)
        for P in found:
            print(f"profile {_fmt(obj, P.chosen)}", file=out)
        print(f"{len(found)} profiles", file=out)
        return 0
    U = _need_universe(obj, "profiles")
    top = args.max_order if args.max_order is not None else U.max_order + 1
    total = 0
    for k in range(top + 1):
        for P in k_profiles(U, k, regular_only=args.regular_only):
            if args.robust_only and not is_robust(P):
                continue
            total += 1
            print(f"order {k}: {_fmt(U, P.chosen)}", file=out)
    print(f"{total} profiles", file=out)
    return 0


def cmd_tot(args, out):
    spec, obj = _load(args.instance)
    U = _need_universe(obj, "tot")
    res = tree_of_tangles(U, tangle_profiles(U, args.max_order))
    text = _dump(tot_document(spec.name, U, res))
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        out.write(text)
    if args.dot:
        Path(args.dot).write_text(tot_dot(U, res.tree), encoding="utf-8")
    return 0


def cmd_verify(args, out):
    from .oracle import verify_tree

    spec, obj = _load(args.instance)
    U = _need_universe(obj, "verify")
    try:
        doc = json.loads(Path(args.tree).read_text(encoding="utf-8"))
        tree = [int(t) for t in doc["tree"]]
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise InputError(f"cannot read tree file: {exc}") from None
    if any(not 0 <= t < len(U) for t in tree):
        raise InputError("tree file references unknown separation ids")
    if "profiles" in doc:
        profs = ProfileSet(Profile(U.subsystem_k(p["order"]), frozenset(p["chosen"]), p["order"])
                           for p in doc["profiles"])
    else:
        profs = tangle_profiles(U)
    rep = verify_tree(tree, profs, U, instance=spec.name)
    for line in rep.lines():
        print(line, file=out)
    return 0 if rep.ok else 1


def _system(obj, order):
    if isinstance(obj, Universe):
        if order is None:
            raise InputError("--order is required for universe instances")
        return obj.subsystem_k(order)
    return obj


def cmd_regularize(args, out):
    spec, obj = _load(args.instance)
    S = _system(obj, args.order)
    profs = enumerate_profiles(S)
    orderly = is_orderly(S, profs)
    res = regularize(S, profs if orderly else None)
    core = essential_core(S)
    removed = sorted(set(S.ids.tolist()) - set(core.ids.tolist()))
    dropped = [(int(res.core.ids[i]), int(res.core.ids[j]))
               for i in range(len(res.core)) for j in range(len(res.core))
               if res.core.leq[i, j] and not res.regular.leq[i, j]]
    print(f"elements: {len(S)} -> {len(res.regular)}", file=out)
    print(f"removed: {_fmt(S, removed)}", file=out)
    for s, t in dropped:
        print(f"dropped relation: {S.label(s)} <= {S.label(t)}", file=out)
    print(f"regular: {str(res.regular.small_mask.sum() == 0).lower()}", file=out)
    if orderly:
        print(f"profiles: {len(profs)} -> {len(res.projected_profiles)}", file=out)
    else:
        print(f"profiles: {len(profs)}, not projected (system is not orderly for them)", file=out)
    return 0


def cmd_quotient(args, out):
    spec, obj = _load(args.instance)
    S = _system(obj, args.order)
    profs = enumerate_profiles(S).sets()
    imgs = image_map(S, profs)
    good = good_image_tree_set(S, profs)
    print(f"profiles: {len(profs)}", file=out)
    for s in sorted(imgs):
        print(f"f({S.label(s)}) = {sorted(imgs[s].members)}", file=out)
    print("good: " + ", ".join(str(sorted(a.members)) for a in sorted(good, key=lambda a: a.mask)), file=out)
    print(f"orderly: {str(is_orderly(S, profs)).lower()}", file=out)
    print(f"weakly submodular: {str(is_weakly_submodular(S, profs)).lower()}", file=out)
    return 0


def cmd_fuzz(args, out):
    from .generators import random_corner_instance, random_graph_universe
    from .oracle import verify_abstract, verify_tree

    rng = random.Random(args.seed)
    failures = 0
    for i in range(args.count):
        seed = rng.randrange(2**31)
        checks = []
        U = random_graph_universe(seed)
        res = tree_of_tangles(U, tangle_profiles(U))
        checks.append(("graph", verify_tree(res.tree, res.profiles, U, instance=U.name)))
        inst = random_corner_instance(seed, regular=True)
        checks.append(("abstract", verify_abstract(abstract_tree_set(inst.system, inst.profiles),
                                                   inst.system, inst.profiles)))
        inst = random_corner_instance(seed, regular=False)
        checks.append(("nonregular", verify_abstract(tree_set_nonregular(inst.system, inst.profiles),
                                                     inst.system, inst.profiles)))
        for kind, rep in checks:
            if not rep.ok:
                failures += 1
                print(f"seed {seed} {kind}: {rep.violations[0]}", file=out)
    print(f"{args.count} rounds, {failures} violations", file=out)
    return 1 if failures else 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sepsys", description="Profiles and trees of tangles in separation systems.")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("profiles", help="list profiles")
    q.add_argument("instance")
    q.add_argument("--max-order", type=int)
    q.add_argument("--regular-only", action="store_true")
    q.add_argument("--robust-only", action="store_true")
    q.set_defaults(fn=cmd_profiles)

    q = sub.add_parser("tot", help="tree of tangles with certificates")
    q.add_argument("instance")
    q.add_argument("--max-order", type=int)
    q.add_argument("--out")
    q.add_argument("--dot")
    q.set_defaults(fn=cmd_tot)

    q = sub.add_parser("verify", help="check a tree file with the brute-force oracle")
    q.add_argument("instance")
    q.add_argument("tree")
    q.set_defaults(fn=cmd_verify)

    q = sub.add_parser("regularize", help="essential core and regularization of S_k")
    q.add_argument("instance")
    q.add_argument("--order", type=int)
    q.set_defaults(fn=cmd_regularize)

    q = sub.add_parser("quotient", help="image system and good separations of S_k")
    q.add_argument("instance")
    q.add_argument("--order", type=int)
    q.set_defaults(fn=cmd_quotient)

    q = sub.add_parser("fuzz", help="random-instance falsification run")
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--count", type=int, default=10)
    q.set_defaults(fn=cmd_fuzz)
    return p


def run_cli(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        return args.fn(args, out)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except HypothesisViolation as exc:
        print(f"violation: {exc} (witness {exc.witness})", file=out)
        return 1


def main() -> None:
    sys.exit(run_cli())
