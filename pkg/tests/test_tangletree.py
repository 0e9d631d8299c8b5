import numpy as np
import pytest

from sepsys.cli import tangle_profiles
from sepsys.core import HypothesisViolation, is_tree_set, maximal_elements
from sepsys.generators import random_graph_universe
from sepsys.oracle import brute_min_order, brute_profiles, verify_tree
from sepsys.profiles import Distinction, distinguishes_efficiently, k_profiles
from sepsys.quotient import f_image, is_orderly
from sepsys.tangletree import (
    LevelState,
    build_level,
    find_focus_distinguisher,
    focus,
    induced_set,
    tree_of_tangles,
)

from conftest import sep


@pytest.fixture(scope="module")
def tot_2tri(two_tri):
    return tree_of_tangles(two_tri, tangle_profiles(two_tri))


@pytest.fixture(scope="module")
def tot_k4(k4pair):
    return tree_of_tangles(k4pair, tangle_profiles(k4pair))


def test_induced_set_at_zero(two_tri):
    P = induced_set(tangle_profiles(two_tri), 0)
    assert len(P) == 1 and P[0].chosen == frozenset() and P[0].order == 0


def test_induced_set_at_top_is_family(two_tri):
    fam = tangle_profiles(two_tri)
    assert set(induced_set(fam, 10)) == set(fam)


def test_induced_set_at_one_matches_oracle(two_tri):
    fam = tangle_profiles(two_tri)
    got = {P.chosen for P in induced_set(fam, 1) if P.order == 1}
    every = {P.chosen for P in brute_profiles(two_tri.subsystem_k(1))}
    assert got <= every
    # the only regular 1-profile contains (∅|V)
    assert got == {frozenset({sep(two_tri, "(∅|abcdef)")})}


def test_focus_with_empty_tree(two_tri):
    fam = tangle_profiles(two_tri)
    state = LevelState(0, frozenset(), induced_set(fam, 0))
    ctx = focus(state.profiles[0], state, fam)
    assert ctx.N_P == ()
    assert len(ctx.U_P) == len(two_tri)


def test_focus_single_n(tot_k4, k4pair):
    U = k4pair
    state = tot_k4.levels[2]
    assert state.k == 2 and state.tree
    for P in state.profiles:
        if P.order != 2:
            continue
        ctx = focus(P, state, tot_k4.profiles)
        assert set(ctx.N_P) == set(maximal_elements(U.whole(), [t for t in state.tree if t in P.chosen]))
        if len(ctx.N_P) == 1:
            (n,) = ctx.N_P
            expected = {u for u in range(len(U)) if U.leq[n, u] or U.leq[n, U.inv[u]]}
            assert set(ctx.U_P.ids.tolist()) == expected
            crossing = [u for u in range(len(U)) if not (U.leq[n, u] or U.leq[n, U.inv[u]]
                                                         or U.leq[U.inv[n], u] or U.leq[U.inv[n], U.inv[u]])]
            assert crossing and not set(crossing) & expected


def _nontrivial_focus(U):
    res = tree_of_tangles(U, tangle_profiles(U))
    for st in res.levels[:-1]:
        for P in st.profiles:
            if P.order != st.k:
                continue
            ctx = focus(P, st, res.profiles)
            if len(ctx.Q_P) >= 2 and ctx.N_P:
                yield st.k, ctx


def test_find_focus_distinguisher_moves_crossing_separations():
    # a random graph whose level-2 focus has separations crossing N_P
    U = random_graph_universe(30)
    moved = 0
    for k, ctx in _nontrivial_focus(U):
        S1 = U.subsystem_k(k + 1)
        for r in S1:
            img = f_image(r, ctx.Q_P, S1)
            if img.is_trivial():
                continue
            u = find_focus_distinguisher(r, ctx)
            assert u in ctx.U_P
            assert U.order[u] == k
            assert f_image(u, ctx.Q_P, S1) == img
            moved += r not in ctx.U_P
    assert moved == 4


def test_find_focus_distinguisher_without_tree(tot_2tri, two_tri):
    st = tot_2tri.levels[1]
    assert st.tree == frozenset()
    P = next(P for P in st.profiles if P.order == 1)
    ctx = focus(P, st, tot_2tri.profiles)
    assert ctx.N_P == () and len(ctx.Q_P) == 3
    r = sep(two_tri, "(abc|cdef)")
    assert not f_image(r, ctx.Q_P, two_tri.subsystem_k(2)).is_trivial()
    assert find_focus_distinguisher(r, ctx) == r


def test_trivial_image_rejected(tot_2tri, two_tri):
    st = tot_2tri.levels[1]
    P = next(P for P in st.profiles if P.order == 1)
    ctx = focus(P, st, tot_2tri.profiles)
    with pytest.raises(ValueError):
        find_focus_distinguisher(sep(two_tri, "(∅|abcdef)"), ctx)


def test_levels_are_monotone(tot_k4, k4pair):
    prev = frozenset()
    for st in tot_k4.levels:
        assert prev <= st.tree
        assert (k4pair.order[list(st.tree)] < st.k).all() if st.tree else True
        prev = st.tree
    assert tot_k4.tree == tot_k4.levels[-1].tree


def test_no_higher_profiles_means_no_growth(two_tri):
    fam = tangle_profiles(two_tri)
    st = LevelState(3, frozenset({1}), induced_set(fam, 3))
    assert build_level(st, fam).tree == st.tree


def test_two_triangles_tree(tot_2tri, two_tri):
    labels = {two_tri.label(t) for t in tot_2tri.tree}
    assert labels == {"(abc|cdef)", "(cdef|abc)", "(abcd|def)", "(def|abcd)"}
    rep = verify_tree(tot_2tri.tree, tot_2tri.profiles, two_tri)
    assert rep.ok, rep.violations


def test_k4pair_tree(tot_k4, k4pair):
    labels = {k4pair.label(t) for t in tot_k4.tree}
    assert labels == {"(1234|45678)", "(45678|1234)", "(12345|5678)", "(5678|12345)"}
    assert verify_tree(tot_k4.tree, tot_k4.profiles, k4pair).ok


@pytest.mark.parametrize("name", ["tot_2tri", "tot_k4"])
def test_certificates(name, request):
    res = request.getfixturevalue(name)
    fam = res.profiles
    assert set(res.certificates) == set(res.tree)
    for t, (i, j) in res.certificates.items():
        assert t in fam[i].chosen and fam[i].universe.inv[t] in fam[j].chosen
        assert distinguishes_efficiently(t, fam[i], fam[j]) is Distinction.YES_EFFICIENT
        assert fam[i].universe.order[t] == brute_min_order(fam[i], fam[j])


def test_single_profile_gives_empty_tree(two_tri):
    fam = k_profiles(two_tri, 3, regular_only=True)[:1]
    res = tree_of_tangles(two_tri, fam)
    assert res.tree == frozenset()
    assert tree_of_tangles(two_tri, ()).tree == frozenset()


def test_non_regular_profile_rejected(two_tri):
    bad = [P for P in k_profiles(two_tri, 2) if P not in k_profiles(two_tri, 2, regular_only=True)]
    with pytest.raises(HypothesisViolation):
        tree_of_tangles(two_tri, bad)


def test_level_systems_are_orderly(tot_k4, k4pair):
    # order-k separations of U_P are orderly for the restrictions of Q_P
    from sepsys.core import SubSystem
    from sepsys.profiles import Profile

    for st in tot_k4.levels[:-1]:
        for P in st.profiles:
            if P.order != st.k:
                continue
            ctx = focus(P, st, tot_k4.profiles)
            ids = ctx.U_P.ids[k4pair.order[ctx.U_P.ids] == st.k]
            level = SubSystem(k4pair, ids)
            keep = set(ids.tolist())
            restr = [Profile(level, frozenset(s for s in Q.chosen if s in keep)) for Q in ctx.Q_P]
            assert is_orderly(level, restr)


def test_tree_is_tree_set(tot_2tri, two_tri):
    assert is_tree_set(tot_2tri.tree, two_tri.whole())
    assert tot_2tri.oriented() == sorted(t for t in tot_2tri.tree if t <= two_tri.inv[t])
