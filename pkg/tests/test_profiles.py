import numpy as np
import pytest
from hypothesis import given, strategies as st

from sepsys.core import HypothesisViolation, Orientation
from sepsys.generators import random_corner_instance, random_graph_universe
from sepsys.instances import build_powerset_universe, powerset_id
from sepsys.oracle import brute_profiles
from sepsys.profiles import (
    Distinction,
    Profile,
    ProfileSet,
    distinguishes,
    distinguishes_efficiently,
    enumerate_profiles,
    induced,
    is_closed,
    is_profile,
    is_regular_profile,
    is_robust,
    k_profiles,
    min_distinguishing_order,
    robust_corner,
    robustness_witness,
)

from conftest import sep

# profile counts of S_k, from the brute-force oracle
ALL_COUNTS = {
    "set4": [1, 2, 5, 4],
    "two_tri": [1, 2, 7],
    "k4pair": [1, 2, 9],
}
# regular robust k-profiles for k = 0, 1, ...
TANGLE_COUNTS = {
    "set4": [1, 1, 5, 4],
    "two_tri": [1, 1, 3, 2, 0, 0, 0, 0],
    "k4pair": [1, 1, 3, 2, 2, 0, 0, 0, 0, 0],
}


@pytest.mark.parametrize("fixture", sorted(ALL_COUNTS))
def test_profile_counts_match_oracle_values(fixture, request):
    U = request.getfixturevalue(fixture)
    assert [len(k_profiles(U, k)) for k in range(len(ALL_COUNTS[fixture]))] == ALL_COUNTS[fixture]


@pytest.mark.parametrize("fixture", sorted(TANGLE_COUNTS))
def test_regular_robust_counts(fixture, request):
    U = request.getfixturevalue(fixture)
    got = [sum(is_robust(P) for P in k_profiles(U, k, regular_only=True)) for k in range(U.max_order + 2)]
    assert got == TANGLE_COUNTS[fixture]


def _labels(S, profiles):
    return sorted(sorted(S.label(s) for s in P.chosen) for P in profiles)


def test_corner_small_profiles(corner_small):
    expected = sorted(sorted(p) for p in [
        ["s", "a", "b", "z"], ["s", "a", "b*", "z"], ["s", "a*", "b*", "z"],
        ["s*", "a", "b", "z"], ["s*", "a", "b*", "z"], ["s*", "a*", "b*", "z"],
    ])
    assert _labels(corner_small, enumerate_profiles(corner_small)) == expected
    # the regular ones avoid the co-small s*
    assert _labels(corner_small, enumerate_profiles(corner_small, regular_only=True)) == [p for p in expected if "s" in p]


def test_corner_chain_profiles(corner_chain):
    expected = sorted(sorted(p) for p in [
        ["p", "q", "r", "x", "e"], ["p", "q", "r*", "x*", "e"], ["p", "q*", "r*", "x", "e"],
        ["p", "q*", "r*", "x*", "e"], ["p*", "q*", "r*", "x*", "e"],
    ])
    assert _labels(corner_chain, enumerate_profiles(corner_chain)) == expected


def test_empty_system_has_the_empty_profile(set4):
    S = set4.subsystem_k(0)
    found = enumerate_profiles(S)
    assert len(found) == 1 and found[0].chosen == frozenset()
    assert brute_profiles(S) == found


def test_degenerate_element_kills_profiles():
    U = build_powerset_universe(0)
    assert enumerate_profiles(U.whole()) == ()
    assert brute_profiles(U.whole()) == ()


def test_profiles_are_profiles(two_tri):
    for k in range(4):
        for P in k_profiles(two_tri, k):
            assert is_profile(P)
            assert is_closed(P)


def test_non_profile_detected(set4):
    S = set4.subsystem_k(2)
    # all four singletons' complements: inconsistent
    bad = Orientation(S, frozenset({0} | {set4.inv[powerset_id([i])] for i in range(1, 5)}))
    assert bad.is_orientation() and not is_profile(bad)


def test_regular_only_is_filter_of_all(two_tri):
    for k in range(4):
        every = k_profiles(two_tri, k)
        regular = k_profiles(two_tri, k, regular_only=True)
        assert set(regular) == {P for P in every if is_regular_profile(P)}


def test_induced_profiles(two_tri):
    for P in k_profiles(two_tri, 3):
        Q = induced(P, 2)
        assert Q.order == 2 and Q in k_profiles(two_tri, 2)
        assert induced(P, 0).chosen == frozenset()
        assert induced(P, 3) is P
        with pytest.raises(ValueError):
            induced(P, 4)


def test_distinguishing_in_two_triangles(two_tri):
    P, Q = k_profiles(two_tri, 3, regular_only=True)
    bridge = sep(two_tri, "(abc|cdef)")
    assert distinguishes(bridge, P, Q)
    assert min_distinguishing_order(P, Q) == 1
    assert distinguishes_efficiently(bridge, P, Q) is Distinction.YES_EFFICIENT
    wide = sep(two_tri, "(abcd|cdef)")
    assert distinguishes_efficiently(wide, P, Q) is Distinction.YES_INEFFICIENT
    assert distinguishes_efficiently(sep(two_tri, "(∅|abcdef)"), P, Q) is Distinction.NO
    assert min_distinguishing_order(P, P) is None


def test_robustness(two_tri, set4):
    for k in range(4):
        for P in k_profiles(set4, k):
            assert is_robust(P) == (robustness_witness(P) is None)
    P = k_profiles(two_tri, 2)[0]
    assert robustness_witness(P) is None


def test_robust_corner_on_focus_instance():
    # random graph with a level where a crossing separation must be replaced
    U = random_graph_universe(30)
    Q, Q2 = [P for P in k_profiles(U, 3, regular_only=True) if is_robust(P)][:2]
    s = next(int(t) for t in np.flatnonzero(Q.mask & Q2.mask[U.inv]) if U.order[t] == min_distinguishing_order(Q, Q2))
    low = next(int(t) for t in np.flatnonzero(Q.mask) if U.order[t] == 1 and not U.leq[t, U.inv[t]])
    c = robust_corner(low, s, Q, Q2)
    assert distinguishes_efficiently(c, Q, Q2) is Distinction.YES_EFFICIENT
    with pytest.raises(ValueError):
        robust_corner(s, low, Q, Q2)


def test_profile_set_dedupes(two_tri):
    P = k_profiles(two_tri, 2)[0]
    twin = Profile(P.system, P.chosen, P.order)
    other = Profile(P.system, P.chosen, None)
    ps = ProfileSet([P, twin, other])
    assert len(ps) == 2
    assert len(ps.sets()) == 1


@given(st.integers(0, 10_000), st.booleans())
def test_enumeration_equals_oracle_on_random_systems(seed, regular):
    inst = random_corner_instance(seed, regular=regular, min_profiles=1)
    S = inst.system
    assert set(P.chosen for P in enumerate_profiles(S)) == set(P.chosen for P in brute_profiles(S))
