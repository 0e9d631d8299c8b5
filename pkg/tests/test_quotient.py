import random

import pytest
from hypothesis import given, strategies as st

from sepsys.core import HypothesisViolation, SubSystem, is_tree_set
from sepsys.generators import random_corner_instance
from sepsys.instances import powerset_id
from sepsys.oracle import brute_profiles, verify_abstract
from sepsys.profiles import k_profiles
from sepsys.quotient import (
    Fiber,
    ImageSeparation,
    abstract_tree_set,
    f_image,
    fibers,
    good_image_tree_set,
    greatest_in_fiber,
    image_map,
    is_orderly,
    is_weakly_submodular,
    lift_tree_set,
    orderly_witness,
    separator_for,
)

from checks import leqequiv_violations, maphom_violations
from conftest import sep


@pytest.fixture(scope="module")
def star(set4):
    """The separations of {1,2,3,4} other than ∅ and E, with their four profiles."""
    S = SubSystem(set4, range(1, 15))
    return S, brute_profiles(S)


def test_star_profiles_are_the_four_points(star, set4):
    S, P = star
    assert len(P) == 4
    # profile j points away from exactly one element: it contains every set missing that element
    for Q in P:
        missing = [e for e in range(1, 5) if powerset_id([e]) not in Q.chosen]
        assert len(missing) == 1


def test_image_map_and_inverse(star):
    S, P = star
    imgs = image_map(S, P)
    for s in S:
        assert imgs[s] == f_image(s, P, S)
        assert imgs[S.inverse(s)] == imgs[s].inverse()
        assert set(imgs[s].members) == {j for j, Q in enumerate(P) if S.inverse(s) in Q.chosen}


def test_f_image_edge_cases(star, two_tri):
    S, P = star
    assert f_image(1, (), S) == ImageSeparation(0, 0)
    full = [s for s in S if f_image(s, P, S).mask == 0b1111]
    assert all(all(S.inverse(s) in Q.chosen for Q in P) for s in full)
    with pytest.raises(ValueError):
        f_image(sep(two_tri, "(abc|cdef)"), k_profiles(two_tri, 1))
    S3 = two_tri.subsystem_k(3)
    with pytest.raises(ValueError):
        f_image(sep(two_tri, "(abc|cdef)"), k_profiles(two_tri, 1), S3)


def test_bridge_image_in_two_triangles(two_tri):
    P = k_profiles(two_tri, 3, regular_only=True)
    s = sep(two_tri, "(abc|cdef)")
    img = f_image(s, P, two_tri.subsystem_k(3))
    assert len(img.members) == 1
    (j,) = img.members
    assert two_tri.inv[s] in P[j].chosen and s in P[1 - j].chosen


def test_good_set_of_the_star(star, set4):
    S, P = star
    good = good_image_tree_set(S, P)
    # the four singletons and their complements; the 2-sets cross each other
    assert {a.mask for a in good} == {1, 2, 4, 8, 14, 13, 11, 7}
    images = set(image_map(S, P).values())
    for a in good:
        assert all(a.nested_with(b) for b in images)


def test_crossing_images():
    a, b = ImageSeparation(0b0011, 4), ImageSeparation(0b0110, 4)
    assert not a.nested_with(b)
    chain = [ImageSeparation(m, 4) for m in (0b0001, 0b0011, 0b0111)]
    assert all(x.nested_with(y) for x in chain for y in chain)


def test_orderly_and_weak_submodularity(star, two_tri):
    S, P = star
    assert is_orderly(S, P) and is_weakly_submodular(S, P)
    S3 = two_tri.subsystem_k(3)
    P3 = k_profiles(two_tri, 3, regular_only=True)
    w = orderly_witness(S3, P3)
    assert w is not None
    s, t = w
    assert S3.join(s, t) is None or S3.join(S3.inverse(s), S3.inverse(t)) is None
    # a single profile never has an opposing partner
    assert is_orderly(S3, P3[:1]) or orderly_witness(S3, P3[:1]) is not None


def test_empty_system_is_weakly_submodular(set4):
    S = set4.subsystem_k(0)
    assert is_weakly_submodular(S, k_profiles(set4, 0))


def test_separator_for_star(star, set4):
    S, P = star
    good = good_image_tree_set(S, P)
    for i in range(4):
        for j in range(4):
            if i == j:
                with pytest.raises(ValueError):
                    separator_for(P[i], P[j], S, P)
                continue
            s = separator_for(P[i], P[j], S, P)
            assert s in P[i].chosen and s not in P[j].chosen
            assert f_image(s, P, S) in good


def test_separator_for_single_pair(two_tri):
    S = two_tri.subsystem_k(1)
    P = k_profiles(two_tri, 1)
    assert len(S) == 2 and len(P) == 2
    s = separator_for(P[0], P[1], S, P)
    assert P[0].chosen - P[1].chosen == {s}


def test_separator_for_guards_orderliness(two_tri):
    S = two_tri.subsystem_k(3)
    P = k_profiles(two_tri, 3, regular_only=True)
    with pytest.raises(HypothesisViolation):
        separator_for(P[0], P[1], S, P)


def test_greatest_in_fiber(set4):
    W = set4.whole()
    a, b = powerset_id([1]), powerset_id([2])
    ab = powerset_id([1, 2])
    assert greatest_in_fiber(Fiber(ImageSeparation(0, 0), (a, b, ab)), W) == ab
    assert greatest_in_fiber(Fiber(ImageSeparation(0, 0), (a,)), W) == a
    with pytest.raises(HypothesisViolation):
        greatest_in_fiber(Fiber(ImageSeparation(0, 0), (a, b)), W)


def test_fibers_have_greatest_elements(star):
    S, P = star
    for X in fibers(S, P).values():
        g = greatest_in_fiber(X, S, P)
        assert all(S.le(x, g) for x in X.members)


def test_lift_star(star, set4):
    S, P = star
    good = good_image_tree_set(S, P)
    lifted = lift_tree_set(good, S, P, P[0])
    assert {set4.label(s) for s in lifted.result} == {
        "{1}", "{2}", "{3}", "{4}", "{2,3,4}", "{1,3,4}", "{1,2,4}", "{1,2,3}"}
    assert all(0 not in A.members for A in lifted.orientation)
    for A, s in lifted.lifted.items():
        assert f_image(s, P, S) == A
    assert is_tree_set(lifted.result, S)


def test_lift_of_a_chain(star, set4):
    S, P = star
    A, B = ImageSeparation(0b0001, 4), ImageSeparation(0b1110, 4)
    lifted = lift_tree_set({A}, S, P, P[0])
    assert set(lifted.lifted) == {A, B}
    with pytest.raises(ValueError):
        lift_tree_set({ImageSeparation(0b0011, 4), ImageSeparation(0b0110, 4)}, S, P, P[0])


def test_abstract_tree_set_star(star, set4):
    S, P = star
    T = abstract_tree_set(S, P)
    singles = {powerset_id([e]) for e in range(1, 5)}
    assert T == singles | {set4.inv[s] for s in singles}
    assert verify_abstract(T, S, P).ok


def test_abstract_tree_set_trivial_cases(star, two_tri):
    S, P = star
    assert abstract_tree_set(S, P[:1]) == frozenset()
    assert abstract_tree_set(S, ()) == frozenset()
    # S_2 contains the small separation (∅|V), so it must be regularized first
    S1 = two_tri.subsystem_k(2)
    P1 = [Q for Q in k_profiles(two_tri, 2)]
    with pytest.raises(HypothesisViolation):
        abstract_tree_set(S1, P1)


def test_maphom_on_star(star):
    S, P = star
    rng = random.Random(1)
    pairs = [(rng.choice(S.ids.tolist()), rng.choice(S.ids.tolist())) for _ in range(300)]
    assert maphom_violations(S, P, pairs) == []


def test_leqequiv_on_star(star):
    S, P = star
    assert leqequiv_violations(S, P) == []


@given(st.integers(0, 10_000))
def test_abstract_tree_set_random(seed):
    inst = random_corner_instance(seed)
    T = abstract_tree_set(inst.system, inst.profiles)
    rep = verify_abstract(T, inst.system, inst.profiles)
    assert rep.ok, rep.violations


def test_fiber_order_needs_regular_profiles(set4):
    # S_1 = {∅, E}: the profiles {∅} and {E}; the second contains the co-small E
    S = set4.subsystem_k(1)
    P = k_profiles(set4, 1)
    assert len(P) == 2 and is_weakly_submodular(S, P)
    assert leqequiv_violations(S, P) != []
    assert maphom_violations(S, P, [(0, 15)]) != []
