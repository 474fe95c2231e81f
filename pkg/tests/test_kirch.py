import json
from math import gcd

import pytest
from hypothesis import given, settings, strategies as st

from kirchlip.errors import InputError
from kirchlip.kirch import (
    AlmostBasic,
    Finite,
    Progression,
    Union,
    ac_closure,
    classify_cover,
    element_index,
    enumerate_window,
    first_elements,
    intersect,
    intersect_progressions,
    is_subset,
    proximity_solve,
    set_from_json,
    set_to_json,
)

progressions = st.builds(Progression, st.integers(1, 200), st.integers(1, 60))


def squarefree(d):
    return all(d % (p * p) for p in range(2, int(d**0.5) + 1))


basic = st.integers(1, 60).filter(squarefree).flatmap(
    lambda d: st.integers(1, d).filter(lambda a: gcd(a, d) == 1).map(lambda a: Progression(a, d))
)


def test_progression_normalizes_to_least_positive_element():
    assert Progression(13, 6) == Progression(1, 6)
    assert Progression(6, 6).a == 6
    assert Progression(5, 0).enumerate(10) == [5]


def test_basic_flags():
    assert Progression(1, 6).is_basic
    assert not Progression(2, 6).is_basic
    assert not Progression(1, 4).is_basic
    with pytest.raises(InputError):
        AlmostBasic(Progression(2, 4), (6,))


# -- closures -----------------------------------------------------------------

def test_ac_closure_examples():
    assert ac_closure([1, 7, 11]) == Progression(1, 2)
    assert ac_closure([5]) == Finite((5,))
    assert ac_closure([4, 10]) == Progression(4, 6)


@settings(max_examples=200)
@given(st.lists(st.integers(1, 300), min_size=2, max_size=5, unique=True))
def test_ac_closure_contains_points_and_is_minimal(pts):
    C = ac_closure(pts)
    assert all(C.contains(x) for x in pts)
    # every full progression with d <= 50 holding the points contains C
    for d in range(1, 51):
        a = min(pts)
        if all((x - a) % d == 0 for x in pts):
            P = Progression(a, d)
            assert is_subset(C, P)


@settings(max_examples=60)
@given(basic, st.data())
def test_closure_meets_basic_set_often(S, data):
    # for 2..4 points of an almost basic set, closure n S n [1, 10^4] has >= 10 elements
    pts = data.draw(st.lists(st.sampled_from(S.enumerate(600)), min_size=2, max_size=4, unique=True))
    C = ac_closure(pts)
    assert len([x for x in C.enumerate(10**4) if S.contains(x)]) >= 10


# -- intersections -----------------------------------------------------------

def test_intersect_progressions_examples():
    assert intersect_progressions([Progression(1, 2), Progression(2, 3)]) == Progression(5, 6)
    U = Progression(4, 6)
    assert intersect_progressions([U]) == U
    assert intersect_progressions([Progression(1, 6), Progression(5, 6)]) is None


@settings(max_examples=300)
@given(progressions, progressions)
def test_intersect_progressions_against_enumeration(P, Q):
    N = 10**4
    brute = sorted(set(P.enumerate(N)) & set(Q.enumerate(N)))
    R = intersect_progressions([P, Q])
    assert (R.enumerate(N) if R else []) == brute


def test_enumerate_window_examples():
    assert enumerate_window(Progression(1, 3), 10) == [1, 4, 7, 10]
    assert enumerate_window(AlmostBasic(Progression(1, 3), (4,)), 10) == [1, 7, 10]
    assert enumerate_window(Union((Progression(1, 2), Progression(2, 3))), 8) == [1, 2, 3, 5, 7, 8]


def test_first_elements_and_index():
    S = AlmostBasic(Progression(1, 2), (3,))
    assert first_elements(S, 4) == [1, 5, 7, 9]
    assert element_index(S, 7) == 3
    with pytest.raises(InputError):
        element_index(S, 3)


@settings(max_examples=200)
@given(basic, basic, st.lists(st.integers(1, 100), max_size=3))
def test_symbolic_intersection_matches_enumeration(P, Q, ex):
    A = AlmostBasic(P, tuple(x for x in ex if P.contains(x)))
    R = intersect(A, Q)
    brute = [x for x in A.enumerate(2000) if Q.contains(x)]
    assert (R.enumerate(2000) if R else []) == brute


# -- proximity --------------------------------------------------------------

def test_proximity_examples():
    assert proximity_solve(Progression(4, 6), 10, 3, 2, 60) == [10, 28, 46]
    assert proximity_solve(Progression(4, 6), 10, 3, 1, 60) == list(range(4, 59, 6))
    assert proximity_solve(Progression(1, 3), 2, 3, 1, 100) == []


@given(basic, st.integers(1, 50), st.sampled_from([2, 3, 5, 7]), st.integers(1, 3))
def test_proximity_output_is_in_set_and_congruent(S, n, p, k):
    out = proximity_solve(S, n, p, k, 500)
    assert set(out) <= set(S.enumerate(500))
    assert all((x - n) % p**k == 0 for x in out)
    assert out == [x for x in S.enumerate(500) if (x - n) % p**k == 0]


# -- covers -----------------------------------------------------------------

def test_star_cover():
    cl = classify_cover([Progression(1, 2), Progression(1, 3), Progression(1, 5)])
    assert cl.star_like and cl.connected and cl.nest
    assert cl.straw == ()


def test_nest_examples():
    pieces = [Progression(1, 3), Progression(2, 3), Progression(1, 2), Progression(1, 5)]
    assert classify_cover(pieces, straw=[0, 1], core=[2, 3]).nest is True
    pieces = [Progression(1, 3), Progression(2, 3), Progression(1, 2)]
    cl = classify_cover(pieces, straw=[0, 1], core=[2])
    assert cl.nest is False
    assert cl.nest_window_check is False


def test_tree_like_chain():
    cl = classify_cover([Progression(1, 6), Progression(1, 2), Progression(2, 3)])
    assert cl.tree_like and cl.connected and not cl.star_like


@settings(max_examples=60, deadline=None)
@given(st.lists(basic, min_size=2, max_size=4))
def test_star_like_implies_nest_with_empty_straw(pieces):
    cl = classify_cover(pieces)
    if cl.star_like:
        assert cl.nest and cl.straw == ()


small_basic = st.sampled_from([d for d in range(1, 43) if 210 % d == 0]).flatmap(
    lambda d: st.integers(1, d).filter(lambda a: gcd(a, d) == 1).map(lambda a: Progression(a, d))
)


# differences divide 210, so every residue a piece repeats shows up twice below 500
@settings(max_examples=60, deadline=None)
@given(st.lists(small_basic, min_size=2, max_size=4), st.data())
def test_prime_criterion_agrees_with_window_check(pieces, data):
    n = len(pieces)
    core = data.draw(st.lists(st.integers(0, n - 1), min_size=1, unique=True))
    straw = [i for i in range(n) if i not in core]
    cl = classify_cover(pieces, straw=straw, core=core, spot_check_window=500)
    prime_part = not any(f.startswith("prime") for f in cl.nest_failures)
    assert prime_part == cl.nest_window_check


# -- JSON -----------------------------------------------------------------------

@given(basic, st.lists(st.integers(1, 100), max_size=3))
def test_json_round_trip(P, ex):
    sets = [P, AlmostBasic(P, tuple(x for x in ex if P.contains(x))), Finite((3, 9)),
            Union((P, Finite((2,))))]
    for S in sets:
        doc = json.loads(json.dumps(set_to_json(S)))
        assert set_from_json(doc) == S


def test_json_accepts_plain_integers():
    assert set_from_json({"kind": "progression", "a": 1, "d": 2}) == Progression(1, 2)
    with pytest.raises(InputError):
        set_from_json({"kind": "blob"})
    with pytest.raises(InputError):
        set_from_json({"kind": "progression", "a": "x", "d": 2})
