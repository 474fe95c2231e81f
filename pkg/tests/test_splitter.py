import random

import pytest
from hypothesis import given, settings, strategies as st

from kirchlip.errors import InputError, ResourceError
from kirchlip.exactmath import IntegerPolynomial, resultant, split
from kirchlip.kirch import Progression, first_elements
from kirchlip.lipcalc import ProductSum, WindowFunction, find_circuit
from kirchlip.splitter import (
    SplitPlan,
    colon_data,
    lattice_witness,
    membership_witness,
    regroup,
    split_schedule,
    split_stream,
    witness_trace,
)

U, W, V = Progression(1, 2), Progression(1, 3), Progression(1, 6)


@pytest.fixture(scope="module")
def plan():
    return SplitPlan(U, W, V)


# -- one-step witnesses ---------------------------------------------------------

def test_membership_witness_small_case():
    t = membership_witness([1, 3], [1, 4], V, 1)
    assert (t.sigma, t.mu, t.tau) == (IntegerPolynomial(), IntegerPolynomial([1]), IntegerPolynomial([-1]))
    assert split([1]) == split([1, 3]) - split([1, 4])


def test_witness_when_v_m_is_already_a_multiple():
    # [V_2] = (x-1)(x-7) is a multiple of [U_1] = x - 1
    t = lattice_witness([1], [1], V, 2, 3)
    assert t.holds()
    assert (t.sigma, t.tau) == (IntegerPolynomial(), IntegerPolynomial())
    assert t.mu == IntegerPolynomial([-7, 1])


def test_resultant_beyond_one():
    u, w = first_elements(U, 4), first_elements(W, 4)
    data = colon_data(u, w, V)
    assert abs(data.resultant) > 1
    tr = witness_trace(data, V, data.required_m)
    assert tr.triple.holds()
    for p, value in tr.prime_values:
        assert value % p != 0


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_proof_witnesses_hold_and_keep_primes_coprime(n):
    data = colon_data(first_elements(U, n), first_elements(W, n), V)
    a = [u for u in data.u_pts if not V.contains(u)]
    b = [w for w in data.w_pts if not V.contains(w)]
    assert data.resultant == resultant(split(a), split(b))
    for m in range(data.required_m, data.required_m + 3):
        tr = witness_trace(data, V, m)
        assert tr.triple.holds()
        assert all(value % p for p, value in tr.prime_values)


def test_witness_rejects_small_m():
    data = colon_data(first_elements(U, 4), first_elements(W, 4), V)
    with pytest.raises(InputError):
        witness_trace(data, V, data.required_m - 1)


def test_disjoint_sets_rejected():
    with pytest.raises(InputError):
        SplitPlan(Progression(1, 6), Progression(5, 6), V)


# -- schedules ----------------------------------------------------------------

def test_schedule_examples(plan):
    assert split_schedule(U, W, V, 1) == [1]
    assert split_schedule(U, W, V, 0) == []
    sched = plan.schedule(9)
    assert sched == sorted(set(sched)) and sched[0] == 1


def test_schedule_chain_identities(plan):
    sched = plan.schedule(9)
    for n in range(1, 9):
        sigma, mu, tau = plan.chain(n)
        v = first_elements(V, sched[n])
        u, w = plan.points(n)
        lhs = split(v[: sched[n - 1]])
        assert sigma * split(v) + mu * split(u) + tau * split(w) == lhs


def test_proof_schedule_chains_compose():
    p = SplitPlan(U, W, V, method="proof")
    sched = p.schedule(4)
    assert sched == sorted(set(sched))
    for n in range(1, 4):
        sigma, mu, tau = p.chain(n)
        v = first_elements(V, sched[n])
        u, w = p.points(n)
        assert sigma * split(v) + mu * split(u) + tau * split(w) == split(v[: sched[n - 1]])


def test_stage_cap():
    with pytest.raises(ResourceError):
        SplitPlan(U, W, V, stage_cap=2).schedule(4)


def test_regroup_preserves_the_sum():
    coeffs = [3, -1, 4, 1, -5, 9, 2]
    v = first_elements(V, 10)
    sched = [1, 3, 6]
    groups = regroup(coeffs, v, sched)
    total = sum((g * split(v[:m]) for g, m in zip(groups, [0] + sched)), IntegerPolynomial())
    expected = sum((split(v[:k]) * a for k, a in enumerate(coeffs)), IntegerPolynomial())
    assert total == expected


# -- streams --------------------------------------------------------------------

def test_zero_function_splits_to_zero(plan):
    res = split_stream([0, 0, 0], U, W, V, 3, plan=plan)
    assert not res.g_poly and not res.h_poly


def test_linear_function(plan):
    res = split_stream(ProductSum(first_elements(V, 2), (0, 1)), U, W, V, 3, plan=plan)
    assert res.certificate["f_equals_g_minus_h"]
    for x in V.enumerate(res.window):
        assert res.g(x) - res.h(x) == x - 1
    assert find_circuit(res.g) is None and find_circuit(res.h) is None


def test_window_function_input(plan):
    f = WindowFunction.from_callable(V, 40, lambda x: x * x - 3)
    res = split_stream(f, U, W, V, 2, plan=plan)
    assert all(res.g(x) - res.h(x) == x * x - 3 for x in V.enumerate(res.window))


def test_window_cannot_exceed_certified(plan):
    with pytest.raises(InputError):
        split_stream([1, 2], U, W, V, 1, plan=plan, window=10**4)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(-9, 9), min_size=1, max_size=12), st.integers(1, 6))
def test_split_predicate(coeffs, stages):
    res = split_stream(coeffs, U, W, V, stages, plan=_PLAN)
    v = first_elements(V, len(coeffs))
    f = sum((split(v[:k]) * a for k, a in enumerate(coeffs)), IntegerPolynomial())
    assert all(f(x) == res.g(x) - res.h(x) for x in V.enumerate(res.window))
    assert find_circuit(res.g) is None and find_circuit(res.h) is None


_PLAN = SplitPlan(U, W, V)


def test_prefix_stability_across_stage_counts(plan):
    rng = random.Random(3)
    for _ in range(10):
        coeffs = [rng.randint(-9, 9) for _ in range(rng.randint(1, 12))]
        runs = [split_stream(coeffs, U, W, V, K, plan=plan) for K in range(1, 9)]
        for K, small in enumerate(runs, start=1):
            for big in runs[K:]:
                assert [big.g_poly(x) for x in first_elements(U, K)] == [small.g_poly(x) for x in first_elements(U, K)]
                assert [big.h_poly(x) for x in first_elements(W, K)] == [small.h_poly(x) for x in first_elements(W, K)]
