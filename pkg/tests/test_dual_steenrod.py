from __future__ import annotations

from itertools import product

import pytest

from motivic_ext.dual_steenrod import (
    ONE,
    TAU0,
    OddDualSteenrod,
    all_factor_orders,
    coassociativity_defect,
    counit_defect,
    eta_right_tau,
    make_mono,
    mono_degree,
    mono_mul,
    monomials,
    normalize,
    reduced_coproduct,
    tau_degree,
    xi_degree,
)

XI1 = make_mono((), (1,))
TAU1 = make_mono((1,), ())
TAU0_XI1 = make_mono((0,), (1,))


def _brute_monomial_count(t: int, w: int) -> int:
    # tau_0..tau_2 exterior, xi_1..xi_3 polynomial, independent of the library enumerator
    taus = [(1, 0), (3, 1), (7, 3)]
    xis = [(2, 1), (6, 3), (14, 7)]
    n = 0
    for eps in product((0, 1), repeat=3):
        for e in product(range(8), range(3), range(2)):
            tt = sum(a * d[0] for a, d in zip(eps, taus)) + sum(a * d[0] for a, d in zip(e, xis))
            ww = sum(a * d[1] for a, d in zip(eps, taus)) + sum(a * d[1] for a, d in zip(e, xis))
            n += (tt, ww) == (t, w)
    return n


@pytest.mark.parametrize("t", range(0, 13))
def test_monomial_enumeration_matches_brute_force(t):
    for w in range(0, t + 1):
        assert len(monomials(t, w)) == _brute_monomial_count(t, w)


def test_generator_degrees():
    assert [tau_degree(i) for i in range(3)] == [(1, 0), (3, 1), (7, 3)]
    assert [xi_degree(i) for i in range(1, 4)] == [(2, 1), (6, 3), (14, 7)]
    assert tau_degree(1, 3) == (5, 2) and xi_degree(1, 3) == (4, 2)


def test_tau0_squared_relation():
    assert mono_mul(TAU0, TAU0) == frozenset({(0, 1, XI1), (1, 0, TAU0_XI1), (1, 0, TAU1)})


def test_right_unit_of_tau():
    assert eta_right_tau(1) == frozenset({(0, 1, ONE), (1, 0, TAU0)})


@pytest.mark.parametrize("t", range(1, 11))
def test_coproduct_is_coassociative_and_counital(t):
    for w in range(0, t + 1):
        for m in monomials(t, w):
            assert not coassociativity_defect(m)
            left, right = counit_defect(m)
            assert not left and not right


@pytest.mark.parametrize("t", range(1, 12))
def test_coproduct_preserves_bidegree(t):
    for w in range(0, t + 1):
        for m in monomials(t, w):
            for b, a, x, y in reduced_coproduct(m):
                dx, dy = mono_degree(x), mono_degree(y)
                assert (dx[0] + dy[0] - b, dx[1] + dy[1] - b - a) == (t, w)


def test_normal_form_is_order_independent():
    factors = [("tau", 0), ("tau", 0), ("tau", 1), ("xi", 1), ("rho", 0)]
    results = all_factor_orders(factors)
    assert len(set(results)) == 1
    assert results[0] == normalize(factors)


def test_odd_coproduct_counit_and_degrees():
    alg = OddDualSteenrod(3)
    for t in range(1, 17):
        for m in alg.monomials(t):
            cop = alg.coproduct(m)
            assert cop.get((ONE, m)) == 1 and cop.get((m, ONE)) == 1
            for (x, y), c in cop.items():
                dx, dy = alg.degree(x), alg.degree(y)
                assert (dx[0] + dy[0], dx[1] + dy[1]) == alg.degree(m)


def test_odd_tau_squares_vanish():
    alg = OddDualSteenrod(5)
    t0 = make_mono((0,), ())
    assert alg.mono_mul(t0, t0)[0] == 0
    sign, prod = alg.mono_mul(make_mono((1,), ()), t0)
    assert sign == -1 and prod == make_mono((0, 1), ())
