from __future__ import annotations

from itertools import product

import numpy as np
import pytest

from motivic_ext.coefficients import (
    DegreeOutOfRange,
    FieldProfile,
    ProfileInvalid,
    VcdInfinite,
    builtin,
    cokernel_C,
    ell_adic_valuation,
    h_basis,
    load_profile,
    milnor_k_mod2_finite_field,
    profile_finite_field_odd,
    profile_rho_nilpotent,
    rho_mult,
    serialize_profile,
    validate,
    witt_finite_field,
)

BUILTINS = ["C", "R", "F_3", "F_5", "F_7", "F_13", "rho-nil-2", "rho-nil-3", "Q", "F_7@3", "F_2@5", "F_3@7"]


@pytest.mark.parametrize("name", BUILTINS)
def test_text_format_round_trip(name):
    p = builtin(name)
    text = serialize_profile(p)
    q = load_profile(text)
    assert q == p
    assert serialize_profile(q) == text


@pytest.mark.parametrize("q", [3, 5, 7, 11, 13, 17, 19])
def test_finite_field_rho_matches_minus_one_nonsquare(q):
    p = builtin(f"F_{q}")
    squares = {x * x % q for x in range(1, q)}
    assert p.k_dim(1) == 1 and p.k_dim(2) == 0
    assert bool(p.rho_matrix(0)[0, 0]) == ((q - 1) not in squares)
    assert milnor_k_mod2_finite_field(q)["k2_dim"] == 0


def test_real_and_complex_lines():
    r, c = builtin("R"), builtin("C")
    assert [r.k_dim(n) for n in range(30)] == [1] * 30
    assert [c.k_dim(n) for n in range(5)] == [1, 0, 0, 0, 0]
    m, inj, surj = rho_mult(r, 4)
    assert inj and surj and m.shape == (1, 1)
    assert r.top_degree() is None and c.top_degree() == 0


def test_rho_nilpotent_profile():
    p = profile_rho_nilpotent(3)
    assert [p.k_dim(n) for n in range(5)] == [1, 1, 1, 0, 0]
    assert not p.rho_power(0, 3).any() and p.rho_power(0, 2).any()


def test_h_basis_real_dimensions():
    r = builtin("R")
    for t in range(-6, 3):
        for w in range(-8, 3):
            expect = 1 if (t <= 0 and w <= t) else 0
            assert len(h_basis(r, t, w)) == expect


@pytest.mark.parametrize("q,ell", [(7, 3), (2, 3), (4, 3), (2, 5), (3, 7), (19, 3)])
def test_odd_profile_against_brute_force(q, ell):
    p = profile_finite_field_odd(q, ell, cap=30)
    for w in range(31):
        live = (q**w - 1) % ell == 0
        assert p.h_dim(0, w) == int(live)
        assert p.h_dim(1, w) == int(live and w >= 1)
        beta = p.beta_matrix(w)
        nonzero = bool(beta.size and beta.any())
        assert nonzero == (live and w >= 1 and (q**w - 1) % ell**2 != 0)
    with pytest.raises(DegreeOutOfRange):
        p.h_dim(0, 31)


def test_ell_adic_valuation():
    assert ell_adic_valuation(7**3 - 1, 3) == 2
    assert ell_adic_valuation(2**4 - 1, 5) == 1


def test_cokernel_resolution_over_the_rationals():
    p = builtin("Q")
    mod = cokernel_C(p)
    # C = k_0 + k_1 (rho, [2], [3], [5]); generators 1, [2], [3], [5]; the four
    # rho-multiples land in the image of k_2, giving four relations in degree 2
    assert mod.vcd == 2
    assert mod.dims == (1, 4, 0, 0, 0)
    assert mod.generators == (0, 1, 1, 1)
    assert mod.relations == (2, 2, 2, 2)


@pytest.mark.parametrize("q", [3, 5])
def test_cokernel_resolution_over_finite_fields(q):
    mod = cokernel_C(builtin(f"F_{q}"))
    assert (mod.dims, mod.generators, mod.relations) == ((1, 0, 0, 0), (0,), (1,))


def test_cokernel_needs_finite_vcd():
    bad = FieldProfile("x", 2, "0", None, None, 2, (("1",), ("rho",), ("rho^2",)), (np.ones((1, 1), dtype=np.uint8),) * 2)
    with pytest.raises(VcdInfinite):
        cokernel_C(bad)


def test_validation_rejects_non_isomorphic_rho_above_vcd():
    names = (("1",), ("rho",), ("rho^2",), ())
    rho = (np.ones((1, 1), dtype=np.uint8), np.ones((1, 1), dtype=np.uint8), np.zeros((0, 1), dtype=np.uint8))
    with pytest.raises(ProfileInvalid):
        validate(FieldProfile("bad", 2, "0", 0, None, 3, names, rho))


# ---------------------------------------------------------------------------
# brute-force Witt ring of F_q from diagonal forms


def _isotropic(form, q):
    n = len(form)
    for v in product(range(q), repeat=n):
        if any(v) and sum(a * x * x for a, x in zip(form, v)) % q == 0:
            return True
    return False


def _hyperbolic(form, q):
    """Even-dimensional form with a totally isotropic subspace of half dimension (n <= 4)."""
    n = len(form)
    if n % 2:
        return False
    if n == 0:
        return True
    if n == 2:
        return _isotropic(form, q)

    def b(u, v):
        return sum(a * x * y for a, x, y in zip(form, u, v)) % q

    iso = [v for v in product(range(q), repeat=n) if any(v) and b(v, v) == 0]
    for i, u in enumerate(iso):
        for v in iso[i + 1 :]:
            if b(u, v) == 0 and any((v[k] * u[j] - v[j] * u[k]) % q for j in range(n) for k in range(n)):
                return True
    return False


@pytest.mark.parametrize("q", [3, 5, 7])
def test_witt_group_of_finite_field_by_brute_force(q):
    w = witt_finite_field(q)
    squares = {x * x % q for x in range(1, q)}
    u = next(a for a in range(2, q) if a not in squares)
    # order of <1> in W: smallest k with k<1> hyperbolic
    order_one = 2 if _hyperbolic((1, 1), q) else (4 if _hyperbolic((1, 1, 1, 1), q) else None)
    assert order_one is not None
    if q % 4 == 3:
        assert order_one == 4 and w.orders == (4,)
    else:
        assert order_one == 2 and w.orders == (2, 2)
        assert _hyperbolic((u, u), q)
    # |W| = 4: anisotropic forms are 0, <1>, <u> and one anisotropic plane
    planes = [(1, b) for b in (1, u) if not _isotropic((1, b), q)]
    assert 1 + 2 + len(planes) == 4 == int(np.prod(w.moduli))
    # I/I^2 = k_1 and I^2/I^3 = k_2 = 0
    assert w.quotient_dim(1) == 1 and w.quotient_dim(2) == 0
