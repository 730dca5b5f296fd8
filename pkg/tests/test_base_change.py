from __future__ import annotations

from dataclasses import replace

import numpy as np
import pytest
from conftest import SMALL, SMALL_BUDGET

from motivic_ext.base_change import (
    Summand,
    RhoModule,
    TruncationUnsound,
    assemble_extension,
    barcode_from_ranks,
    base_change_chart,
    c_route_defect,
    decompose,
    free_presentation,
    injectivity_degree,
    tensor_and_tor,
    tensor_and_tor_by_resolution,
    vanishing_region,
    vanishing_violations,
)
from motivic_ext.cobar import Tridegree, ext_chart_direct
from motivic_ext.coefficients import VcdInfinite, builtin

FIELDS = ["C", "F_3", "F_5", "rho-nil-2"]


def _slices(engine):
    for s in range(SMALL.s_max + 1):
        for m in range(0, 6):
            try:
                yield decompose(engine, s, m)
            except TruncationUnsound:
                continue


@pytest.mark.parametrize("name", FIELDS)
def test_base_change_matches_direct_computation(real_small, name):
    eng, _ = real_small
    k = builtin(name)
    bc = base_change_chart(eng, k)
    direct = ext_chart_direct(k, SMALL, SMALL_BUDGET)
    common = [d for d in bc.known() if d in direct.dims]
    assert len(common) > 700
    assert [d for d in common if bc.dims[d] != direct.dims[d]] == []


def test_base_change_along_identity_is_the_real_chart(real_small):
    eng, chart = real_small
    bc = base_change_chart(eng, builtin("R"))
    known = bc.known()
    assert all(bc.tor[d] == 0 for d in known)
    common = [d for d in known if d in chart.dims]
    assert len(common) > 700
    assert all(known[d] == chart.dims[d] for d in common)


@pytest.mark.parametrize("name", ["F_3", "F_5", "rho-nil-2", "Q"])
def test_tensor_and_tor_agree_with_free_resolution(real_small, name):
    eng, _ = real_small
    k = builtin(name)
    n = 0
    for mod in _slices(eng):
        a = tensor_and_tor(mod, k, mod.floor, SMALL.t_max)
        b = tensor_and_tor_by_resolution(mod, k, mod.floor, SMALL.t_max)
        assert a == b, (mod.s, mod.m)
        n += 1
    assert n > 10


@pytest.mark.parametrize("name", ["C", "F_3", "F_5"])
def test_cokernel_route_is_exact(real_small, name):
    eng, _ = real_small
    k = builtin(name)
    for mod in _slices(eng):
        defect = c_route_defect(mod, k, mod.floor, SMALL.t_max)
        assert not any(defect.values()), (mod.s, mod.m, defect)


def test_tensor_of_cyclic_modules_by_hand():
    k = builtin("F_3")  # k_0 = k_1 = Z/2, rho : k_0 -> k_1 an iso
    free = RhoModule(0, 0, (Summand(5, None),), floor=0)
    ten, tor = tensor_and_tor(free, k, 0, 5)
    assert ten == {0: 0, 1: 0, 2: 0, 3: 0, 4: 1, 5: 1}
    assert not any(tor.values())
    # Z/2[rho]/rho at degree 5: the tensor keeps k_0; Tor_1 is ker(rho) on k_n in degree 4 - n
    torsion = RhoModule(0, 0, (Summand(5, 1),), floor=0)
    ten, tor = tensor_and_tor(torsion, k, 0, 5)
    assert ten[5] == 1 and sum(ten.values()) == 1
    assert tor == {0: 0, 1: 0, 2: 0, 3: 1, 4: 0, 5: 0}
    # over C rho vanishes on k_0 already
    ten, tor = tensor_and_tor(torsion, builtin("C"), 0, 5)
    assert tor == {0: 0, 1: 0, 2: 0, 3: 0, 4: 1, 5: 0}


def test_free_presentations():
    gens, rels, _ = free_presentation(builtin("R"))
    assert (gens, rels) == ([0], [])
    gens, rels, _ = free_presentation(builtin("C"))
    assert (gens, rels) == ([0], [1])
    gens, rels, _ = free_presentation(builtin("F_3"))
    assert (gens, rels) == ([0], [2])
    # -1 is a square mod 5, so rho = 0 and both k_0 and k_1 need generators
    gens, rels, _ = free_presentation(builtin("F_5"))
    assert (gens, rels) == ([0, 1], [1, 2])
    gens, rels, _ = free_presentation(builtin("Q"))
    assert (gens, rels) == ([0, 1, 1, 1, 2], [2, 2, 3, 3])


def test_barcode_from_ranks_recovers_intervals():
    # Z/2[rho]/rho^2 at 3 plus a free bar through the bottom degree 0
    dims = {0: 1, 1: 1, 2: 2, 3: 2}
    rho = {
        1: np.array([[1]], dtype=np.uint8),
        2: np.array([[1, 0]], dtype=np.uint8),
        3: np.array([[1, 0], [0, 1]], dtype=np.uint8),
    }
    assert barcode_from_ranks(dims, rho) == {(3, 0): 1, (3, 2): 1}


def test_assemble_extension_propagates_unknowns():
    assert assemble_extension(2, 1) == 3
    assert assemble_extension(None, 0) is None
    assert assemble_extension(0, None) is None


def test_injectivity_degrees():
    assert injectivity_degree(builtin("R")) == 0
    assert injectivity_degree(builtin("C")) == 1
    assert injectivity_degree(builtin("F_3")) == 2
    assert injectivity_degree(builtin("F_5")) == 2
    assert injectivity_degree(builtin("Q")) == 3
    with pytest.raises(VcdInfinite):
        injectivity_degree(replace(builtin("Q"), vcd=None))


@pytest.mark.parametrize("name", FIELDS)
def test_vanishing_region_holds(real_small, name):
    eng, _ = real_small
    k = builtin(name)
    bc = base_change_chart(eng, k)
    region = [d for d in bc.known() if vanishing_region(k, d)]
    assert region
    assert vanishing_violations(k, bc.known()) == []


def test_vanishing_region_on_real_chart(real_small):
    _, chart = real_small
    k = builtin("R")
    assert [d for d in chart.dims if vanishing_region(k, d)]
    assert vanishing_violations(k, chart.dims) == []


def test_literal_region_contains_nonzero_classes(complex_small):
    k = builtin("C")
    bad = vanishing_violations(k, complex_small.dims, literal=True)
    assert Tridegree(2, 4, 2) in bad  # h1^2
    assert vanishing_violations(k, complex_small.dims) == []


def test_vanishing_region_needs_finite_vcd():
    with pytest.raises(VcdInfinite):
        vanishing_region(replace(builtin("Q"), vcd=None), Tridegree(5, 6, 0))
