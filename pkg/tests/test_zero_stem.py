from __future__ import annotations

from dataclasses import replace

import pytest

from motivic_ext.coefficients import builtin
from motivic_ext.zero_stem import (
    DepthExceedsData,
    WittDataMissing,
    einfty_mw0,
    mw_group,
    odd_prime_collapse,
    pfister_symbol_mismatches,
    pullback_violations,
    verify_zero_stem,
)

ACCEPT = [
    ("R", 0, 8),
    ("R", 1, 8),
    ("R", 2, 8),
    ("C", 0, 8),
    ("C", 1, 8),
    ("F_3", 0, 6),
    ("F_3", 1, 6),
    ("F_3", 2, 6),
    ("F_5", 0, 6),
    ("F_5", 1, 6),
    ("F_7", 0, 6),
    ("F_7", 1, 6),
]


@pytest.mark.parametrize("name,n,depth", ACCEPT)
def test_zero_stem_accepts(name, n, depth):
    verdict = verify_zero_stem(builtin(name), n, depth)
    assert verdict.accept, verdict.to_text()
    assert "verdict=Accept" in verdict.to_text()
    assert len(verdict.rows) == depth


# Filtration quotients by hand: GW(R) = Z + Z with I = 2Z on the signature side,
# GW(C) = Z with I = 0, W(F_q) = Z/4 for q = 3 mod 4 and Z/2[F_q^x/2] for q = 1 mod 4.
QUOTIENTS = [
    ("R", 0, [1, 2, 2, 2, 2, 2]),
    ("R", 1, [1, 1, 1, 1, 1, 1]),
    ("C", 0, [1, 1, 1, 1, 1, 1]),
    ("C", 1, [0, 0, 0, 0, 0, 0]),
    ("F_3", 0, [1, 2, 1, 1, 1, 1]),
    ("F_3", 1, [1, 0, 0, 0, 0, 0]),
    ("F_5", 0, [1, 2, 1, 1, 1, 1]),
    ("F_5", 1, [1, 1, 0, 0, 0, 0]),
    ("F_7", 1, [1, 0, 0, 0, 0, 0]),
]


@pytest.mark.parametrize("name,n,dims", QUOTIENTS)
def test_filtration_quotients(name, n, dims):
    assert mw_group(builtin(name), n, len(dims)).quotient_dims() == dims


def test_milnor_factors():
    assert mw_group(builtin("F_5"), 1, 4).milnor_factors == (4,)  # F_5^x = Z/4
    assert mw_group(builtin("F_7"), 1, 4).milnor_factors == (2,)  # 2-part of Z/6
    assert mw_group(builtin("R"), 1, 4).milnor_factors == (2,)  # sign


def test_einfty_line():
    cells = einfty_mw0(builtin("R"), 1, 4)
    assert [(c.s, c.t, c.w) for c in cells] == [(0, -1, -1), (1, 0, -1), (2, 1, -1), (3, 2, -1)]
    assert [c.dim for c in cells] == [1, 1, 1, 1]
    assert [c.milnor_part for c in einfty_mw0(builtin("F_5"), 1, 3)] == [0, 1, 0]


def test_negative_degree_over_r():
    verdict = verify_zero_stem(builtin("R"), -1, 6)
    assert verdict.accept
    assert mw_group(builtin("R"), -1, 6).quotient_dims() == [0, 1, 1, 1, 1, 1]


def test_pfister_forms_match_symbols():
    for name in ("R", "C", "F_3", "F_5", "F_7"):
        assert pfister_symbol_mismatches(builtin(name), 6) == []


def test_planted_pullback_mismatch_is_reported():
    prof = builtin("R")
    group = mw_group(prof, 1, 4)
    (form, symbol), *rest = group.pullback_generators
    flipped = tuple(1 - v % 2 for v in symbol)
    bad = replace(group, pullback_generators=[(form, flipped)] + rest)
    assert pullback_violations(prof, group) == []
    assert len(pullback_violations(prof, bad)) == 1


def test_depth_beyond_truncation():
    with pytest.raises(DepthExceedsData):
        mw_group(builtin("R"), 0, 20)
    with pytest.raises(DepthExceedsData):
        verify_zero_stem(builtin("R"), 2, 13)


@pytest.mark.parametrize("name", ["F_7@3", "Q"])
def test_missing_witt_data(name):
    with pytest.raises(WittDataMissing):
        verify_zero_stem(builtin(name), 0, 2)


@pytest.mark.parametrize("name", ["R", "C", "F_3", "F_5"])
def test_odd_prime_collapse(name):
    assert odd_prime_collapse(builtin(name), 3)
    assert odd_prime_collapse(builtin(name), 5)


def test_odd_prime_collapse_rejects_two():
    with pytest.raises(ValueError):
        odd_prime_collapse(builtin("R"), 2)
