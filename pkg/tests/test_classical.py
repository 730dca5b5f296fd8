from __future__ import annotations

import pytest

from motivic_ext.classical import (
    TABLE_RANGES,
    ClassicalCobar,
    MissingTopTable,
    compute_classical_ext,
    load_ext_top,
    sparse_rank_mod,
)

# Classical Ext over the mod-3 Steenrod algebra, s <= 5, stem <= 20, computed by
# the cobar complex and frozen. The weight is the motivic weight of the class.
EXT3_LOW = {
    (0, 0, 0): 1, (1, 1, 0): 1, (1, 4, 2): 1, (1, 12, 6): 1,
    (2, 2, 0): 1, (2, 9, 4): 1, (2, 12, 6): 1, (2, 13, 6): 1, (2, 20, 10): 1,
    (3, 3, 0): 1, (3, 13, 6): 1, (3, 14, 6): 1, (3, 16, 8): 1,
    (4, 4, 0): 1, (4, 19, 8): 1, (4, 21, 10): 1, (4, 24, 12): 1,
    (5, 5, 0): 1, (5, 24, 10): 1, (5, 25, 12): 1,
}


def test_shipped_table_matches_frozen_values_at_3():
    table = load_ext_top(3)
    low = {k: v for k, v in table.dims.items() if k[0] <= 5}
    assert low == EXT3_LOW
    assert all(table.dims[(s, s, 0)] == 1 for s in range(11))


@pytest.mark.parametrize("ell,first", [(3, (1, 4, 2)), (5, (1, 8, 4)), (7, (1, 12, 6))])
def test_first_positive_stem_class_is_h0(ell, first):
    table = load_ext_top(ell)
    positive = sorted(k for k in table.dims if k[1] > k[0])
    assert positive[0] == first


@pytest.mark.parametrize("ell", sorted(TABLE_RANGES))
def test_no_classes_above_the_adams_line(ell):
    table = load_ext_top(ell)
    for (s, t, w), v in table.dims.items():
        stem = t - s
        assert not (0 < stem < (2 * ell - 3) * s), (s, t, w)


def test_table_reproduces_from_the_cobar_complex():
    assert compute_classical_ext(5, 3, 16) == {k: v for k, v in load_ext_top(5).dims.items() if k[0] <= 3 and k[1] - k[0] <= 16}


def test_cobar_differential_squares_to_zero_at_3():
    cob = ClassicalCobar(3, 16)
    for s in range(0, 3):
        for t in range(s, 14):
            for w in range(0, t // 2 + 1):
                assert cob.dd_zero(s, t, w)


def test_missing_range_raises():
    table = load_ext_top(3)
    with pytest.raises(MissingTopTable):
        table.dim(11, 12, 0)
    with pytest.raises(MissingTopTable):
        load_ext_top(11)


def test_sparse_rank_mod_small_cases():
    assert sparse_rank_mod([{0: 1, 1: 2}, {0: 2, 1: 1}], 3) == 1
    assert sparse_rank_mod([{0: 1, 1: 2}, {0: 2, 1: 1}], 5) == 2
