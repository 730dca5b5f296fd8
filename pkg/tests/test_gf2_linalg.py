from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from motivic_ext.gf2_linalg import (
    ColumnReducer,
    CompositionNonzero,
    PackedMatrix,
    homology,
    image_basis,
    kernel_basis,
    naive_rank,
    nullity,
    rank,
    rank_by_columns,
    sparse_rank,
)


def matrices(prime=2, max_side=70):
    return st.tuples(st.integers(1, max_side), st.integers(1, max_side), st.integers(0, 2**32 - 1)).map(
        lambda a: np.random.default_rng(a[2]).integers(0, prime, size=(a[0], a[1]))
    )


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_rank_matches_naive_oracle(a):
    m = PackedMatrix.from_dense(a)
    assert rank(m) == naive_rank(a) == rank_by_columns(m)


@settings(max_examples=40, deadline=None)
@given(matrices(prime=3, max_side=30), st.sampled_from([3, 5, 7]))
def test_rank_mod_p_matches_naive_oracle(a, p):
    a = a % p
    assert rank(PackedMatrix.from_dense(a, prime=p)) == naive_rank(a, p)


@settings(max_examples=40, deadline=None)
@given(matrices(max_side=40))
def test_kernel_is_annihilated_and_rank_nullity(a):
    m = PackedMatrix.from_dense(a)
    ker = kernel_basis(m)
    assert ker.shape[0] == nullity(m) == a.shape[1] - rank(m)
    if ker.size:
        assert not ((a.astype(np.int64) @ ker.T.astype(np.int64)) % 2).any()


@settings(max_examples=40, deadline=None)
@given(matrices(max_side=40))
def test_image_basis_spans_the_column_space(a):
    m = PackedMatrix.from_dense(a)
    img = image_basis(m)
    assert img.shape[0] == rank(m)
    stacked = np.vstack([img, a.T]) if img.size else a.T
    assert naive_rank(stacked) == rank(m)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 2**40), min_size=0, max_size=60))
def test_sparse_column_rank_agrees_with_dense(cols):
    rows = max((c.bit_length() for c in cols), default=0) or 1
    dense = np.array([[c >> i & 1 for c in cols] for i in range(rows)]).reshape(rows, len(cols))
    expect = naive_rank(dense) if cols else 0
    assert sparse_rank(cols) == expect
    red = ColumnReducer()
    for c in cols:
        red.add(c)
    assert red.rank == expect


def test_homology_of_exact_and_nonexact_sequences():
    # Z/2 --1--> Z/2 --0--> Z/2 : homology 0 in the middle
    one = PackedMatrix.from_dense(np.array([[1]]))
    zero = PackedMatrix.from_dense(np.array([[0]]))
    assert homology(one, zero).dim == 0
    assert homology(zero, zero).dim == 1
    with pytest.raises(CompositionNonzero):
        homology(one, one)


def test_packed_product_matches_integer_product():
    rng = np.random.default_rng(7)
    a = rng.integers(0, 2, size=(33, 70))
    b = rng.integers(0, 2, size=(70, 65))
    got = (PackedMatrix.from_dense(a) @ PackedMatrix.from_dense(b)).to_dense()
    assert np.array_equal(got, (a @ b) % 2)
