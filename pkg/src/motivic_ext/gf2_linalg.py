"""Exact linear algebra over GF(2) and small prime fields GF(l).

Two storage schemes are provided.

* :class:`PackedMatrix` is a dense matrix.  Over GF(2) each row is packed
  into 64-bit words and row operations are XORs on numpy ``uint64`` arrays;
  over an odd prime rows are byte-packed residues and reduction mod l is
  delayed until a row update is finished.
* :class:`ColumnReducer` is the sparse workhorse for cobar complexes.  A
  column is a Python integer used as an arbitrary-length bitset (bit ``i``
  is row ``i``); adding columns is a single XOR and the pivot of a column
  is its highest set bit.  This is the classical persistence-style column
  reduction, and it is what makes cells with 10^5 or more basis vectors
  tractable.

Pivot choice is deterministic everywhere, so homology representatives are
reproducible across runs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

WORD = 64


class CompositionNonzero(ArithmeticError):
    """d_out composed with d_in is not zero: the differential is wrong."""


class DimensionMismatch(ValueError):
    pass


# ---------------------------------------------------------------------------
# dense packed matrices


def _nwords(cols: int) -> int:
    return (cols + WORD - 1) // WORD


def _pack_rows(dense: np.ndarray) -> np.ndarray:
    rows, cols = dense.shape
    nw = _nwords(cols)
    out = np.zeros((rows, nw), dtype=np.uint64)
    if rows == 0 or cols == 0:
        return out
    bits = (dense & 1).astype(np.uint64)
    pad = nw * WORD - cols
    if pad:
        bits = np.concatenate([bits, np.zeros((rows, pad), dtype=np.uint64)], axis=1)
    bits = bits.reshape(rows, nw, WORD)
    shifts = np.arange(WORD, dtype=np.uint64)
    return np.bitwise_or.reduce(bits << shifts, axis=2)


def _unpack_rows(data: np.ndarray, cols: int) -> np.ndarray:
    rows = data.shape[0]
    if rows == 0 or cols == 0:
        return np.zeros((rows, cols), dtype=np.uint8)
    shifts = np.arange(WORD, dtype=np.uint64)
    bits = (data[:, :, None] >> shifts) & np.uint64(1)
    return bits.reshape(rows, -1)[:, :cols].astype(np.uint8)


@dataclass(frozen=True)
class PackedMatrix:
    """Immutable matrix over GF(prime) of shape (rows, cols).

    A linear map V -> W is stored with one column per basis vector of V,
    so its shape is (dim W, dim V).
    """

    rows: int
    cols: int
    prime: int
    data: np.ndarray = field(repr=False, compare=False)

    def __post_init__(self):
        if self.prime == 2:
            if self.data.shape != (self.rows, _nwords(self.cols)) or self.data.dtype != np.uint64:
                raise DimensionMismatch("bad packed GF(2) storage")
            rem = self.cols % WORD
            if rem and self.rows and np.any(self.data[:, -1] >> np.uint64(rem)):
                raise ValueError("bits set beyond the last column")
        else:
            if self.data.shape != (self.rows, self.cols) or self.data.dtype != np.uint8:
                raise DimensionMismatch("bad residue storage")
            if self.data.size and int(self.data.max()) >= self.prime:
                raise ValueError("residue out of range")
        self.data.setflags(write=False)

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_dense(cls, array, prime: int = 2) -> PackedMatrix:
        a = np.asarray(array, dtype=np.int64)
        if a.ndim != 2:
            raise DimensionMismatch("expected a 2-d array")
        a = np.mod(a, prime)
        rows, cols = a.shape
        if prime == 2:
            return cls(rows, cols, 2, _pack_rows(a.astype(np.uint8)))
        return cls(rows, cols, prime, a.astype(np.uint8))

    @classmethod
    def zeros(cls, rows: int, cols: int, prime: int = 2) -> PackedMatrix:
        return cls.from_dense(np.zeros((rows, cols), dtype=np.int64), prime)

    @classmethod
    def identity(cls, n: int, prime: int = 2) -> PackedMatrix:
        return cls.from_dense(np.eye(n, dtype=np.int64), prime)

    @classmethod
    def from_columns(cls, columns: list[int], rows: int) -> PackedMatrix:
        """GF(2) matrix from integer bitset columns."""
        dense = np.zeros((rows, len(columns)), dtype=np.uint8)
        for j, c in enumerate(columns):
            while c:
                low = c & -c
                i = low.bit_length() - 1
                if i >= rows:
                    raise DimensionMismatch("column has a bit beyond the row count")
                dense[i, j] = 1
                c ^= low
        return cls.from_dense(dense, 2)

    # -- views --------------------------------------------------------------

    def to_dense(self) -> np.ndarray:
        if self.prime == 2:
            return _unpack_rows(self.data, self.cols)
        return self.data.copy()

    def columns_as_ints(self) -> list[int]:
        if self.prime != 2:
            raise ValueError("integer bitsets are a GF(2) representation")
        dense = self.to_dense()
        out = []
        for j in range(self.cols):
            nz = np.flatnonzero(dense[:, j])
            c = 0
            for i in nz:
                c |= 1 << int(i)
            out.append(c)
        return out

    def transpose(self) -> PackedMatrix:
        return PackedMatrix.from_dense(self.to_dense().T, self.prime)

    def __matmul__(self, other: PackedMatrix) -> PackedMatrix:
        if self.prime != other.prime:
            raise ValueError("mixed characteristics")
        if self.cols != other.rows:
            raise DimensionMismatch(f"cannot compose {self.shape} with {other.shape}")
        a = self.to_dense().astype(np.int64)
        b = other.to_dense().astype(np.int64)
        return PackedMatrix.from_dense((a @ b) % self.prime, self.prime)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def is_zero(self) -> bool:
        return not np.any(self.data)

    def permuted(self, row_perm=None, col_perm=None) -> PackedMatrix:
        d = self.to_dense()
        if row_perm is not None:
            d = d[np.asarray(row_perm)]
        if col_perm is not None:
            d = d[:, np.asarray(col_perm)]
        return PackedMatrix.from_dense(d, self.prime)


# ---------------------------------------------------------------------------
# dense elimination


def _echelon_gf2(data: np.ndarray, cols: int) -> tuple[np.ndarray, list[int]]:
    """Row echelon form of packed GF(2) rows: leftmost pivot, first row."""
    r = data.copy()
    rows = r.shape[0]
    pivots: list[int] = []
    prow = 0
    for col in range(cols):
        if prow == rows:
            break
        w, b = divmod(col, WORD)
        mask = np.uint64(1) << np.uint64(b)
        hits = np.flatnonzero(r[prow:, w] & mask)
        if hits.size == 0:
            continue
        piv = prow + int(hits[0])
        if piv != prow:
            r[[prow, piv]] = r[[piv, prow]]
        below = prow + 1 + np.flatnonzero(r[prow + 1 :, w] & mask)
        if below.size:
            r[below] ^= r[prow]
        pivots.append(col)
        prow += 1
    return r, pivots


def _echelon_modp(data: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    r = data.astype(np.int64)
    rows, cols = r.shape
    pivots: list[int] = []
    prow = 0
    for col in range(cols):
        if prow == rows:
            break
        hits = np.flatnonzero(r[prow:, col])
        if hits.size == 0:
            continue
        piv = prow + int(hits[0])
        if piv != prow:
            r[[prow, piv]] = r[[piv, prow]]
        inv = pow(int(r[prow, col]), p - 2, p)
        r[prow] = (r[prow] * inv) % p
        below = prow + 1 + np.flatnonzero(r[prow + 1 :, col])
        if below.size:
            # delayed reduction: one multiply-subtract per row, then a single mod
            r[below] = (r[below] - np.outer(r[below, col], r[prow])) % p
        pivots.append(col)
        prow += 1
    return r, pivots


def row_echelon(m: PackedMatrix) -> tuple[PackedMatrix, list[int]]:
    if m.prime == 2:
        r, piv = _echelon_gf2(m.data, m.cols)
        return PackedMatrix(m.rows, m.cols, 2, r), piv
    r, piv = _echelon_modp(m.data, m.prime)
    return PackedMatrix.from_dense(r, m.prime), piv


def rank(m: PackedMatrix) -> int:
    """Rank by row reduction."""
    if m.rows == 0 or m.cols == 0:
        return 0
    return len(row_echelon(m)[1])


def rank_by_columns(m: PackedMatrix) -> int:
    """Rank by column reduction; used to cross-check :func:`rank`."""
    if m.rows == 0 or m.cols == 0:
        return 0
    if m.prime == 2:
        red = ColumnReducer()
        for c in m.columns_as_ints():
            red.add(c)
        return red.rank
    return len(_echelon_modp(m.to_dense().T, m.prime)[1])


def kernel_basis(m: PackedMatrix) -> np.ndarray:
    """Basis of ker(m) as rows of a dense array of shape (k, cols)."""
    p = m.prime
    cols = m.cols
    if cols == 0:
        return np.zeros((0, 0), dtype=np.uint8)
    r, piv = row_echelon(m)
    dense = r.to_dense().astype(np.int64)[: len(piv)]
    # back-substitute to reduced echelon form
    for i in range(len(piv) - 1, -1, -1):
        c = piv[i]
        inv = pow(int(dense[i, c]), p - 2, p) if p != 2 else 1
        dense[i] = (dense[i] * inv) % p
        above = np.flatnonzero(dense[:i, c])
        if above.size:
            dense[above] = (dense[above] - np.outer(dense[above, c], dense[i])) % p
    free = [c for c in range(cols) if c not in set(piv)]
    out = np.zeros((len(free), cols), dtype=np.int64)
    for k, f in enumerate(free):
        out[k, f] = 1
        for i, c in enumerate(piv):
            out[k, c] = (-dense[i, f]) % p
    return out.astype(np.uint8)


def image_basis(m: PackedMatrix) -> np.ndarray:
    """Basis of the column space as rows of a dense array of shape (r, rows)."""
    t, piv = row_echelon(m.transpose())
    return t.to_dense()[: len(piv)]


def nullity(m: PackedMatrix) -> int:
    return m.cols - rank(m)


# ---------------------------------------------------------------------------
# homology


@dataclass(frozen=True)
class SubquotientBasis:
    """ker(d_out) / im(d_in) inside an ambient space of the given dimension."""

    ambient: int
    kernel: np.ndarray
    image: np.ndarray
    representatives: np.ndarray

    @property
    def dim(self) -> int:
        return int(self.representatives.shape[0])


def homology(d_in: PackedMatrix, d_out: PackedMatrix, check: bool = True) -> SubquotientBasis:
    """Homology at the middle term of V --d_in--> M --d_out--> W.

    Representatives complete an echelon basis of the image to one of the
    kernel: a kernel vector is kept exactly when its pivot is not already a
    pivot of the reduced span so far, with image vectors inserted first.
    """
    if d_in.rows != d_out.cols:
        raise DimensionMismatch("middle dimensions differ")
    if d_in.prime != d_out.prime:
        raise ValueError("mixed characteristics")
    p = d_in.prime
    n = d_in.rows
    if check and d_in.cols and d_out.rows and n:
        if not (d_out @ d_in).is_zero():
            raise CompositionNonzero("d_out . d_in != 0")
    ker = kernel_basis(d_out) if n else np.zeros((0, 0), dtype=np.uint8)
    if ker.size == 0:
        ker = np.zeros((0, n), dtype=np.uint8)
    img = image_basis(d_in) if d_in.cols and n else np.zeros((0, n), dtype=np.uint8)
    basis = _EchelonSpan(n, p)
    for v in img:
        basis.insert(v)
    reps = []
    for v in ker:
        if basis.insert(v):
            reps.append(v)
    rep_arr = np.array(reps, dtype=np.uint8).reshape(len(reps), n)
    return SubquotientBasis(n, ker, img, rep_arr)


class _EchelonSpan:
    """Incrementally built echelon basis of a subspace of GF(p)^n."""

    def __init__(self, n: int, p: int):
        self.n = n
        self.p = p
        self.rows: dict[int, np.ndarray] = {}

    def reduce(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=np.int64) % self.p
        for c in sorted(self.rows):
            if v[c]:
                v = (v - v[c] * self.rows[c]) % self.p
        return v

    def insert(self, v) -> bool:
        v = self.reduce(v)
        nz = np.flatnonzero(v)
        if nz.size == 0:
            return False
        c = int(nz[0])
        inv = pow(int(v[c]), self.p - 2, self.p) if self.p != 2 else 1
        v = (v * inv) % self.p
        for k in list(self.rows):
            if self.rows[k][c]:
                self.rows[k] = (self.rows[k] - self.rows[k][c] * v) % self.p
        self.rows[c] = v
        return True


# ---------------------------------------------------------------------------
# sparse GF(2) column reduction


def bits_to_indices(c: int) -> list[int]:
    out = []
    while c:
        low = c & -c
        out.append(low.bit_length() - 1)
        c ^= low
    return out


def indices_to_bits(indices) -> int:
    c = 0
    for i in indices:
        c ^= 1 << i
    return c


class ColumnReducer:
    """Persistence-style GF(2) column reduction with integer bitset columns.

    Columns are added one at a time and reduced against the stored ones;
    the pivot of a column is its highest set bit.  With ``track=True`` each
    column also carries the combination of input columns it equals, which
    gives kernel vectors for columns that reduce to zero.
    """

    def __init__(self, track: bool = False):
        self.track = track
        self.pivots: dict[int, int] = {}
        self.sources: dict[int, int] = {}
        self.pivot_owner: dict[int, int] = {}
        self.kernel: list[int] = []
        self.count = 0

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def add(self, column: int, index: int | None = None) -> int | None:
        """Reduce and store a column; returns its pivot row or None if zero."""
        j = self.count if index is None else index
        self.count += 1
        src = (1 << j) if self.track else 0
        pivots = self.pivots
        while column:
            p = column.bit_length() - 1
            q = pivots.get(p)
            if q is None:
                pivots[p] = column
                self.pivot_owner[p] = j
                if self.track:
                    self.sources[p] = src
                return p
            column ^= q
            if self.track:
                src ^= self.sources[p]
        if self.track:
            self.kernel.append(src)
        return None

    def reduce(self, column: int) -> int:
        """Reduce a vector against the stored pivots without storing it."""
        pivots = self.pivots
        while column:
            p = column.bit_length() - 1
            q = pivots.get(p)
            if q is None:
                return column
            column ^= q
        return 0

    def contains(self, column: int) -> bool:
        return self.reduce(column) == 0


def sparse_rank(columns) -> int:
    red = ColumnReducer()
    for c in columns:
        red.add(c)
    return red.rank


def compose_bitsets(outer: list[int], inner: list[int]) -> list[int]:
    """Columns of outer . inner, both given as integer bitset columns."""
    out = []
    for c in inner:
        acc = 0
        while c:
            low = c & -c
            acc ^= outer[low.bit_length() - 1]
            c ^= low
        out.append(acc)
    return out


# ---------------------------------------------------------------------------
# naive oracle


def naive_rank(array, prime: int = 2) -> int:
    """Rank by fraction-free elimination over the integers, reduced mod p.

    Deliberately independent of the packed code: plain Python lists, no
    packing, pivot chosen as the first nonzero residue in the column.
    """
    a = [[int(x) % prime for x in row] for row in np.asarray(array)]
    if not a:
        return 0
    rows, cols = len(a), len(a[0])
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if a[i][c] % prime), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        for i in range(rows):
            if i != r and a[i][c] % prime:
                f, g = a[i][c], a[r][c]
                a[i] = [(g * x - f * y) % prime for x, y in zip(a[i], a[r])]
        r += 1
        if r == rows:
            break
    return r
