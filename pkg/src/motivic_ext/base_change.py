"""Ext over a general field from Ext over R.

Ext over F sits in an extension

    0 -> Ext_R^s (x) k_* -> Ext_F^s -> Tor_1(Ext_R^{s+1}, k_*) -> 0

of graded Z/2[rho]-modules (tensor and Tor over Z/2[rho], all in the same
(t, w)).  Ext over R in a fixed slice (s, m) is a graded Z/2[rho]-module
graded by t alone, hence a direct sum of cyclic pieces Z/2[rho] x and
Z/2[rho]/rho^k x, and both functors are computed summand by summand.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import numpy as np

from .cobar import ExtChart, RealCobar, Tridegree, Window
from .coefficients import FieldProfile, VcdInfinite, cokernel_C
from .gf2_linalg import PackedMatrix, rank


class TruncationUnsound(RuntimeError):
    """A rho-tower leaves the computed range, so the requested value is not determined."""


UNKNOWN = None


@dataclass(frozen=True)
class Summand:
    """Z/2[rho] x (k None) or Z/2[rho]/rho^k x, with x in generator degree t."""

    t: int
    k: int | None
    open: bool = False


@dataclass(frozen=True)
class RhoModule:
    """Ext over R in one slice (s, m) as a sum of cyclic Z/2[rho]-modules.

    Cells below ``floor`` are not covered; ``top`` bounds the generator
    degrees that were visible when the decomposition came from a finite
    range of cells (None when every generator is known).
    """

    s: int
    m: int
    summands: tuple[Summand, ...]
    floor: int
    top: int | None = None

    def dim(self, t: int) -> int:
        return sum(1 for x in self.summands if _alive(x, t))

    def multiset(self) -> list[tuple[int, int | None]]:
        return sorted(((x.t, x.k) for x in self.summands), key=lambda u: (u[0], -1 if u[1] is None else u[1]))


def _alive(x: Summand, t: int) -> bool:
    return t <= x.t and (x.k is None or t > x.t - x.k)


# ---------------------------------------------------------------------------
# decomposition


def decompose(source: RealCobar | ExtChart, s: int, m: int) -> RhoModule:
    """The cyclic decomposition of Ext_R^s in Milnor-Witt degree m.

    From a :class:`RealCobar` engine the summands are the persistence bars
    of the slice.  From an :class:`ExtChart` they are recovered from the
    cell dimensions and the rho-product table by the rank formula for
    interval multiplicities; towers reaching the top of the window then
    have an undetermined generator degree and raise TruncationUnsound.
    """
    if isinstance(source, RealCobar):
        sl = source.slice(s, m)
        if sl is None:
            raise TruncationUnsound(f"slice ({s}, {m}) was not computed")
        return RhoModule(s, m, tuple(Summand(b.t, b.k, b.open) for b in sl.bars), sl.floor)
    return _decompose_chart(source, s, m)


def _chart_rho_data(chart: ExtChart, s: int, m: int):
    win = chart.window
    ts = [t for t in range(win.t_min, win.t_max + 1) if win.w_min <= t - s - m <= win.w_max]
    if not ts:
        raise TruncationUnsound("slice does not meet the window")
    dims = {}
    for t in ts:
        d = Tridegree(s, t, t - s - m)
        if d not in chart.dims:
            raise TruncationUnsound(f"cell {d} unknown")
        dims[t] = chart.dims[d]
    rho = {}
    table = chart.products.get("rho", {})
    for t in ts:
        if t - 1 not in dims:
            continue
        d = Tridegree(s, t, t - s - m)
        mat = np.zeros((dims[t - 1], dims[t]), dtype=np.uint8)
        for i in range(dims[t]):
            if (d, i) not in table and dims[t - 1] and dims[t]:
                raise TruncationUnsound(f"rho action unknown at {d}")
            for j in table.get((d, i), ()):
                mat[j, i] ^= 1
        rho[t] = mat
    return ts, dims, rho


def _decompose_chart(chart: ExtChart, s: int, m: int) -> RhoModule:
    ts, dims, rho = _chart_rho_data(chart, s, m)
    bars = barcode_from_ranks(dims, rho)
    lo, hi = min(ts), max(ts)
    out = []
    for (b_hi, b_lo), mult in bars.items():
        if b_hi == hi and mult:
            raise TruncationUnsound(f"a rho-tower of slice ({s}, {m}) is born at the top of the window")
        k = None if b_lo == lo else b_hi - b_lo + 1
        out.extend([Summand(b_hi, k, k is None)] * mult)
    return RhoModule(s, m, tuple(sorted(out, key=lambda x: (-x.t, x.k or 0))), lo, hi)


def _rank(m: np.ndarray) -> int:
    if m.size == 0:
        return 0
    return rank(PackedMatrix.from_dense(m % 2))


def barcode_from_ranks(dims: dict[int, int], rho: dict[int, np.ndarray]) -> dict[tuple[int, int], int]:
    """Interval multiplicities of a module over Z/2[rho] on a contiguous range of degrees.

    ``rho[t]`` maps degree t to degree t - 1.  An interval (hi, lo) is a
    summand alive exactly in degrees lo..hi; its multiplicity is
    r(hi, lo) - r(hi+1, lo) - r(hi, lo-1) + r(hi+1, lo-1), with r(a, b) the
    rank of rho^(a-b) from degree a to degree b and r = 0 off the range.
    """
    ts = sorted(dims)
    lo_all, hi_all = ts[0], ts[-1]

    def power(a: int, b: int) -> np.ndarray:
        m = np.eye(dims[a], dtype=np.int64)
        for t in range(a, b, -1):
            m = (rho[t].astype(np.int64) @ m) % 2
        return m

    cache: dict[tuple[int, int], int] = {}

    def r(a: int, b: int) -> int:
        if a < lo_all or a > hi_all or b < lo_all or b > hi_all or b > a:
            return 0
        if (a, b) not in cache:
            cache[(a, b)] = dims[a] if a == b else _rank(power(a, b))
        return cache[(a, b)]

    out = {}
    for hi in ts:
        for lo in ts:
            if lo > hi:
                continue
            mult = r(hi, lo) - r(hi + 1, lo) - r(hi, lo - 1) + r(hi + 1, lo - 1)
            if mult:
                out[(hi, lo)] = mult
    return out


def module_matrices(mod: RhoModule, t_lo: int, t_hi: int) -> tuple[dict[int, int], dict[int, np.ndarray]]:
    """Explicit degree-wise bases and rho-matrices of a decomposed module."""
    basis = {t: [i for i, x in enumerate(mod.summands) if _alive(x, t)] for t in range(t_lo, t_hi + 1)}
    dims = {t: len(b) for t, b in basis.items()}
    rho = {}
    for t in range(t_lo + 1, t_hi + 1):
        pos = {i: j for j, i in enumerate(basis[t - 1])}
        mat = np.zeros((dims[t - 1], dims[t]), dtype=np.uint8)
        for c, i in enumerate(basis[t]):
            if i in pos:
                mat[pos[i], c] = 1
        rho[t] = mat
    return dims, rho


# ---------------------------------------------------------------------------
# tensor and Tor


def _ker_dim_rho_power(k: FieldProfile, n: int, j: int) -> int:
    """dim ker(rho^j : k_n -> k_{n+j})."""
    dn = k.k_dim(n)
    if dn == 0:
        return 0
    return dn - _rank(k.rho_power(n, j))


def _coker_dim_rho_power(k: FieldProfile, n: int, j: int) -> int:
    """dim k_n / rho^j k_{n-j}."""
    dn = k.k_dim(n)
    if n - j < 0 or dn == 0:
        return dn
    return dn - _rank(k.rho_power(n - j, j))


def tensor_and_tor(mod: RhoModule, k: FieldProfile, t_lo: int | None = None, t_hi: int | None = None):
    """Dimensions of mod (x) k_* and Tor_1(mod, k_*) per generator degree t.

    A free summand at t_x gives k_n in degree t_x - n and no Tor.  A
    summand Z/2[rho]/rho^k at t_x gives k_n / rho^k k_{n-k} in degree
    t_x - n and ker(rho^k : k_n -> k_{n+k}) in degree t_x - k - n.
    Returned tables are keyed by t (the Milnor-Witt degree m is that of
    the slice).
    """
    if k.ell != 2:
        raise ValueError("base change runs at l = 2")
    t_lo = mod.floor if t_lo is None else t_lo
    if t_hi is None:
        t_hi = max((x.t for x in mod.summands), default=t_lo)
    ten = {t: 0 for t in range(t_lo, t_hi + 1)}
    tor = {t: 0 for t in range(t_lo, t_hi + 1)}
    for x in mod.summands:
        for t in range(t_lo, t_hi + 1):
            n = x.t - t
            if n >= 0:
                ten[t] += k.k_dim(n) if x.k is None else _coker_dim_rho_power(k, n, x.k)
            if x.k is not None:
                n2 = x.t - x.k - t
                if n2 >= 0:
                    tor[t] += _ker_dim_rho_power(k, n2, x.k)
    return ten, tor


def tensor_and_tor_by_resolution(mod: RhoModule, k: FieldProfile, t_lo: int, t_hi: int):
    """Independent route: resolve k_* by free Z/2[rho]-modules and tensor with mod.

    With 0 -> F_1 -> F_0 -> k_* -> 0 and generators of F_i in degrees n,
    the tensor product is the cokernel and Tor_1 the kernel of
    mod (x) F_1 -> mod (x) F_0, assembled from explicit rho-matrices of mod.
    """
    gens, rels, relmat = free_presentation(k)
    top = max([x.t for x in mod.summands] + [t_hi]) + max(gens + rels + [0]) + 1
    dims, rho = module_matrices(mod, t_lo, top)
    return _tensor_with_presentation(dims, rho, gens, rels, relmat, t_lo, t_hi)


def free_presentation(k: FieldProfile) -> tuple[list[int], list[int], np.ndarray]:
    """Minimal generators and relations of k_* as a graded Z/2[rho]-module.

    Degrees up to the cap are scanned; beyond vcd + 1 rho is an isomorphism,
    so no new generators or relations appear there.
    """
    top = k.degree_cap if k.vcd is None else min(k.degree_cap, k.vcd + 2)
    gens: list[tuple[int, np.ndarray]] = []
    for n in range(top + 1):
        reach = _span(k, gens, n)
        have = _rank(reach)
        for i in range(k.k_dim(n)):
            e = np.zeros((k.k_dim(n), 1), dtype=np.int64)
            e[i, 0] = 1
            cand = np.concatenate([reach, e], axis=1)
            if _rank(cand) > have:
                gens.append((n, e[:, 0]))
                reach, have = cand, have + 1
    rels: list[tuple[int, np.ndarray]] = []
    for n in range(top + 2):
        free = [(g, v) for g, v in gens if g <= n]
        cols = [(k.rho_power(g, n - g).astype(np.int64) @ v) % 2 for g, v in free]
        mat = np.stack(cols, axis=1) if cols else np.zeros((k.k_dim(n), 0), dtype=np.int64)
        if mat.shape[1] == 0:
            continue
        ker = _kernel_vectors(mat)
        prev = [np.pad(r, (0, len(free) - len(r))) for _, r in rels]
        pm = np.stack(prev, axis=1) if prev else np.zeros((len(free), 0), dtype=np.int64)
        have = _rank(pm)
        for v in ker:
            cand = np.concatenate([pm, v.reshape(-1, 1)], axis=1)
            if _rank(cand) > have:
                rels.append((n, v))
                pm, have = cand, have + 1
    relmat = np.zeros((len(gens), len(rels)), dtype=np.uint8)
    for j, (_, v) in enumerate(rels):
        relmat[: len(v), j] = v
    return [g for g, _ in gens], [n for n, _ in rels], relmat


def _span(k, gens, n):
    cols = [(k.rho_power(g, n - g).astype(np.int64) @ v) % 2 for g, v in gens if g <= n]
    if not cols:
        return np.zeros((k.k_dim(n), 0), dtype=np.int64)
    return np.stack(cols, axis=1)


def _kernel_vectors(mat: np.ndarray) -> list[np.ndarray]:
    from .gf2_linalg import kernel_basis

    if mat.shape[0] == 0:
        return [np.eye(mat.shape[1], dtype=np.int64)[i] for i in range(mat.shape[1])]
    return [r.astype(np.int64) for r in kernel_basis(PackedMatrix.from_dense(mat % 2))]


# ---------------------------------------------------------------------------
# assembling Ext over F


@dataclass
class BaseChangeChart:
    """Ext over F assembled from R: each cell holds a dimension or None (unknown)."""

    profile: str
    window: Window
    dims: dict[Tridegree, int | None] = field(default_factory=dict)
    tensor: dict[Tridegree, int | None] = field(default_factory=dict)
    tor: dict[Tridegree, int | None] = field(default_factory=dict)

    def dim(self, s: int, t: int, w: int) -> int | None:
        return self.dims.get(Tridegree(s, t, w))

    def known(self) -> dict[Tridegree, int]:
        return {d: v for d, v in self.dims.items() if v is not None}

    def to_tsv(self) -> str:
        lines = ["s\tt\tw\tdim\tnames"]
        for d in sorted(self.dims):
            v = self.dims[d]
            lines.append(f"{d.s}\t{d.t}\t{d.w}\t{'?' if v is None else v}\t")
        return "\n".join(lines) + "\n"


def assemble_extension(ten: int | None, tor: int | None) -> int | None:
    """dim Ext_F = dim(tensor) + dim(Tor_1 of the next filtration), or unknown."""
    if ten is None or tor is None:
        return None
    return ten + tor


def base_change_chart(engine: RealCobar, k: FieldProfile, window: Window | None = None) -> BaseChangeChart:
    """Ext over the profile k on a window, from the real slices computed by ``engine``."""
    window = window or engine.window
    out = BaseChangeChart(k.name, window)
    cache: dict[tuple[int, int], tuple | None] = {}

    def tables(s: int, m: int):
        if (s, m) in cache:
            return cache[(s, m)]
        if m < 0:
            res = ("zero",)
        elif s > engine.window.s_max:
            res = None
        else:
            try:
                mod = decompose(engine, s, m)
            except TruncationUnsound:
                res = None
            else:
                res = tensor_and_tor(mod, k, mod.floor, window.t_max)
        cache[(s, m)] = res
        return res

    for d in window.cells():
        m = d.mw
        a = tables(d.s, m)
        b = tables(d.s + 1, m - 1)
        ten = 0 if a == ("zero",) else (None if a is None else a[0].get(d.t))
        tor = 0 if b == ("zero",) else (None if b is None else b[1].get(d.t))
        out.tensor[d] = ten
        out.tor[d] = tor
        out.dims[d] = assemble_extension(ten, tor)
    return out


# ---------------------------------------------------------------------------
# vanishing


def vanishing_region(profile: FieldProfile, d: Tridegree, literal: bool = False) -> bool:
    """The three-condition vanishing region for Ext over F with vcd n.

    (1) s > (m + 3) / 2, (2) t - s < s - n - 1, (3) t - s > 0 or t - s < -n,
    together with m > 0 inherited from the Guillou-Isaksen lemma. Condition (2)
    is the shifted Guillou-Isaksen bound 2s > t + 1 + n. With ``literal=True``
    the printed form (t - s < s + n + 1, no m > 0) is used instead; that form
    contains nonzero classes such as h1^2 over C and rho^2 h1^3 over R and is
    kept only for comparison.
    """
    if profile.vcd is None:
        raise VcdInfinite("the vanishing region needs a finite vcd")
    n = profile.vcd
    stem = d.t - d.s
    if literal:
        return 2 * d.s > d.mw + 3 and stem < d.s + n + 1 and (stem > 0 or stem < -n)
    return d.mw > 0 and 2 * d.s > d.mw + 3 and stem < d.s - n - 1 and (stem > 0 or stem < -n)


def vanishing_violations(
    profile: FieldProfile, dims: dict[Tridegree, int | None], literal: bool = False
) -> list[Tridegree]:
    """Cells in the vanishing region whose known dimension is nonzero."""
    return sorted(d for d, v in dims.items() if v and vanishing_region(profile, d, literal))


# ---------------------------------------------------------------------------
# the cokernel-module route


def injectivity_degree(k: FieldProfile) -> int:
    """Smallest n with rho : k_j -> k_{j+1} an isomorphism for every j >= n."""
    if k.vcd is None:
        raise VcdInfinite("needs a finite vcd")
    n = k.degree_cap
    for j in range(k.degree_cap - 1, -1, -1):
        m = k.rho_matrix(j)
        if m.shape[0] == m.shape[1] and _rank(m) == m.shape[0]:
            n = j
        else:
            break
    return n


def c_route_defect(mod: RhoModule, k: FieldProfile, t_lo: int, t_hi: int) -> dict[int, int]:
    """Alternating dimension sum of the Tor long exact sequence for 0 -> F -> k_* -> C -> 0.

    F = Z/2[rho] (x) k_n with n the injectivity degree is free, so
    0 -> Tor_1(M, k) -> Tor_1(M, C) -> M (x) F -> M (x) k -> M (x) C -> 0
    is exact; the returned per-degree alternating sums must all vanish.
    M (x) C and Tor_1(M, C) are computed from the free resolution of C.
    """
    n = injectivity_degree(k)
    c = cokernel_C(k, n)
    ten_k, tor_k = tensor_and_tor(mod, k, t_lo, t_hi)
    dims, rho = module_matrices(mod, t_lo, t_hi + n + 2 + max([x.t for x in mod.summands] + [0]) - t_lo)
    dims_f = {}
    for t in range(t_lo, t_hi + 1):
        dims_f[t] = k.k_dim(n) * dims.get(t + n, 0)
    ten_c, tor_c = _tensor_with_presentation(dims, rho, list(c.generators), list(c.relations), c.relation_matrix, t_lo, t_hi)
    return {
        t: tor_k[t] - tor_c[t] + dims_f[t] - ten_k[t] + ten_c[t]
        for t in range(t_lo, t_hi + 1)
    }


def _tensor_with_presentation(dims, rho, gens, rels, relmat, t_lo, t_hi):
    def rho_pow(a: int, j: int) -> np.ndarray:
        m = np.eye(dims.get(a, 0), dtype=np.int64)
        for t in range(a, a - j, -1):
            m = (rho[t].astype(np.int64) @ m) % 2
        return m

    ten, tor = {}, {}
    for t in range(t_lo, t_hi + 1):
        rows = [dims.get(t + n, 0) for n in gens]
        cols = [dims.get(t + n, 0) for n in rels]
        mat = np.zeros((sum(rows), sum(cols)), dtype=np.int64)
        r0 = 0
        for i, ni in enumerate(gens):
            c0 = 0
            for j, nj in enumerate(rels):
                if relmat[i, j] and nj >= ni and rows[i] and cols[j]:
                    mat[r0 : r0 + rows[i], c0 : c0 + cols[j]] = rho_pow(t + nj, nj - ni)
                c0 += cols[j]
            r0 += rows[i]
        rk = _rank(mat)
        ten[t] = sum(rows) - rk
        tor[t] = sum(cols) - rk
    return ten, tor


__all__ = [
    "Summand",
    "RhoModule",
    "TruncationUnsound",
    "decompose",
    "barcode_from_ranks",
    "module_matrices",
    "tensor_and_tor",
    "tensor_and_tor_by_resolution",
    "free_presentation",
    "assemble_extension",
    "base_change_chart",
    "BaseChangeChart",
    "vanishing_region",
    "vanishing_violations",
    "injectivity_degree",
    "c_route_defect",
]
