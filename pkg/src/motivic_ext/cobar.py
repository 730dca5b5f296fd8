"""The motivic cobar complex at l = 2 and its homology.

Over R the cobar complex is free over Z/2[rho] on generators
tau^a [g_1|...|g_s] with each g_i a nonunit monomial of the dual Steenrod
algebra.  The Milnor-Witt degree m = t - s - w of such a generator is
a + sum(t(g_i) - 1 - w(g_i)), which is fixed by the differential up to the
usual shift, so the complex splits into finite slices indexed by (s, m).
Within a slice a generator of degree t_g contributes rho^n g to the cell
t = t_g - n, and the homology of the whole slice as a Z/2[rho]-module is a
barcode, read off by persistence-style column reduction.

Any other base field F with k_* central enters through the identification
of its cobar complex with the real one tensored with k_* over Z/2[rho]
("direct mode"), computed cell by cell.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator

import numpy as np

from .coefficients import FieldProfile, h_basis
from .dual_steenrod import (
    ONE,
    TAU0,
    Mono,
    _xor_into,
    eta_right_tau,
    make_mono,
    mono_mul,
    mono_degree,
    mono_str,
    monomials,
    reduced_coproduct,
    times_eta_right_tau,
)
from .gf2_linalg import ColumnReducer, CompositionNonzero, PackedMatrix, homology

XI1 = make_mono((), (1,))
TAU1 = make_mono((1,), ())

Gen = tuple[int, tuple[Mono, ...]]  # (tau exponent, bars)
CobarTerm = tuple[int, int, tuple[Mono, ...]]  # (rho exponent, tau exponent, bars)


class CapExceeded(RuntimeError):
    """A requested tridegree lies outside the configured caps."""


@dataclass(frozen=True, order=True)
class Tridegree:
    s: int
    t: int
    w: int

    @property
    def stem(self) -> int:
        return self.t - self.s

    @property
    def mw(self) -> int:
        return self.t - self.s - self.w


@dataclass(frozen=True)
class Window:
    """Caps for a chart: s <= s_max, t_min <= t <= t_max, w_min <= w <= w_max."""

    s_max: int = 10
    t_min: int = 0
    t_max: int = 14
    w_min: int = -2
    w_max: int = 14

    def cells(self) -> Iterator[Tridegree]:
        for s in range(self.s_max + 1):
            for t in range(self.t_min, self.t_max + 1):
                for w in range(self.w_min, self.w_max + 1):
                    yield Tridegree(s, t, w)

    def contains(self, d: Tridegree) -> bool:
        return (
            0 <= d.s <= self.s_max
            and self.t_min <= d.t <= self.t_max
            and self.w_min <= d.w <= self.w_max
        )

    def slice_floor(self, s: int, m: int) -> int:
        """Smallest generator degree t_g that a window cell of slice (s, m) can see."""
        return max(self.t_min, s + m + self.w_min)


DEFAULT_WINDOW = Window()


# ---------------------------------------------------------------------------
# generators


def bar_mw(g: Mono) -> int:
    t, w = mono_degree(g)
    return t - 1 - w


@lru_cache(maxsize=None)
def bars_of_mw(mu: int) -> tuple[Mono, ...]:
    """Nonunit monomials of Milnor-Witt degree mu, sorted.

    A monomial with m = mu has t <= 2 mu + 2, attained by xi_1^(mu+1).
    """
    out = []
    for t in range(1, 2 * mu + 3):
        w = t - 1 - mu
        if w < 0:
            continue
        out.extend(m for m in monomials(t, w) if m != ONE)
    return tuple(sorted(out))


def gen_degree(g: Gen) -> tuple[int, int]:
    a, bars = g
    t = w = 0
    for b in bars:
        bt, bw = mono_degree(b)
        t += bt
        w += bw
    return t, w - a


def gen_t(g: Gen) -> int:
    return sum(mono_degree(b)[0] for b in g[1])


def gen_str(g: Gen) -> str:
    a, bars = g
    coef = "" if a == 0 else ("tau" if a == 1 else f"tau^{a}")
    return f"{coef}[{'|'.join(mono_str(b) for b in bars)}]"


def cobar_term_str(term: CobarTerm) -> str:
    b, a, bars = term
    rho = "" if b == 0 else ("rho" if b == 1 else f"rho^{b}")
    return rho + gen_str((a, bars))


def element_str(x: Iterable[CobarTerm]) -> str:
    terms = sorted(x, key=lambda u: (u[0], u[1], u[2]))
    return " + ".join(cobar_term_str(u) for u in terms) if terms else "0"


def slice_generators(s: int, m: int, t_lo: int = 0, t_hi: int | None = None) -> list[Gen]:
    """Generators tau^a [bars] of slice (s, m) with t_lo <= t_g <= t_hi.

    Ordered by decreasing t_g, then lexicographically; this is the
    elimination order used everywhere.
    """
    if s < 0 or m < 0:
        return []
    out: list[Gen] = []
    bar_t = {}

    def rec(k: int, rem: int, t: int, acc: list[Mono]) -> None:
        if t_hi is not None and t > t_hi:
            return
        left = s - k
        if t + 2 * rem + 2 * left < t_lo:
            return
        if left == 0:
            if t >= t_lo:
                out.append((rem, tuple(acc)))
            return
        for mu in range(rem + 1):
            for g in bars_of_mw(mu):
                bt = bar_t.get(g)
                if bt is None:
                    bt = bar_t[g] = mono_degree(g)[0]
                acc.append(g)
                rec(k + 1, rem - mu, t + bt, acc)
                acc.pop()

    rec(0, m, 0, [])
    out.sort(key=lambda g: (-gen_t(g), g))
    return out


@lru_cache(maxsize=None)
def _bar_t_counts(mu: int) -> tuple[tuple[int, int], ...]:
    c = Counter(mono_degree(g)[0] for g in bars_of_mw(mu))
    return tuple(sorted(c.items()))


@lru_cache(maxsize=None)
def _tuple_t_counts(s: int, r: int) -> tuple[tuple[int, int], ...]:
    if s == 0:
        return ((0, 1),) if r == 0 else ()
    out: Counter = Counter()
    for mu in range(r + 1):
        rest = _tuple_t_counts(s - 1, r - mu)
        for t1, c1 in _bar_t_counts(mu):
            for t2, c2 in rest:
                out[t1 + t2] += c1 * c2
    return tuple(sorted(out.items()))


def slice_size(s: int, m: int, t_lo: int = 0) -> int:
    """Number of generators of slice (s, m) with t_g >= t_lo, by counting only."""
    if s < 0 or m < 0:
        return 0
    total = 0
    for a in range(m + 1):
        total += sum(c for t, c in _tuple_t_counts(s, m - a) if t >= t_lo)
    return total


# ---------------------------------------------------------------------------
# the differential


@lru_cache(maxsize=200_000)
def _push(c: int, prefix: tuple[Mono, ...]) -> frozenset[CobarTerm]:
    """Move a coefficient tau^c from the right of the bars ``prefix`` to the far left."""
    if c == 0:
        return frozenset({(0, 0, prefix)})
    if not prefix:
        return frozenset({(0, c, ())})
    out: set = set()
    last = prefix[-1]
    for bb, aa, mu in times_eta_right_tau(last, c):
        for b2, a2, p2 in _push(aa, prefix[:-1]):
            _xor_into(out, ((bb + b2, a2, p2 + (mu,)),))
    return frozenset(out)


def d_gen(g: Gen) -> set[CobarTerm]:
    """Differential of a generator as a set of terms rho^b tau^a [bars].

    The zeroth face inserts eta_R(tau^a) - tau^a as a new first bar; the
    i-th face splits bar i by the reduced coproduct, and the middle
    coefficient is moved left through the earlier bars with the right unit.
    """
    a, bars = g
    out: set = set()
    if a:
        for b, a2, mu in eta_right_tau(a):
            if mu != ONE:
                _xor_into(out, ((b, a2, (mu,) + bars),))
    for i, gm in enumerate(bars):
        rest = bars[i + 1 :]
        for b, a2, x, y in reduced_coproduct(gm):
            for b3, a3, pre in _push(a2, bars[:i]):
                _xor_into(out, ((b + b3, a + a3, pre + (x, y) + rest),))
    return out


def d_element(x: Iterable[CobarTerm]) -> set[CobarTerm]:
    out: set = set()
    for b, a, bars in x:
        for b2, a2, bars2 in d_gen((a, bars)):
            _xor_into(out, ((b + b2, a2, bars2),))
    return out


def term_tridegree(term: CobarTerm) -> Tridegree:
    b, a, bars = term
    t, w = gen_degree((a, bars))
    return Tridegree(len(bars), t - b, w - b)


def cobar_basis(d: Tridegree, window: Window | None = None) -> list[CobarTerm]:
    """Z/2-basis rho^n tau^a [bars] of the real cobar complex in one tridegree."""
    if window is not None and not window.contains(d):
        raise CapExceeded(f"{d} outside the window")
    m = d.mw
    gens = slice_generators(d.s, m, t_lo=d.t)
    return [(gen_t(g) - d.t, g[0], g[1]) for g in gens]


def differential(d: Tridegree, window: Window | None = None) -> PackedMatrix:
    """Matrix of d: C^s -> C^{s+1} in tridegree (s, t, w) over R."""
    src = cobar_basis(d, window)
    tgt = cobar_basis(Tridegree(d.s + 1, d.t, d.w))
    index = {u: i for i, u in enumerate(tgt)}
    cols = []
    for b, a, bars in src:
        col = 0
        for b2, a2, bars2 in d_gen((a, bars)):
            term = (b + b2, a2, bars2)
            if term_tridegree(term).mw != d.mw - 1:
                raise AssertionError("differential must lower the Milnor-Witt degree by one")
            col ^= 1 << index[term]
        cols.append(col)
    return PackedMatrix.from_columns(cols, len(tgt))


def guillou_isaksen_region(d: Tridegree) -> bool:
    """m > 0, s > (m + 3) / 2, 2s > t + 1 and t - s != 0: Ext over R and C vanishes here."""
    return d.mw > 0 and 2 * d.s > d.mw + 3 and 2 * d.s > d.t + 1 and d.stem != 0


def golden_identities() -> dict[str, bool]:
    """The basic cobar and dual Steenrod identities, each checked exactly."""
    tau0_xi1 = make_mono((0,), (1,))
    return {
        "d(tau) = rho[tau0]": d_gen((1, ())) == {(1, 0, (TAU0,))},
        "d[tau1] = [xi1|tau0]": d_gen((0, (TAU1,))) == {(0, 0, (XI1, TAU0))},
        "d[tau0 xi1] = [tau0|xi1] + [xi1|tau0]": d_gen((0, (tau0_xi1,))) == {(0, 0, (TAU0, XI1)), (0, 0, (XI1, TAU0))},
        "tau0^2 = tau xi1 + rho tau0 xi1 + rho tau1": mono_mul(TAU0, TAU0) == frozenset({(0, 1, XI1), (1, 0, tau0_xi1), (1, 0, TAU1)}),
    }


# ---------------------------------------------------------------------------
# persistence over Z/2[rho]


@dataclass(frozen=True)
class Bar:
    """A cyclic summand of Ext over R: a class at generator degree t_x with rho^k x = 0.

    ``k`` is None for a free (rho-torsion-free) summand.  ``open`` marks a
    free summand of the truncated computation that may be torsion in the
    full complex with a killer below the truncation floor.  The
    representative is a set of generator indices of the slice (empty when
    representatives were not tracked).
    """

    s: int
    m: int
    t: int
    k: int | None
    representative: frozenset
    open: bool = False

    def alive(self, t: int) -> bool:
        if t > self.t:
            return False
        return self.k is None or t > self.t - self.k

    @property
    def w(self) -> int:
        return self.t - self.s - self.m


@dataclass
class SliceHomology:
    s: int
    m: int
    floor: int
    generators: list[Gen]
    bars: list[Bar]
    boundary_lows: dict[int, tuple[frozenset, int]]  # low row -> (reduced column, t of source)
    bar_of_low: dict[int, int]  # low row of a torsion or free class -> bar index
    tracked: bool = False
    dd_verified: bool = False
    _index: dict | None = None

    @property
    def index(self) -> dict[Gen, int]:
        if self._index is None:
            self._index = {g: i for i, g in enumerate(self.generators)}
        return self._index

    def dim(self, t: int) -> int:
        if t < self.floor:
            raise CapExceeded("cell below the truncation floor of this slice")
        return sum(1 for b in self.bars if b.alive(t))

    def cell_classes(self, t: int) -> list[int]:
        """Indices of bars alive in cell t, in a stable order."""
        return [i for i, b in enumerate(self.bars) if b.alive(t)]

    def coordinates(self, cycle: Iterable[int], t: int) -> dict[int, int]:
        """Express a cycle (generator indices, all with t_g >= t) in the bar basis of cell t.

        Boundaries available in cell t are removed; a leading generator that
        is the low of a class records that class.  Classes killed before
        cell t never show up because their killing boundary is available.
        """
        if not self.tracked:
            raise ValueError("representatives were not tracked for this slice")
        coords: dict[int, int] = {}
        c = set(cycle)
        while c:
            p = max(c)
            if gen_t(self.generators[p]) < t:
                raise ValueError("cycle has a generator below the cell degree")
            hit = self.boundary_lows.get(p)
            if hit is not None and hit[1] >= t:
                c.symmetric_difference_update(hit[0])
                continue
            bi = self.bar_of_low.get(p)
            if bi is None:
                raise CompositionNonzero("element is not a cycle")
            coords[bi] = coords.get(bi, 0) ^ 1
            c.symmetric_difference_update(self.bars[bi].representative)
        return {i: v for i, v in coords.items() if v}

    def representative_terms(self, bar_index: int, t: int) -> frozenset[CobarTerm]:
        return self.indices_to_terms(self.bars[bar_index].representative, t)

    def indices_to_terms(self, idx: Iterable[int], t: int) -> frozenset[CobarTerm]:
        out = []
        for i in idx:
            g = self.generators[i]
            out.append((gen_t(g) - t, g[0], g[1]))
        return frozenset(out)

    def terms_to_indices(self, terms: Iterable[CobarTerm], t: int) -> set[int]:
        out: set[int] = set()
        for b, a, bars in terms:
            g = (a, bars)
            if gen_t(g) - b != t:
                raise ValueError("term not in cell")
            out ^= {self.index[g]}
        return out


@dataclass
class _Reduction:
    lows: dict[int, tuple[frozenset | None, int]]  # low row -> (reduced column if kept, source index)
    zero_columns: list[int]
    kernel: dict[int, frozenset]  # source index -> combination of source columns (if tracked)
    raw: list[tuple[int, ...]]  # unreduced columns (kept for the d.d check)


def _reduce_columns(src: list[Gen], tgt_index: dict[Gen, int], clear: set[int], track: bool) -> _Reduction:
    """Low-pivot reduction of the columns d(g) over a target index, with clearing.

    Columns are sparse sets of row indices; the pivot of a column is its
    largest row index, i.e. its generator of smallest t.
    """
    pivots: dict[int, set] = {}
    sources: dict[int, set] = {}
    zeros: list[int] = []
    kernel: dict[int, frozenset] = {}
    owner: dict[int, int] = {}
    raw: list[tuple[int, ...]] = []
    for j, g in enumerate(src):
        col: set[int] = set()
        for _b, a2, bars2 in d_gen(g):
            col ^= {tgt_index[(a2, bars2)]}
        raw.append(tuple(col))
        if j in clear:
            continue
        src_set = {j} if track else None
        while col:
            p = max(col)
            q = pivots.get(p)
            if q is None:
                pivots[p] = col
                owner[p] = j
                if track:
                    sources[p] = src_set
                break
            col.symmetric_difference_update(q)
            if track:
                src_set.symmetric_difference_update(sources[p])
        else:
            zeros.append(j)
            if track:
                kernel[j] = frozenset(src_set)
    lows = {p: (frozenset(col) if track else None, owner[p]) for p, col in pivots.items()}
    return _Reduction(lows, zeros, kernel, raw)


def _composite_is_zero(inner: list[tuple[int, ...]], outer: list[tuple[int, ...]]) -> bool:
    for col in inner:
        acc: set[int] = set()
        for i in col:
            acc.symmetric_difference_update(outer[i])
        if acc:
            return False
    return True


class RealCobar:
    """Slice-wise Ext over R with a generator budget.

    ``budget`` bounds the number of generators of any slice that is
    enumerated; slices over budget leave their cells unknown rather than
    approximated.  Representatives (needed for products) are tracked only
    for slices with at most ``rep_budget`` generators.
    """

    def __init__(self, window: Window = DEFAULT_WINDOW, budget: int = 300_000, rep_budget: int = 60_000):
        self.window = window
        self.budget = budget
        self.rep_budget = rep_budget
        self._slices: dict[tuple[int, int], SliceHomology | None] = {}
        self._done_diagonals: set[int] = set()
        self.dd_failures: list[tuple[int, int]] = []
        self.dd_checked: set[tuple[int, int]] = set()

    def floor(self, n_total: int) -> int:
        return max(self.window.t_min, n_total + self.window.w_min)

    def diagonal(self, n_total: int) -> None:
        """Compute every slice (s, n_total - s) for s <= s_max.

        The slices with s + m = n_total form one chain complex
        C(0, n) -> C(1, n-1) -> ...; it is reduced from left to right, each
        step cleared by the lows of the previous one, and each slice is
        finalized as soon as both of its differentials are reduced.
        """
        if n_total in self._done_diagonals:
            return
        floor = self.floor(n_total)
        s_top = min(n_total, self.window.s_max)

        def gens_at(s: int) -> list[Gen] | None:
            m = n_total - s
            if m < 0:
                return []
            if slice_size(s, m, floor) > self.budget:
                return None
            return slice_generators(s, m, floor)

        prev_gens: list[Gen] | None = []
        prev_red: _Reduction | None = _Reduction({}, [], {}, [])
        cur_gens = gens_at(0)
        for s in range(0, s_top + 1):
            m = n_total - s
            nxt_gens = gens_at(s + 1)
            track = cur_gens is not None and len(cur_gens) <= self.rep_budget
            if cur_gens is None or nxt_gens is None:
                red = None
            else:
                index = {g: i for i, g in enumerate(nxt_gens)}
                clear = set(prev_red.lows) if prev_red is not None else set()
                red = _reduce_columns(cur_gens, index, clear, track)
            if s > 0 and prev_red is not None and red is not None:
                self.dd_checked.add((s, m))
                if not _composite_is_zero(prev_red.raw, red.raw):
                    self.dd_failures.append((s, m))
            if cur_gens is None or prev_red is None or red is None:
                self._slices[(s, m)] = None
            else:
                self._slices[(s, m)] = self._finalize(s, m, floor, cur_gens, prev_gens, prev_red, red, track)
            prev_gens, prev_red, cur_gens = cur_gens, red, nxt_gens
        self._done_diagonals.add(n_total)

    def _finalize(self, s, m, floor, g_s, g_prev, r_in, r_out, track) -> SliceHomology:
        bars: list[Bar] = []
        boundary_lows: dict[int, tuple[frozenset, int]] = {}
        bar_of_low: dict[int, int] = {}
        for p, (col, j) in sorted(r_in.lows.items()):
            tp, tj = gen_t(g_s[p]), gen_t(g_prev[j])
            if track:
                boundary_lows[p] = (col, tj)
            k = tp - tj
            if k > 0:
                bar_of_low[p] = len(bars)
                bars.append(Bar(s, m, tp, k, col if track else frozenset()))
        paired = set(r_in.lows)
        for j in r_out.zero_columns:
            if j in paired:
                continue
            rep = r_out.kernel.get(j, frozenset()) if track else frozenset()
            bar_of_low[j] = len(bars)
            bars.append(Bar(s, m, gen_t(g_s[j]), None, rep, open=floor > max(s - 1, 0)))
        dd_ok = s == 0 or ((s, m) in self.dd_checked and (s, m) not in self.dd_failures)
        return SliceHomology(s, m, floor, g_s if track else [], bars, boundary_lows, bar_of_low, track, dd_ok)

    def slice(self, s: int, m: int) -> SliceHomology | None:
        if m < 0 or s < 0:
            return None
        self.diagonal(s + m)
        return self._slices.get((s, m))

    def dim(self, d: Tridegree) -> int | None:
        """dim Ext^{s,(t,w)} over R, or None when the cell is over budget."""
        if d.mw < 0 or d.s < 0:
            return 0
        if d.s > self.window.s_max:
            raise CapExceeded("s beyond the window")
        sl = self.slice(d.s, d.mw)
        if sl is None:
            return None
        if d.t < sl.floor:
            raise CapExceeded("cell below the slice floor")
        return sl.dim(d.t)


# ---------------------------------------------------------------------------
# direct mode: any profile, cell by cell


class DirectCobar:
    """Cobar complex of R tensored with k_* over Z/2[rho], computed per cell.

    The cell (s, t, w) has basis kappa (x) g with kappa running over a
    basis of k_n and g over generators of degree (t + n, w + n).  Only
    profiles with k_n = 0 for large n are supported, which covers
    algebraically closed fields, finite fields and the synthetic
    rho-nilpotent profiles.
    """

    def __init__(self, profile: FieldProfile, window: Window = DEFAULT_WINDOW, budget: int = 300_000):
        if profile.ell != 2:
            raise ValueError("direct mode runs at l = 2")
        top = profile.top_degree()
        if top is None:
            raise ValueError("direct mode needs k_* concentrated in finitely many degrees")
        self.profile = profile
        self.top = top
        self.window = window
        self.budget = budget
        self._cache: dict[Tridegree, tuple | None] = {}

    def cell_size(self, d: Tridegree) -> int:
        total = 0
        for n in range(self.top + 1):
            dn = self.profile.k_dim(n)
            if dn:
                total += dn * (slice_size(d.s, d.mw, d.t + n) - slice_size(d.s, d.mw, d.t + n + 1))
        return total

    def basis(self, d: Tridegree) -> list[tuple[int, int, Gen]]:
        """Basis triples (n, kappa index, generator)."""
        if d.mw < 0 or d.s < 0:
            return []
        out = []
        gens = slice_generators(d.s, d.mw, d.t, d.t + self.top)
        for g in gens:
            n = gen_t(g) - d.t
            for i in range(self.profile.k_dim(n)):
                out.append((n, i, g))
        return out

    def _columns(self, d: Tridegree) -> tuple[list[int], int]:
        src = self.basis(d)
        tgt = self.basis(Tridegree(d.s + 1, d.t, d.w))
        index = {u: i for i, u in enumerate(tgt)}
        cols = []
        for n, i, g in src:
            col = 0
            for b, a2, bars2 in d_gen(g):
                nn = n + b
                if nn > self.top:
                    continue
                img = self.profile.rho_power(n, b)[:, i] if b else None
                g2 = (a2, bars2)
                if b == 0:
                    col ^= 1 << index[(nn, i, g2)]
                else:
                    for r in np.flatnonzero(img):
                        col ^= 1 << index[(nn, int(r), g2)]
            cols.append(col)
        return cols, len(tgt)

    def cell(self, d: Tridegree):
        """(dim, d_in columns, d_out columns, size) or None when over budget."""
        if d in self._cache:
            return self._cache[d]
        if d.mw < 0 or d.s < 0:
            res = (0, [], [], 0)
            self._cache[d] = res
            return res
        sizes = [self.cell_size(Tridegree(d.s + k, d.t, d.w)) for k in (-1, 0, 1)]
        if max(sizes) > self.budget:
            self._cache[d] = None
            return None
        d_out, _ = self._columns(d)
        d_in, _ = self._columns(Tridegree(d.s - 1, d.t, d.w)) if d.s > 0 else ([], 0)
        r_out = ColumnReducer()
        for c in d_out:
            r_out.add(c)
        r_in = ColumnReducer()
        for c in d_in:
            r_in.add(c)
        dim = sizes[1] - r_out.rank - r_in.rank
        res = (dim, d_in, d_out, sizes[1])
        self._cache[d] = res
        return res

    def dim(self, d: Tridegree) -> int | None:
        c = self.cell(d)
        return None if c is None else c[0]

    def check_dd(self, d: Tridegree) -> bool | None:
        """d_s . d_{s-1} = 0 through the cell d."""
        c = self.cell(d)
        if c is None:
            return None
        _, d_in, d_out, _ = c
        for col in d_in:
            acc = 0
            while col:
                low = col & -col
                acc ^= d_out[low.bit_length() - 1]
                col ^= low
            if acc:
                return False
        return True

    def homology_basis(self, d: Tridegree):
        """Dense subquotient basis of the cell (for small cells)."""
        c = self.cell(d)
        if c is None:
            return None
        _, d_in, d_out, size = c
        n_out = len(self.basis(Tridegree(d.s + 1, d.t, d.w)))
        m_in = PackedMatrix.from_columns(d_in, size) if d_in else PackedMatrix.zeros(size, 0)
        m_out = PackedMatrix.from_columns(d_out, n_out) if d_out else PackedMatrix.zeros(n_out, size)
        return homology(m_in, m_out)


# ---------------------------------------------------------------------------
# charts


@dataclass
class ExtClass:
    tridegree: Tridegree
    name: str
    representative: frozenset
    bar: int | None = None


@dataclass
class ExtChart:
    """Dimensions, named classes and product tables on a window of tridegrees.

    ``dims`` holds every window cell whose value is known; ``unknown`` the
    cells whose computation was skipped for budget reasons.  Products map
    (source cell, class index) to the list of class indices of the target
    cell appearing in the product.
    """

    profile: str
    window: Window
    dims: dict[Tridegree, int] = field(default_factory=dict)
    unknown: set[Tridegree] = field(default_factory=set)
    classes: dict[Tridegree, list[ExtClass]] = field(default_factory=dict)
    products: dict[str, dict[tuple[Tridegree, int], tuple[int, ...]]] = field(default_factory=dict)
    dd_verified: dict[Tridegree, bool] = field(default_factory=dict)

    def dim(self, s: int, t: int, w: int) -> int | None:
        d = Tridegree(s, t, w)
        if d in self.dims:
            return self.dims[d]
        if d in self.unknown:
            return None
        if d.mw < 0:
            return 0
        raise CapExceeded(f"{d} outside the chart window")

    @property
    def coverage(self) -> float:
        total = len(self.dims) + len(self.unknown)
        return len(self.dims) / total if total else 1.0

    def names(self, d: Tridegree) -> list[str]:
        return [c.name for c in self.classes.get(d, [])]

    def to_tsv(self) -> str:
        lines = ["s\tt\tw\tdim\tnames"]
        for d in sorted(set(self.dims) | self.unknown):
            if d in self.unknown:
                lines.append(f"{d.s}\t{d.t}\t{d.w}\t?\t")
                continue
            lines.append(f"{d.s}\t{d.t}\t{d.w}\t{self.dims[d]}\t{' '.join(self.names(d))}")
        return "\n".join(lines) + "\n"


def _mult_right(terms: Iterable[CobarTerm], bar: Mono) -> frozenset[CobarTerm]:
    return frozenset((b, a, bars + (bar,)) for b, a, bars in terms)


def ext_chart_real(window: Window = DEFAULT_WINDOW, budget: int = 300_000, products: bool = True, engine: RealCobar | None = None) -> ExtChart:
    """Ext over R on the window, with h0, h1, rho and tau actions where defined."""
    eng = engine or RealCobar(window, budget)
    chart = ExtChart("R", window)
    for d in window.cells():
        if d.mw < 0:
            chart.dims[d] = 0
            continue
        dim = eng.dim(d)
        if dim is None:
            chart.unknown.add(d)
            continue
        chart.dims[d] = dim
        sl = eng.slice(d.s, d.mw)
        chart.dd_verified[d] = sl.dd_verified
        cls = []
        for bi in sl.cell_classes(d.t):
            bar = sl.bars[bi]
            rep = sl.representative_terms(bi, d.t) if bar.representative else frozenset()
            cls.append(ExtClass(d, "", rep, bi))
        chart.classes[d] = cls
    if products:
        _real_products(chart, eng)
    _name_classes(chart)
    return chart


def _real_products(chart: ExtChart, eng: RealCobar) -> None:
    for key in ("h0", "h1", "rho", "tau"):
        chart.products[key] = {}
    for d, cls in chart.classes.items():
        sl = eng.slice(d.s, d.mw)
        for i, c in enumerate(cls):
            # rho: the same cycle one cell lower
            tgt = Tridegree(d.s, d.t - 1, d.w - 1)
            if tgt in chart.classes:
                bar = sl.bars[c.bar]
                chart.products["rho"][(d, i)] = tuple(
                    j for j, c2 in enumerate(chart.classes[tgt]) if c2.bar == c.bar and bar.alive(d.t - 1)
                )
            if not c.representative:
                continue
            for key, bar_mono in (("h0", TAU0), ("h1", XI1)):
                bt, bw = mono_degree(bar_mono)
                tgt = Tridegree(d.s + 1, d.t + bt, d.w + bw)
                if tgt not in chart.classes:
                    continue
                sl2 = eng.slice(tgt.s, tgt.mw)
                if sl2 is None or not sl2.tracked or tgt.t < sl2.floor:
                    continue
                prod = _mult_right(c.representative, bar_mono)
                try:
                    coords = sl2.coordinates(sl2.terms_to_indices(prod, tgt.t), tgt.t)
                except (KeyError, CompositionNonzero):
                    continue
                chart.products[key][(d, i)] = _to_cell_indices(chart.classes[tgt], coords)
            tgt = Tridegree(d.s, d.t, d.w - 1)
            if tgt in chart.classes:
                prod = frozenset((b, a + 1, bars) for b, a, bars in c.representative)
                if d_element(prod):
                    continue
                sl2 = eng.slice(tgt.s, tgt.mw)
                if sl2 is None or not sl2.tracked or tgt.t < sl2.floor:
                    continue
                try:
                    coords = sl2.coordinates(sl2.terms_to_indices(prod, tgt.t), tgt.t)
                except (KeyError, CompositionNonzero):
                    continue
                chart.products["tau"][(d, i)] = _to_cell_indices(chart.classes[tgt], coords)


def _to_cell_indices(classes: list[ExtClass], coords: dict[int, int]) -> tuple[int, ...]:
    where = {c.bar: j for j, c in enumerate(classes)}
    return tuple(sorted(where[b] for b in coords if b in where))


def _name_classes(chart: ExtChart) -> None:
    """Name classes by monomials in h0, h1, rho, tau where products reach them."""
    for d in sorted(chart.classes):
        for i, c in enumerate(chart.classes[d]):
            if d.s == 0 and d.t == 0 and d.w == 0:
                c.name = "1"
    order = sorted(chart.classes, key=lambda d: (d.s, -d.t, d.w))
    for d in order:
        for i, c in enumerate(chart.classes[d]):
            if not c.name:
                c.name = f"x{d.s}_{d.t}_{d.w}" + (f"_{i}" if len(chart.classes[d]) > 1 else "")
        for key in ("rho", "tau", "h0", "h1"):
            for i, c in enumerate(chart.classes[d]):
                targets = chart.products.get(key, {}).get((d, i))
                if not targets or len(targets) != 1:
                    continue
                tgt = _product_target(d, key)
                c2 = chart.classes[tgt][targets[0]]
                if not c2.name:
                    c2.name = _monomial_name(key, c.name)


def _product_target(d: Tridegree, key: str) -> Tridegree:
    if key == "rho":
        return Tridegree(d.s, d.t - 1, d.w - 1)
    if key == "tau":
        return Tridegree(d.s, d.t, d.w - 1)
    if key == "h0":
        return Tridegree(d.s + 1, d.t + 1, d.w)
    return Tridegree(d.s + 1, d.t + 2, d.w + 1)


def _monomial_name(key: str, base: str) -> str:
    """Multiply a monomial name like rho^2*h1^3 by a generator, keeping a fixed factor order."""
    order = ("rho", "tau", "h0", "h1")
    powers: dict[str, int] = {}
    if base != "1":
        for part in base.split("*"):
            name, _, e = part.partition("^")
            if name not in order:
                return f"{key}*{base}"
            powers[name] = powers.get(name, 0) + (int(e) if e else 1)
    powers[key] = powers.get(key, 0) + 1
    parts = [f"{k}^{powers[k]}" if powers[k] > 1 else k for k in order if powers.get(k)]
    return "*".join(parts)


def ext_chart_direct(profile: FieldProfile, window: Window = DEFAULT_WINDOW, budget: int = 300_000, representatives: bool = False) -> ExtChart:
    """Ext over a profile with bounded k_*, computed cell by cell."""
    eng = DirectCobar(profile, window, budget)
    chart = ExtChart(profile.name, window)
    for d in window.cells():
        if d.mw < 0:
            chart.dims[d] = 0
            continue
        dim = eng.dim(d)
        if dim is None:
            chart.unknown.add(d)
            continue
        chart.dims[d] = dim
        chart.dd_verified[d] = bool(eng.check_dd(d))
        cls = []
        if representatives and dim and eng.cell(d)[3] <= 4000:
            sq = eng.homology_basis(d)
            basis = eng.basis(d)
            for j, row in enumerate(sq.representatives):
                rep = frozenset(
                    (basis[i][0], basis[i][1], basis[i][2]) for i in np.flatnonzero(row)
                )
                cls.append(ExtClass(d, f"x{d.s}_{d.t}_{d.w}" + (f"_{j}" if dim > 1 else ""), rep))
        else:
            cls = [ExtClass(d, f"x{d.s}_{d.t}_{d.w}" + (f"_{j}" if dim > 1 else ""), frozenset()) for j in range(dim)]
        chart.classes[d] = cls
    return chart


def ext_chart(profile: FieldProfile, window: Window = DEFAULT_WINDOW, budget: int = 300_000, products: bool = True) -> ExtChart:
    """Ext chart over R by persistence, or over any bounded profile in direct mode."""
    if profile.ell != 2:
        raise ValueError("sphere charts are computed at l = 2")
    if profile.name == "R":
        return ext_chart_real(window, budget, products)
    return ext_chart_direct(profile, window, budget)


# ---------------------------------------------------------------------------
# Ext over E(0)


def _e0_cell_basis(profile: FieldProfile, t: int, w: int):
    return h_basis(profile, t, w)


def _beta_matrix(profile: FieldProfile, t: int, w: int) -> np.ndarray:
    """beta: H_{t,w} -> H_{t-1,w} read off from the right unit modulo tau_0^2."""
    src = h_basis(profile, t, w)
    tgt = h_basis(profile, t - 1, w)
    mat = np.zeros((len(tgt), len(src)), dtype=np.uint8)
    if profile.ell != 2:
        if src and tgt:
            mat = profile.beta_matrix(-w).astype(np.uint8).copy() % profile.ell
            mat = mat.reshape(len(tgt), len(src))
        return mat
    index = {(e.k_degree, e.k_index, e.tau_power): i for i, e in enumerate(tgt)}
    for j, e in enumerate(src):
        # kappa tau^a  ->  kappa * (rho^b tau^a' coefficient of tau_0 in eta_R(tau^a))
        for b, a2, mu in eta_right_tau(e.tau_power):
            if mu != TAU0:
                continue
            img = profile.rho_power(e.k_degree, b)[:, e.k_index] if b else None
            nn = e.k_degree + b
            if b == 0:
                mat[index[(nn, e.k_index, a2)], j] ^= 1
            else:
                for r in np.flatnonzero(img):
                    mat[index[(nn, int(r), a2)], j] ^= 1
    return mat


def ext_E0(profile: FieldProfile, window: Window = DEFAULT_WINDOW) -> ExtChart:
    """Ext over E(0) = (H, H[tau_0]/tau_0^2) from its two-row cobar complex.

    The cobar complex has C^s_{(t,w)} = H_{t-s,w} [tau_0|...|tau_0] and the
    differential is the tau_0-component of the right unit, i.e. the
    Bockstein.
    """
    chart = ExtChart(profile.name + "/E(0)", window)
    p = profile.ell
    for d in window.cells():
        t0 = d.t - d.s
        mid = h_basis(profile, t0, d.w)
        if not mid:
            chart.dims[d] = 0
            chart.classes[d] = []
            continue
        d_out = _beta_matrix(profile, t0, d.w)
        d_in = _beta_matrix(profile, t0 + 1, d.w) if d.s > 0 else np.zeros((len(mid), 0), dtype=np.uint8)
        m_out = PackedMatrix.from_dense(d_out, prime=p) if d_out.size else PackedMatrix.zeros(d_out.shape[0], len(mid), prime=p)
        m_in = PackedMatrix.from_dense(d_in, prime=p) if d_in.size else PackedMatrix.zeros(len(mid), d_in.shape[1], prime=p)
        sq = homology(m_in, m_out)
        chart.dims[d] = sq.dim
        names = []
        for row in sq.representatives:
            lead = mid[int(np.flatnonzero(row)[0])].name
            h0 = "" if d.s == 0 else ("h0" if d.s == 1 else f"h0^{d.s}")
            names.append("*".join(x for x in (lead if lead != "1" else "", h0) if x) or "1")
        chart.classes[d] = [ExtClass(d, n, frozenset()) for n in names]
    return chart


__all__ = [
    "Tridegree",
    "Window",
    "DEFAULT_WINDOW",
    "CapExceeded",
    "Bar",
    "SliceHomology",
    "RealCobar",
    "DirectCobar",
    "ExtChart",
    "ExtClass",
    "bars_of_mw",
    "slice_generators",
    "slice_size",
    "d_gen",
    "d_element",
    "cobar_basis",
    "differential",
    "ext_chart",
    "ext_chart_real",
    "ext_chart_direct",
    "ext_E0",
    "gen_str",
    "element_str",
    "XI1",
    "golden_identities",
    "guillou_isaksen_region",
    "TAU1",
]
