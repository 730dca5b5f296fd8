"""The finite subalgebra A(1) over H = GF(2)[tau, rho] and closed-form Ext oracles.

Elements are GF(2)-sums of terms tau^a rho^b e_i where e_i runs over the
basis ``BASIS``. Coefficients sit on the left; moving a generator past tau
uses the commutation rules

    Sq1 tau = tau Sq1 + rho,
    Q tau   = tau Q + rho tau Sq1 + rho^2      (Q = Sq2 + rho Sq1),

which is the rule Sq2 tau = tau (Sq2 + rho Sq1) rewritten in the basis with
Q in place of Sq2. rho is central. Bidegrees are cohomological:
tau in (0, 1), rho in (1, 1), Sq1 in (1, 0), Q in (2, 1).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product as iproduct
from typing import Iterable

import numpy as np

from .cobar import ExtChart, Tridegree
from .coefficients import FieldProfile, h_basis
from .gf2_linalg import PackedMatrix, rank

BASIS = ("1", "Sq1", "Q", "Sq3", "Sq2Sq1", "Sq3Sq1", "Sq2Sq3", "Sq2Sq3Sq1")
BASIS_DEGREE = ((0, 0), (1, 0), (2, 1), (3, 1), (3, 1), (4, 1), (5, 2), (6, 2))
_IDX = {name: i for i, name in enumerate(BASIS)}

# Each basis element as a word in the generators Sq1 ("1") and Q ("Q"),
# applied right to left.
BASIS_WORD = ((), ("1",), ("Q",), ("1", "Q"), ("Q", "1"), ("1", "Q", "1"), ("Q", "1", "Q"), ("Q", "1", "Q", "1"))

Term = tuple[int, int, int]  # (tau power, rho power, basis index)


def _t(a: int, b: int, name: str) -> Term:
    return (a, b, _IDX[name])


# Left multiplication by Sq1 (straight lines of the A(1) picture).
LEFT_SQ1: dict[int, frozenset[Term]] = {
    _IDX["1"]: frozenset({_t(0, 0, "Sq1")}),
    _IDX["Sq1"]: frozenset(),
    _IDX["Q"]: frozenset({_t(0, 0, "Sq3")}),
    _IDX["Sq3"]: frozenset(),
    _IDX["Sq2Sq1"]: frozenset({_t(0, 0, "Sq3Sq1")}),
    _IDX["Sq3Sq1"]: frozenset(),
    _IDX["Sq2Sq3"]: frozenset({_t(0, 0, "Sq2Sq3Sq1")}),
    _IDX["Sq2Sq3Sq1"]: frozenset(),
}

# Left multiplication by Q = Sq2 + rho Sq1 (curved lines, plus the dashed
# relation Q^2 = rho Sq2Sq1 + rho Sq3 + tau Sq3Sq1 and its consequences).
LEFT_Q: dict[int, frozenset[Term]] = {
    _IDX["1"]: frozenset({_t(0, 0, "Q")}),
    _IDX["Sq1"]: frozenset({_t(0, 0, "Sq2Sq1")}),
    _IDX["Q"]: frozenset({_t(0, 1, "Sq2Sq1"), _t(0, 1, "Sq3"), _t(1, 0, "Sq3Sq1")}),
    _IDX["Sq3"]: frozenset({_t(0, 0, "Sq2Sq3")}),
    _IDX["Sq2Sq1"]: frozenset({_t(0, 1, "Sq3Sq1")}),
    _IDX["Sq3Sq1"]: frozenset({_t(0, 0, "Sq2Sq3Sq1")}),
    _IDX["Sq2Sq3"]: frozenset({_t(0, 1, "Sq2Sq3Sq1")}),
    _IDX["Sq2Sq3Sq1"]: frozenset(),
}

_LEFT = {"1": LEFT_SQ1, "Q": LEFT_Q}


class ExactnessFailure(AssertionError):
    """A checked sequence fails to be exact; carries the offending bidegree."""

    def __init__(self, node: str, bidegree: tuple[int, int], detail: str = ""):
        super().__init__(f"{node} not exact at bidegree {bidegree} {detail}".rstrip())
        self.node = node
        self.bidegree = bidegree


@dataclass(frozen=True)
class AOneElement:
    """A GF(2)-combination of tau^a rho^b e_i, optionally in a rho-truncated ring.

    ``rho_order`` r imposes rho^r = 0 (r = 1 is the specialization rho = 0);
    None means rho is free.
    """

    terms: frozenset[Term] = frozenset()
    rho_order: int | None = None

    @staticmethod
    def basis(name: str, tau: int = 0, rho: int = 0, rho_order: int | None = None) -> "AOneElement":
        return AOneElement(_clip(frozenset({(tau, rho, _IDX[name])}), rho_order), rho_order)

    @staticmethod
    def tau(k: int = 1, rho_order: int | None = None) -> "AOneElement":
        return AOneElement.basis("1", tau=k, rho_order=rho_order)

    @staticmethod
    def rho(k: int = 1, rho_order: int | None = None) -> "AOneElement":
        return AOneElement.basis("1", rho=k, rho_order=rho_order)

    def __add__(self, other: "AOneElement") -> "AOneElement":
        return AOneElement(self.terms ^ other.terms, self.rho_order)

    def __mul__(self, other: "AOneElement") -> "AOneElement":
        return a1_multiply(self, other)

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> tuple[int, int] | None:
        degs = {term_degree(t) for t in self.terms}
        if len(degs) > 1:
            raise ValueError("inhomogeneous element")
        return degs.pop() if degs else None

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        out = []
        for a, b, i in sorted(self.terms, key=lambda x: (x[2], x[0], x[1])):
            coef = "*".join(p for p in (_power("rho", b), _power("tau", a)) if p)
            name = BASIS[i]
            if name == "1":
                out.append(coef or "1")
            else:
                out.append(f"{coef}*{name}" if coef else name)
        return " + ".join(out)


def _power(x: str, k: int) -> str:
    return "" if k == 0 else (x if k == 1 else f"{x}^{k}")


def _clip(terms: frozenset[Term], rho_order: int | None) -> frozenset[Term]:
    if rho_order is None:
        return terms
    return frozenset(t for t in terms if t[1] < rho_order)


def term_degree(t: Term) -> tuple[int, int]:
    a, b, i = t
    p, q = BASIS_DEGREE[i]
    return (p + b, q + a + b)


@lru_cache(maxsize=None)
def _gen_times_tau(gen: str, a: int) -> frozenset[tuple[int, int, str]]:
    """gen * tau^a written as a sum of tau^x rho^y g' with g' in {'', '1', 'Q'}."""
    if a == 0:
        return frozenset({(0, 0, gen)})
    out: set[tuple[int, int, str]] = set()
    # gen * tau^a = (gen * tau) * tau^(a-1)
    if gen == "1":
        first = [(1, 0, "1"), (0, 1, "")]
    else:
        first = [(1, 0, "Q"), (1, 1, "1"), (0, 2, "")]
    for x, y, g in first:
        if g == "":
            out ^= {(x + a - 1, y, "")}
            continue
        for x2, y2, g2 in _gen_times_tau(g, a - 1):
            out ^= {(x + x2, y + y2, g2)}
    return frozenset(out)


@lru_cache(maxsize=None)
def _gen_times_term(gen: str, term: Term) -> frozenset[Term]:
    """Left multiplication of a generator on tau^a rho^b e_i (rho unrestricted)."""
    a, b, i = term
    out: set[Term] = set()
    for x, y, g in _gen_times_tau(gen, a):
        if g == "":
            out ^= {(x, y + b, i)}
            continue
        for x2, y2, j in _LEFT[g][i]:
            out ^= {(x + x2, y + y2 + b, j)}
    return frozenset(out)


@lru_cache(maxsize=None)
def _basis_times_term(i: int, term: Term) -> frozenset[Term]:
    cur = {term}
    for gen in reversed(BASIS_WORD[i]):
        nxt: set[Term] = set()
        for t in cur:
            nxt ^= _gen_times_term(gen, t)
        cur = nxt
    return frozenset(cur)


def a1_multiply(x: AOneElement, y: AOneElement) -> AOneElement:
    """Table-driven product; left H-linear in x, semilinear in y via the tau rules."""
    r = x.rho_order if x.rho_order is not None else y.rho_order
    out: set[Term] = set()
    for a, b, i in x.terms:
        for t in y.terms:
            for a2, b2, j in _basis_times_term(i, t):
                out ^= {(a + a2, b + b2, j)}
    return AOneElement(_clip(frozenset(out), r), r)


def _coefficient_monomials(n: int) -> list[tuple[int, int]]:
    return [(a, b) for a in range(n + 1) for b in range(n + 1)]


def check_associativity(max_exponent: int = 2, rho_order: int | None = None) -> int:
    """(xy)z = x(yz) for all basis triples with tau, rho exponents <= max_exponent.

    The left factor is taken with trivial coefficient since products are left
    H-linear by construction. Returns the number of triples checked and raises
    AssertionError on the first failure.
    """
    mons = _coefficient_monomials(max_exponent)
    elems = [
        AOneElement(_clip(frozenset({(a, b, i)}), rho_order), rho_order)
        for (a, b) in mons
        for i in range(len(BASIS))
    ]
    elems = [e for e in elems if e.terms]
    left = [AOneElement.basis(n, rho_order=rho_order) for n in BASIS]
    count = 0
    for x in left:
        for y in elems:
            xy = x * y
            for z in elems:
                if (xy * z).terms != (x * (y * z)).terms:
                    raise AssertionError(f"associativity fails on ({x})({y})({z})")
                count += 1
    return count


# ---------------------------------------------------------------------------
# graded pieces and right multiplication matrices


def graded_basis(p: int, q: int, rho_order: int | None = None) -> list[Term]:
    """GF(2)-basis tau^a rho^b e_i of A(1) in cohomological bidegree (p, q)."""
    out = []
    for i, (dp, dq) in enumerate(BASIS_DEGREE):
        b = p - dp
        a = q - dq - b
        if b < 0 or a < 0 or (rho_order is not None and b >= rho_order):
            continue
        out.append((a, b, i))
    return out


def right_mult_matrix(z: AOneElement, p: int, q: int) -> np.ndarray:
    """Matrix of x -> x z from degree (p, q) to (p, q) + deg z."""
    dz = z.degree()
    r = z.rho_order
    src = graded_basis(p, q, r)
    if dz is None:
        return np.zeros((0, len(src)), dtype=np.uint8)
    tgt = graded_basis(p + dz[0], q + dz[1], r)
    index = {t: k for k, t in enumerate(tgt)}
    mat = np.zeros((len(tgt), len(src)), dtype=np.uint8)
    for j, t in enumerate(src):
        for u in (AOneElement(frozenset({t}), r) * z).terms:
            mat[index[u], j] ^= 1
    return mat


def _rank(m: np.ndarray) -> int:
    if m.size == 0:
        return 0
    return rank(PackedMatrix.from_dense(m))


def _hstack(*mats: np.ndarray, rows: int) -> np.ndarray:
    mats = [m if m.ndim == 2 and m.shape[0] == rows else np.zeros((rows, 0), dtype=np.uint8) for m in mats]
    return np.concatenate(mats, axis=1) if mats else np.zeros((rows, 0), dtype=np.uint8)


@dataclass
class ExactnessRow:
    node: str
    bidegree: tuple[int, int]
    kernel: int
    image: int
    ok: bool


@dataclass
class ExactnessReport:
    title: str
    window: tuple[int, int]
    rho_order: int | None
    rows: list[ExactnessRow] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.rows)

    def failures(self) -> list[ExactnessRow]:
        return [r for r in self.rows if not r.ok]

    def to_text(self) -> str:
        spec = "rho free" if self.rho_order is None else f"rho^{self.rho_order} = 0"
        lines = [f"{self.title} [{spec}, p <= {self.window[0]}, q <= {self.window[1]}]"]
        lines.append("node\tbidegree\tkernel\timage\tverdict")
        for r in self.rows:
            lines.append(f"{r.node}\t{r.bidegree}\t{r.kernel}\t{r.image}\t{'exact' if r.ok else 'FAIL'}")
        return "\n".join(lines)


def _ideal_span(p: int, q: int, gens: Iterable[AOneElement]) -> np.ndarray:
    """Columns spanning the left ideal A(1)(gens) in degree (p, q)."""
    rows = len(graded_basis(p, q, _order(gens)))
    cols = []
    for g in gens:
        dg = g.degree()
        if dg is None or p - dg[0] < 0 or q - dg[1] < 0:
            continue
        cols.append(right_mult_matrix(g, p - dg[0], q - dg[1]))
    return _hstack(*cols, rows=rows)


def _order(gens: Iterable[AOneElement]) -> int | None:
    for g in gens:
        return g.rho_order
    return None


def _quotient_dim(p: int, q: int, gens: list[AOneElement]) -> int:
    if p < 0 or q < 0:
        return 0
    return len(graded_basis(p, q, _order(gens))) - _rank(_ideal_span(p, q, gens))


def verify_ases(
    max_p: int = 14, max_q: int = 14, rho_order: int | None = None, raise_on_failure: bool = True
) -> ExactnessReport:
    """Rank check of 0 -> S^{2,1} A/A(tau,Q) --.Q--> A/A tau -> A/A(tau,Q) -> 0 for A = A(1).

    Per bidegree D of the middle term: the multiplication x -> xQ must send
    A(tau, Q) into A tau (well defined), the preimage of A tau under .Q must
    equal A(tau, Q) (injective), and dim(middle) = dim(left) + dim(right).
    The default window contains every element whose tau and rho exponents are
    at most 6.
    """
    tau = AOneElement.tau(rho_order=rho_order)
    qq = AOneElement.basis("Q", rho_order=rho_order)
    report = ExactnessReport("A(1) short exact sequence", (max_p, max_q), rho_order)
    for p, q in iproduct(range(max_p + 1), range(max_q + 1)):
        # left node lives in degree (p, q) - (2, 1) of A
        sp, sq = p - 2, q - 1
        n_src = len(graded_basis(sp, sq, rho_order)) if sp >= 0 and sq >= 0 else 0
        tgt_tau = _ideal_span(p, q, [tau])
        r_tau = _rank(tgt_tau)
        if n_src:
            mq = right_mult_matrix(qq, sp, sq)
            ideal_src = _ideal_span(sp, sq, [tau, qq])
            r_ideal = _rank(ideal_src)
            # well defined: A(tau,Q) . Q inside A tau
            img_ideal = (mq.astype(np.int64) @ ideal_src.astype(np.int64) % 2).astype(np.uint8)
            well = _rank(_hstack(tgt_tau, img_ideal, rows=tgt_tau.shape[0])) == r_tau
            # kernel of A -> A/A tau, x -> xQ
            r_comb = _rank(_hstack(tgt_tau, mq, rows=tgt_tau.shape[0]))
            ker_dim = n_src - (r_comb - r_tau)
            inj = well and ker_dim == r_ideal
            left_dim = n_src - r_ideal
            image_dim = r_comb - r_tau
        else:
            inj, ker_dim, r_ideal, left_dim, image_dim = True, 0, 0, 0, 0
        mid_dim = len(graded_basis(p, q, rho_order)) - r_tau
        right_dim = _quotient_dim(p, q, [tau, qq])
        report.rows.append(ExactnessRow("left", (p, q), ker_dim - r_ideal, left_dim, inj))
        report.rows.append(
            ExactnessRow("middle", (p, q), mid_dim - right_dim, image_dim, mid_dim == left_dim + right_dim and image_dim == mid_dim - right_dim)
        )
        report.rows.append(ExactnessRow("right", (p, q), mid_dim - right_dim, right_dim, True))
    if raise_on_failure and not report.ok:
        bad = report.failures()[0]
        raise ExactnessFailure(bad.node, bad.bidegree)
    return report


def verify_tom(
    max_p: int = 14, max_q: int = 14, rho_order: int | None = None, raise_on_failure: bool = True
) -> ExactnessReport:
    """Exactness of S^{2,2}A(1) + S^{4,2}A(1) -> S^{0,1}A(1) + S^{2,1}A(1) -> A(1)(tau, Q) -> 0.

    The first map is (x, y) -> (x Sq2 + y Sq3Sq1, x tau + y Q) and the second
    is (u, v) -> u tau + v Q. Checked per target bidegree D: the composite is
    zero, ker = im in the middle, the second map hits all of A(1)(tau, Q), and
    the cokernel of the first map has the dimension of A(1)(tau, Q), so that
    A(1) / coker has the dimension of the quotient A(1)/A(1)(tau, Q).
    """
    r = rho_order
    tau = AOneElement.tau(rho_order=r)
    qq = AOneElement.basis("Q", rho_order=r)
    sq2 = qq + AOneElement.basis("Sq1", rho=1, rho_order=r)
    sq31 = AOneElement.basis("Sq3Sq1", rho_order=r)
    report = ExactnessReport("A(1) presentation of A(1)(tau, Q)", (max_p, max_q), r)

    def dim(p: int, q: int) -> int:
        return len(graded_basis(p, q, r)) if p >= 0 and q >= 0 else 0

    def rmat(z: AOneElement, p: int, q: int, rows: int) -> np.ndarray:
        if p < 0 or q < 0:
            return np.zeros((rows, 0), dtype=np.uint8)
        return right_mult_matrix(z, p, q)

    for p, q in iproduct(range(max_p + 1), range(max_q + 1)):
        nu, nv = dim(p, q - 1), dim(p - 2, q - 1)
        nx, ny = dim(p - 2, q - 2), dim(p - 4, q - 2)
        n_tgt = dim(p, q)
        # second map N : (u, v) -> u tau + v Q
        big_n = _hstack(rmat(tau, p, q - 1, n_tgt), rmat(qq, p - 2, q - 1, n_tgt), rows=n_tgt)
        # first map M : (x, y) -> (x Sq2 + y Sq3Sq1, x tau + y Q)
        top = _hstack(rmat(sq2, p - 2, q - 2, nu), rmat(sq31, p - 4, q - 2, nu), rows=nu)
        bot = _hstack(rmat(tau, p - 2, q - 2, nv), rmat(qq, p - 4, q - 2, nv), rows=nv)
        big_m = np.concatenate([top, bot], axis=0) if nu + nv else np.zeros((0, nx + ny), dtype=np.uint8)
        comp = (big_n.astype(np.int64) @ big_m.astype(np.int64) % 2) if big_m.size and big_n.size else np.zeros(1)
        zero = not np.any(comp)
        r_n, r_m = _rank(big_n), _rank(big_m)
        ker_n = nu + nv - r_n
        ideal = _rank(_ideal_span(p, q, [tau, qq])) if n_tgt else 0
        report.rows.append(ExactnessRow("middle", (p, q), ker_n, r_m, zero and ker_n == r_m))
        coker_m = nu + nv - r_m
        report.rows.append(ExactnessRow("right", (p, q), 0, r_n, r_n == ideal and coker_m == ideal))
        quotient = _quotient_dim(p, q, [tau, qq])
        report.rows.append(ExactnessRow("quotient", (p, q), coker_m, n_tgt - coker_m, n_tgt - coker_m == quotient))
    if raise_on_failure and not report.ok:
        bad = report.failures()[0]
        raise ExactnessFailure(bad.node, bad.bidegree)
    return report


def right_q_kernel_generators(rho_order: int | None = None) -> list[str]:
    """Basis elements b with b Q in A(1) tau, i.e. annihilated by .Q on A(1)/A(1)tau."""
    tau = AOneElement.tau(rho_order=rho_order)
    qq = AOneElement.basis("Q", rho_order=rho_order)
    out = []
    for name, (p, q) in zip(BASIS, BASIS_DEGREE):
        img = right_mult_matrix(qq, p, q)
        col = graded_basis(p, q, rho_order).index((0, 0, _IDX[name]))
        v = img[:, [col]]
        span = _ideal_span(p + 2, q + 1, [tau])
        if _rank(_hstack(span, v, rows=v.shape[0])) == _rank(span):
            out.append(name)
    return out


# ---------------------------------------------------------------------------
# closed-form Ext oracles (homological tridegrees)


SPECTRA = ("HW", "HZ~", "HZ")


def h_dim(profile: FieldProfile, t: int, w: int) -> int:
    return len(h_basis(profile, t, w))


def h_mod_tau_dim(profile: FieldProfile, t: int, w: int) -> int:
    """dim (H / tau)_{t,w} = dim k_{-t} when t = w."""
    if t != w or t > 0:
        return 0
    return profile.k_dim(-t)


def bockstein_matrix(profile: FieldProfile, t: int, w: int) -> np.ndarray:
    """beta : H_{t,w} -> H_{t-1,w}, closed form.

    At l = 2, beta(kappa tau^a) = a * rho kappa tau^(a-1); at odd l the
    profile's Bockstein table is used.
    """
    src = h_basis(profile, t, w)
    tgt = h_basis(profile, t - 1, w)
    mat = np.zeros((len(tgt), len(src)), dtype=np.int64)
    if not src or not tgt:
        return mat
    if profile.ell != 2:
        return np.asarray(profile.beta_matrix(-w), dtype=np.int64).reshape(len(tgt), len(src)) % profile.ell
    index = {(e.k_degree, e.k_index, e.tau_power): i for i, e in enumerate(tgt)}
    for j, e in enumerate(src):
        if e.tau_power % 2 == 0:
            continue
        col = profile.rho_matrix(e.k_degree)[:, e.k_index]
        for r in np.flatnonzero(col % 2):
            mat[index[(e.k_degree + 1, int(r), e.tau_power - 1)], j] = 1
    return mat


def _rank_mod(m: np.ndarray, p: int) -> int:
    if m.size == 0:
        return 0
    return rank(PackedMatrix.from_dense(m % p, prime=p))


def hz_dim(profile: FieldProfile, d: Tridegree) -> int:
    """Closed form ker(beta) h0^s / im(beta) h0^s for the Adams E2 page of HZ."""
    if d.s < 0:
        return 0
    t0 = d.t - d.s
    n = h_dim(profile, t0, d.w)
    if n == 0:
        return 0
    ker = n - _rank_mod(bockstein_matrix(profile, t0, d.w), profile.ell)
    if d.s == 0:
        return ker
    return ker - _rank_mod(bockstein_matrix(profile, t0 + 1, d.w), profile.ell)


def ext_oracle(spectrum: str, d: Tridegree, profile: FieldProfile) -> int:
    """Closed-form dimension of Ext^{s,(t,w)} for HW, HZ~ or HZ (l = 2 for the first two)."""
    if d.s < 0:
        raise ValueError("s must be nonnegative")
    if spectrum == "HZ":
        return hz_dim(profile, d)
    if profile.ell != 2:
        raise ValueError(f"{spectrum} oracle is only defined at l = 2")
    if spectrum == "HW":
        if d.s == 0:
            return h_dim(profile, d.t, d.w)
        return h_mod_tau_dim(profile, d.t - 2 * d.s, d.w - d.s)
    if spectrum == "HZ~":
        if d.s == 0:
            return h_dim(profile, d.t, d.w)
        return ext_oracle("HW", d, profile) + hz_dim(profile, Tridegree(d.s - 1, d.t - 1, d.w))
    raise ValueError(f"unknown spectrum {spectrum!r}; expected one of {SPECTRA}")


@dataclass
class HighFiltrationColumn:
    stem: int
    w: int
    s0: int | None
    cap: int
    complete: bool
    mismatches: list[int]


def high_filtration_report(chart: ExtChart, profile: FieldProfile) -> list[HighFiltrationColumn]:
    """Per column (t - s, w): the least s0 with sphere dims = oracle dims for s0 <= s <= cap.

    The oracle is HW on the Milnor-Witt degree 0 columns t - s = w != 0 and
    HZ~ elsewhere (the h0-tower in stem 0 is integral). A column is complete when every cell 0 <= s <= s_max lies in
    the window with a known dimension; s0 is None when even the top cell
    disagrees or is unknown.
    """
    win = chart.window
    out = []
    stems = range(win.t_min - win.s_max, win.t_max + 1)
    for stem, w in iproduct(stems, range(win.w_min, win.w_max + 1)):
        cells = []
        for s in range(0, win.s_max + 1):
            d = Tridegree(s, stem + s, w)
            cells.append((s, chart.dims.get(d) if win.contains(d) else None, win.contains(d)))
        inside = [c for c in cells if c[2]]
        if not inside:
            continue
        complete = all(c[2] and c[1] is not None for c in cells)
        cap = inside[-1][0]
        s0 = None
        mismatches = []
        for s, v, _ in reversed(inside):
            want = ext_oracle("HW" if stem == w != 0 else "HZ~", Tridegree(s, stem + s, w), profile)
            if v is None or v != want:
                if v is not None:
                    mismatches.append(s)
                break
            s0 = s
        out.append(HighFiltrationColumn(stem, w, s0, cap, complete, mismatches))
    return out


__all__ = [
    "BASIS",
    "BASIS_DEGREE",
    "LEFT_SQ1",
    "LEFT_Q",
    "AOneElement",
    "ExactnessFailure",
    "ExactnessReport",
    "ExactnessRow",
    "a1_multiply",
    "check_associativity",
    "graded_basis",
    "right_mult_matrix",
    "verify_ases",
    "verify_tom",
    "right_q_kernel_generators",
    "ext_oracle",
    "hz_dim",
    "bockstein_matrix",
    "h_mod_tau_dim",
    "high_filtration_report",
    "HighFiltrationColumn",
]
