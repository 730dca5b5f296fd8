"""Base-field profiles: k_*, the rho-action, Bocksteins and Witt data.

A :class:`FieldProfile` stores mod-l Milnor K-theory k_* as explicit
per-degree bases together with the matrices of multiplication by rho, up
to a degree cap D.  Beyond the cap the module is continued by the
stability of rho-multiplication above the virtual cohomological dimension,
so downstream code can ask for any degree.  At odd l the profile instead
carries the two nonzero columns of H^{*,*} of a finite field together
with the Bockstein.

Convention on vcd: rho: k_m -> k_{m+1} is required to be an isomorphism
for m > vcd.  For finite fields (vcd = 1, k_2 = 0, rho != 0 when
q = 3 mod 4) the map k_1 -> k_2 is not injective, so the sharper bound
m >= vcd cannot be imposed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .gf2_linalg import PackedMatrix, rank

INF = None  # marker for an infinite vcd or nilpotence order


class ProfileInvalid(ValueError):
    """A profile violates one of the structural invariants."""


class DegreeOutOfRange(IndexError):
    pass


class VcdInfinite(ValueError):
    pass


# ---------------------------------------------------------------------------
# Witt data


@dataclass(frozen=True)
class WittData:
    """W(F) as a finite abelian group with ring structure and ideal chain.

    ``orders`` lists cyclic orders of the additive group; an order of 0
    means a copy of Z, which is carried as Z/2^depth.  ``mult[i][j]`` is
    the product of basis vectors i and j.  ``ideals[n]`` are generators of
    I^n for n = 0..len-1; beyond that I^{n+1} = 2 I^n.  ``classes`` maps a
    square-class label to the pair (1-fold Pfister form <<a>> in W,
    symbol [a] in k_1 coordinates).  ``milnor[n]`` lists the 2-primary
    cyclic factors of integral Milnor K-theory K^M_n (0 meaning Z);
    divisible and odd parts are dropped since they do not see 2-adic
    filtration quotients.
    """

    orders: tuple[int, ...]
    depth: int
    one: tuple[int, ...]
    mult: tuple[tuple[tuple[int, ...], ...], ...]
    ideals: tuple[tuple[tuple[int, ...], ...], ...]
    classes: tuple[tuple[str, tuple[int, ...], tuple[int, ...]], ...]
    milnor: tuple[tuple[int, ...], ...]

    @property
    def moduli(self) -> tuple[int, ...]:
        return tuple(o if o else 2**self.depth for o in self.orders)

    def reduce(self, v: Sequence[int]) -> tuple[int, ...]:
        return tuple(int(x) % m for x, m in zip(v, self.moduli))

    def add(self, u, v) -> tuple[int, ...]:
        return self.reduce([a + b for a, b in zip(u, v)])

    def scale(self, k: int, v) -> tuple[int, ...]:
        return self.reduce([k * a for a in v])

    def multiply(self, u, v) -> tuple[int, ...]:
        acc = [0] * len(self.orders)
        for i, a in enumerate(u):
            if not a:
                continue
            for j, b in enumerate(v):
                if not b:
                    continue
                for k, c in enumerate(self.mult[i][j]):
                    acc[k] += a * b * c
        return self.reduce(acc)

    def ideal_generators(self, n: int) -> list[tuple[int, ...]]:
        if n <= 0:
            return [self.one]
        if n < len(self.ideals):
            return [self.reduce(g) for g in self.ideals[n]]
        last = len(self.ideals) - 1
        gens = [self.reduce(g) for g in self.ideals[last]]
        return [self.scale(2 ** (n - last), g) for g in gens]

    def subgroup(self, gens: Iterable[Sequence[int]]) -> frozenset[tuple[int, ...]]:
        """All elements of the subgroup generated by ``gens`` (explicit BFS)."""
        zero = tuple(0 for _ in self.orders)
        seen = {zero}
        frontier = [zero]
        gens = [self.reduce(g) for g in gens]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = self.add(x, g)
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return frozenset(seen)

    def ideal(self, n: int) -> frozenset[tuple[int, ...]]:
        """I^n as the ring ideal generated by its listed generators."""
        size = len(self.orders)
        units = [tuple(int(i == j) for j in range(size)) for i in range(size)]
        gens = [self.multiply(g, e) for g in self.ideal_generators(n) for e in units]
        return self.subgroup(gens)

    def quotient_dim(self, n: int) -> int:
        """GF(2)-dimension of I^n / I^{n+1}."""
        big, small = len(self.ideal(n)), len(self.ideal(n + 1))
        ratio = Fraction(big, small)
        if ratio.denominator != 1 or (ratio.numerator & (ratio.numerator - 1)):
            raise ProfileInvalid(f"I^{n}/I^{n+1} is not an elementary 2-group")
        return ratio.numerator.bit_length() - 1

    def milnor_factors(self, n: int) -> tuple[int, ...]:
        if n < 0:
            return ()
        if n < len(self.milnor):
            return self.milnor[n]
        return self.milnor[-1]

    def milnor_quotient_dim(self, n: int, s: int) -> int:
        """dim 2^s K^M_n / 2^{s+1} K^M_n (Z counted as the 2-adic integers)."""
        dim = 0
        for o in self.milnor_factors(n):
            if o == 0:
                dim += 1
            elif o > 2**s:
                dim += 1
        return dim


# ---------------------------------------------------------------------------
# profiles


@dataclass(frozen=True, eq=False)
class FieldProfile:
    """A base field as seen by the motivic Adams spectral sequence.

    At l = 2 ``k_names[n]`` names a basis of k_n for 0 <= n <= degree_cap
    and ``rho[n]`` is the matrix of rho: k_n -> k_{n+1} with shape
    (dim k_{n+1}, dim k_n).  At odd l, ``h_dims`` gives dim H^{p,q} of the
    two nonzero columns p = 0, 1 for 0 <= q <= degree_cap (cohomological
    indexing) and ``beta[q]`` the Bockstein H^{0,q} -> H^{1,q}.
    """

    name: str
    ell: int
    characteristic: str
    vcd: int | None
    rho_nilpotence: int | None
    degree_cap: int
    k_names: tuple[tuple[str, ...], ...]
    rho: tuple[np.ndarray, ...]
    witt: WittData | None = None
    zeta_period: int | None = None
    h_dims: tuple[tuple[int, int], ...] = ()
    beta: tuple[np.ndarray, ...] = ()
    meta: tuple[tuple[str, str], ...] = field(default=(), compare=False)

    def __eq__(self, other):
        if not isinstance(other, FieldProfile):
            return NotImplemented
        return serialize_profile(self) == serialize_profile(other)

    def __hash__(self):
        return hash(serialize_profile(self))

    def __post_init__(self):
        for m in self.rho:
            m.setflags(write=False)
        for m in self.beta:
            m.setflags(write=False)

    # -- k_* with stable continuation -------------------------------------

    def k_dim(self, n: int) -> int:
        if n < 0:
            return 0
        if n <= self.degree_cap:
            return len(self.k_names[n])
        self._require_stable(n)
        return len(self.k_names[self.degree_cap])

    def _require_stable(self, n: int) -> None:
        if self.vcd is None or self.vcd >= self.degree_cap:
            raise DegreeOutOfRange(f"degree {n} beyond cap {self.degree_cap} and no stable range")

    def rho_matrix(self, n: int) -> np.ndarray:
        """rho: k_n -> k_{n+1}, shape (dim k_{n+1}, dim k_n)."""
        if n < 0:
            return np.zeros((self.k_dim(n + 1), 0), dtype=np.uint8)
        if n < self.degree_cap:
            return self.rho[n]
        self._require_stable(n)
        d = len(self.k_names[self.degree_cap])
        return np.eye(d, dtype=np.uint8)

    def rho_power(self, n: int, k: int) -> np.ndarray:
        """rho^k: k_n -> k_{n+k}."""
        m = np.eye(self.k_dim(n), dtype=np.int64)
        for j in range(k):
            m = (self.rho_matrix(n + j).astype(np.int64) @ m) % 2
        return m.astype(np.uint8)

    def k_basis(self, n: int) -> tuple[str, ...]:
        if n < 0:
            return ()
        if n <= self.degree_cap:
            return self.k_names[n]
        self._require_stable(n)
        top = self.k_names[self.degree_cap]
        return tuple(f"rho^{n - self.degree_cap}*{x}" for x in top)

    @property
    def is_real(self) -> bool:
        return self.ell == 2 and self.name == "R"

    def top_degree(self) -> int | None:
        """Largest n with k_n != 0, or None when k_* is unbounded."""
        if self.ell != 2:
            return 1
        if self.vcd is not None and self.vcd < self.degree_cap:
            if self.k_dim(self.degree_cap) > 0:
                return None
        top = -1
        for n in range(self.degree_cap + 1):
            if self.k_names[n]:
                top = n
        return top

    # -- odd primes ---------------------------------------------------------

    def h_dim(self, p: int, q: int) -> int:
        """dim H^{p,q} (cohomological indexing) for an odd-l profile."""
        if self.ell == 2:
            raise ValueError("h_dim is for odd l; use h_basis at l = 2")
        if p not in (0, 1) or q < 0 or p > q:
            return 0
        if q > self.degree_cap:
            raise DegreeOutOfRange(f"weight {q} beyond cap {self.degree_cap}")
        return self.h_dims[q][p]

    def beta_matrix(self, q: int) -> np.ndarray:
        """Bockstein H^{0,q} -> H^{1,q} at odd l."""
        if q < 0:
            return np.zeros((0, 0), dtype=np.uint8)
        if q > self.degree_cap:
            raise DegreeOutOfRange(f"weight {q} beyond cap {self.degree_cap}")
        return self.beta[q]


# ---------------------------------------------------------------------------
# operations


def rho_mult(p: FieldProfile, n: int) -> tuple[np.ndarray, bool, bool]:
    """The stored rho: k_n -> k_{n+1} with (injective, surjective) flags."""
    if p.ell != 2:
        raise ValueError("rho is a class in k_1 at l = 2")
    if n < 0 or n >= p.degree_cap:
        raise DegreeOutOfRange(f"rho_mult needs 0 <= n < {p.degree_cap}")
    m = p.rho_matrix(n)
    r = rank(PackedMatrix.from_dense(m)) if m.size else 0
    return m, r == m.shape[1], r == m.shape[0]


@dataclass(frozen=True)
class HBasisElement:
    """A basis element of H_{t,w}: k-part times a power of tau (or zeta at odd l)."""

    k_degree: int
    k_index: int
    tau_power: int
    name: str


def h_basis(p: FieldProfile, t: int, w: int) -> list[HBasisElement]:
    """Basis of H_{t,w} in homological indexing.

    At l = 2, H = k_*[tau] with k_n in (-n,-n) and tau in (0,-1), so the
    basis is k_{-t} * tau^(t - w).  At odd l the two columns come from the
    profile tables.
    """
    if p.ell == 2:
        n = -t
        a = t - w
        if n < 0 or a < 0:
            return []
        tau = "" if a == 0 else ("tau" if a == 1 else f"tau^{a}")
        out = []
        for i, name in enumerate(p.k_basis(n)):
            parts = [x for x in (name if name != "1" else "", tau) if x]
            out.append(HBasisElement(n, i, a, "*".join(parts) or "1"))
        return out
    pp, q = -t, -w
    d = p.h_dim(pp, q) if 0 <= q <= p.degree_cap else 0
    return [HBasisElement(pp, i, q, f"h{pp},{q}_{i}") for i in range(d)]


@dataclass(frozen=True)
class CokernelModule:
    """C = coker(Z/2[rho] (x) k_v -> k_*) with its free two-term resolution."""

    vcd: int
    dims: tuple[int, ...]
    generators: tuple[int, ...]
    relations: tuple[int, ...]
    relation_matrix: np.ndarray

    def dim(self, k: int) -> int:
        return self.dims[k] if 0 <= k < len(self.dims) else 0


def _free_dims(gen_degrees: Sequence[int], k: int) -> int:
    return sum(1 for g in gen_degrees if g <= k)


def cokernel_C(p: FieldProfile, n: int | None = None) -> CokernelModule:
    """Cokernel of Z/2[rho] (x) k_n -> k_* (n = vcd by default), with generators and relations.

    The generators I are a minimal generating set of C as a Z/2[rho]-module
    and the relations J generate the kernel of Z/2[rho]{I} -> C; both are
    found degree by degree with rank computations, and exactness of
    0 -> Z/2[rho]{J} -> Z/2[rho]{I} -> C -> 0 is verified before returning.
    """
    if p.ell != 2:
        raise ValueError("the cokernel module is defined at l = 2")
    if p.vcd is None:
        raise VcdInfinite("cokernel_C needs a finite vcd")
    v = p.vcd if n is None else n
    top = v + 2
    # C_k = k_k / image of rho^{k-v} k_v (zero image for k < v)
    quot: list[np.ndarray] = []  # projection k_k -> C_k as a matrix
    dims = []
    for k in range(top + 1):
        dk = p.k_dim(k)
        if k >= v:
            img = p.rho_power(v, k - v)
        else:
            img = np.zeros((dk, 0), dtype=np.uint8)
        proj = _complement_projection(img, dk)
        quot.append(proj)
        dims.append(proj.shape[0])
    # generators: degree by degree, add classes of C_k not reached by rho C_{k-1}
    gens: list[tuple[int, np.ndarray]] = []  # (degree, vector in k_deg)
    for k in range(top + 1):
        reach = _span_of_free(p, gens, k)
        proj_reach = (quot[k].astype(np.int64) @ reach) % 2 if reach.size else np.zeros((dims[k], 0))
        have = _rank(proj_reach)
        for i in range(p.k_dim(k)):
            e = np.zeros((p.k_dim(k), 1), dtype=np.int64)
            e[i, 0] = 1
            cand = np.concatenate([proj_reach, (quot[k].astype(np.int64) @ e) % 2], axis=1)
            if _rank(cand) > have:
                gens.append((k, e[:, 0].astype(np.uint8)))
                proj_reach, have = cand, have + 1
    # relations: kernel of Z/2[rho]{I}_k -> C_k not generated by rho-multiples of earlier ones
    rels: list[tuple[int, np.ndarray]] = []  # (degree, coefficient vector over I in that degree)
    for k in range(top + 2):
        free = [(g, vec) for g, vec in gens if g <= k]
        if k > top:
            break
        cols = []
        for g, vec in free:
            img = (p.rho_power(g, k - g).astype(np.int64) @ vec.astype(np.int64)) % 2
            cols.append((quot[k].astype(np.int64) @ img) % 2)
        mat = np.stack(cols, axis=1) if cols else np.zeros((dims[k], 0), dtype=np.int64)
        ker = _kernel(mat)
        # rho-multiples of earlier relations, expressed on the degree-k basis of the free module
        prev = [_shift_relation(r, g0, k, gens) for g0, r in rels]
        prev_mat = np.stack(prev, axis=1) if prev else np.zeros((len(free), 0), dtype=np.int64)
        have = _rank(prev_mat)
        for vec in ker:
            cand = np.concatenate([prev_mat, vec.reshape(-1, 1)], axis=1)
            if _rank(cand) > have:
                rels.append((k, vec))
                prev_mat, have = cand, have + 1
    gen_deg = tuple(g for g, _ in gens)
    rel_deg = tuple(g for g, _ in rels)
    relmat = np.zeros((len(gens), len(rels)), dtype=np.uint8)
    for j, (g0, r) in enumerate(rels):
        relmat[: len(r), j] = r
    mod = CokernelModule(v, tuple(dims), gen_deg, rel_deg, relmat)
    _check_resolution(mod, p, gens, rels, quot, top)
    return mod


def _shift_relation(r: np.ndarray, g0: int, k: int, gens) -> np.ndarray:
    """rho^{k-g0} times a relation: same coefficients over generators present in degree k."""
    n_k = sum(1 for g, _ in gens if g <= k)
    out = np.zeros(n_k, dtype=np.int64)
    out[: len(r)] = r
    return out


def _check_resolution(mod, p, gens, rels, quot, top) -> None:
    """dim C_k = |I <= k| - |J <= k| in every degree checked (exactness count)."""
    for k in range(top + 1):
        free_i = _free_dims(mod.generators, k)
        free_j = _free_dims(mod.relations, k)
        if free_i - free_j != mod.dim(k):
            raise ProfileInvalid(f"resolution of C not exact in degree {k}")
    if any(d for d in mod.dims[mod.vcd + 1 :]):
        raise ProfileInvalid("C_k != 0 for some k > vcd")


def _span_of_free(p: FieldProfile, gens, k: int) -> np.ndarray:
    cols = []
    for g, vec in gens:
        if g <= k:
            cols.append((p.rho_power(g, k - g).astype(np.int64) @ vec.astype(np.int64)) % 2)
    if not cols:
        return np.zeros((p.k_dim(k), 0), dtype=np.int64)
    return np.stack(cols, axis=1)


def _rank(m: np.ndarray) -> int:
    if m.size == 0:
        return 0
    return rank(PackedMatrix.from_dense(np.asarray(m) % 2))


def _kernel(m: np.ndarray) -> list[np.ndarray]:
    from .gf2_linalg import kernel_basis

    if m.shape[1] == 0:
        return []
    if m.shape[0] == 0:
        return [np.eye(m.shape[1], dtype=np.int64)[i] for i in range(m.shape[1])]
    return [row.astype(np.int64) for row in kernel_basis(PackedMatrix.from_dense(m % 2))]


def _complement_projection(img: np.ndarray, dim: int) -> np.ndarray:
    """A surjection GF(2)^dim -> GF(2)^dim / span(img) as a matrix."""
    if dim == 0:
        return np.zeros((0, 0), dtype=np.uint8)
    r = _rank(img) if img.size else 0
    if r == 0:
        return np.eye(dim, dtype=np.uint8)
    # coordinates on a complement: pick unit vectors extending img to a basis
    chosen = []
    acc = img.astype(np.int64) % 2
    for i in range(dim):
        e = np.zeros((dim, 1), dtype=np.int64)
        e[i, 0] = 1
        cand = np.concatenate([acc, e], axis=1)
        if _rank(cand) > _rank(acc):
            acc = cand
            chosen.append(i)
    # basis change: columns [img basis | chosen units] is invertible; the
    # projection reads off the chosen coordinates
    from .gf2_linalg import image_basis

    basis = image_basis(PackedMatrix.from_dense(img % 2)).T.astype(np.int64)
    full = np.concatenate([basis, np.eye(dim, dtype=np.int64)[:, chosen]], axis=1)
    inv = _inverse_gf2(full)
    return (inv[basis.shape[1] :] % 2).astype(np.uint8)


def _inverse_gf2(m: np.ndarray) -> np.ndarray:
    n = m.shape[0]
    aug = np.concatenate([m % 2, np.eye(n, dtype=np.int64)], axis=1).astype(np.int64)
    r = 0
    for c in range(n):
        piv = next(i for i in range(r, n) if aug[i, c])
        aug[[r, piv]] = aug[[piv, r]]
        for i in range(n):
            if i != r and aug[i, c]:
                aug[i] ^= aug[r]
        r += 1
    return aug[:, n:]


# ---------------------------------------------------------------------------
# validation


def validate(p: FieldProfile) -> FieldProfile:
    """Check the structural invariants; raises ProfileInvalid naming the failure."""
    if p.ell == 2:
        if len(p.k_names) != p.degree_cap + 1:
            raise ProfileInvalid("k_basis must list degrees 0..degree_cap")
        if len(p.rho) != p.degree_cap:
            raise ProfileInvalid("rho must list degrees 0..degree_cap-1")
        for n, m in enumerate(p.rho):
            if m.shape != (len(p.k_names[n + 1]), len(p.k_names[n])):
                raise ProfileInvalid(f"rho matrix in degree {n} has the wrong shape")
            if m.size and int(m.max()) > 1:
                raise ProfileInvalid(f"rho matrix in degree {n} is not over GF(2)")
        if p.vcd is not None:
            for n in range(p.vcd + 1, p.degree_cap):
                m = p.rho[n]
                if m.shape[0] != m.shape[1] or _rank(m) != m.shape[0]:
                    raise ProfileInvalid(f"rho is not an isomorphism in degree {n} above vcd")
        if p.rho_nilpotence is not None:
            n = p.rho_nilpotence
            one = _unit_vector(p)
            if n - 1 <= p.degree_cap and n >= 1:
                before = (p.rho_power(0, n - 1).astype(np.int64) @ one) % 2
                if not before.any():
                    raise ProfileInvalid(f"rho^{n - 1} = 0 contradicts rho_nilpotence {n}")
            if n <= p.degree_cap:
                after = (p.rho_power(0, n).astype(np.int64) @ one) % 2
                if after.any():
                    raise ProfileInvalid(f"rho^{n} != 0 contradicts rho_nilpotence {n}")
        elif p.degree_cap >= 1:
            one = _unit_vector(p)
            if not ((p.rho_power(0, p.degree_cap).astype(np.int64) @ one) % 2).any():
                raise ProfileInvalid("rho is nilpotent within the cap but declared non-nilpotent")
        if p.witt is not None:
            w = p.witt
            for n in range(min(p.degree_cap, w.depth - 2) + 1):
                if w.quotient_dim(n) != p.k_dim(n):
                    raise ProfileInvalid(f"dim I^{n}/I^{n+1} != dim k_{n}")
                if not w.ideal(n + 1) <= w.ideal(n):
                    raise ProfileInvalid(f"I^{n + 1} is not contained in I^{n}")
                if p.vcd is not None and n > p.vcd:
                    twice = {w.scale(2, x) for x in w.ideal(n)}
                    if not twice <= w.ideal(n + 1):
                        raise ProfileInvalid(f"2 I^{n} is not inside I^{n + 1}")
    else:
        if len(p.h_dims) != p.degree_cap + 1 or len(p.beta) != p.degree_cap + 1:
            raise ProfileInvalid("odd-l tables must list weights 0..degree_cap")
        for q, (d0, d1) in enumerate(p.h_dims):
            if q == 0 and d1:
                raise ProfileInvalid("H^{1,0} must vanish (p > q)")
            if p.beta[q].shape != (d1, d0):
                raise ProfileInvalid(f"Bockstein in weight {q} has the wrong shape")
            if p.zeta_period and q + p.zeta_period <= p.degree_cap:
                if p.h_dims[q + p.zeta_period] != (d0, d1) and q > 0:
                    raise ProfileInvalid("zeta-periodicity of H violated")
    return p


def _unit_vector(p: FieldProfile) -> np.ndarray:
    if p.k_dim(0) != 1:
        raise ProfileInvalid("k_0 must be one-dimensional")
    return np.array([1], dtype=np.int64)


# ---------------------------------------------------------------------------
# built-in profiles


def _rho_line(cap: int) -> tuple[tuple[tuple[str, ...], ...], tuple[np.ndarray, ...]]:
    names = tuple((("1",) if n == 0 else ((f"rho^{n}" if n > 1 else "rho"),)) for n in range(cap + 1))
    rho = tuple(np.ones((1, 1), dtype=np.uint8) for _ in range(cap))
    return names, rho


def _truncated(names_by_degree: list[list[str]], rho_maps: dict[int, np.ndarray], cap: int):
    names = tuple(tuple(names_by_degree[n]) if n < len(names_by_degree) else () for n in range(cap + 1))
    rho = []
    for n in range(cap):
        shape = (len(names[n + 1]), len(names[n]))
        m = rho_maps.get(n)
        rho.append(np.zeros(shape, dtype=np.uint8) if m is None else np.asarray(m, dtype=np.uint8).reshape(shape))
    return names, tuple(rho)


def witt_complex(depth: int = 16) -> WittData:
    return WittData(
        orders=(2,),
        depth=depth,
        one=(1,),
        mult=(((1,),),),
        ideals=(((1,),), ((0,),)),
        classes=(("1", (0,), ()),),
        milnor=((0,), ()),
    )


def witt_real(depth: int = 16) -> WittData:
    # W(R) = Z by the signature; <<-1>> = <1,1> has signature 2
    return WittData(
        orders=(0,),
        depth=depth,
        one=(1,),
        mult=(((1,),),),
        ideals=(((1,),), ((2,),)),
        classes=(("1", (0,), (0,)), ("-1", (2,), (1,))),
        milnor=((0,), (2,)),
    )


def _is_square_mod(a: int, p: int) -> bool:
    return pow(a % p, (p - 1) // 2, p) == 1


def _two_adic_valuation(n: int) -> int:
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    return v


def witt_finite_field(q: int, depth: int = 16) -> WittData:
    """W(F_q) from the square classes of F_q (q an odd prime)."""
    nu = _two_adic_valuation(q - 1)
    milnor = ((0,), (2**nu,), ())
    if q % 4 == 3:
        # -1 is a nonsquare; <1,1> is anisotropic and W = Z/4 generated by <1>
        return WittData(
            orders=(4,),
            depth=depth,
            one=(1,),
            mult=(((1,),),),
            ideals=(((1,),), ((2,),), ((0,),)),
            classes=(("1", (0,), (0,)), ("-1", (2,), (1,))),
            milnor=milnor,
        )
    # q = 1 mod 4: W = Z/2[C_2] with basis <1>, <u> for a nonsquare u
    u = next(a for a in range(2, q) if not _is_square_mod(a, q))
    return WittData(
        orders=(2, 2),
        depth=depth,
        one=(1, 0),
        mult=(((1, 0), (0, 1)), ((0, 1), (1, 0))),
        ideals=(((1, 0), (0, 1)), ((1, 1),), ((0, 0),)),
        classes=(("1", (0, 0), (0,)), (str(u), (1, 1), (1,))),
        milnor=milnor,
    )


def profile_complex(cap: int = 16) -> FieldProfile:
    names, rho = _truncated([["1"]], {}, cap)
    return validate(
        FieldProfile("C", 2, "0", 0, 1, cap, names, rho, witt=witt_complex())
    )


def profile_real(cap: int = 16) -> FieldProfile:
    names, rho = _rho_line(cap)
    return validate(FieldProfile("R", 2, "0", 0, INF, cap, names, rho, witt=witt_real()))


def milnor_k_mod2_finite_field(q: int) -> dict:
    """Brute-force k_*(F_q) for an odd prime q from square classes.

    k_1 = F_q^x / squares is one-dimensional.  A symbol {a, b} vanishes in
    k_2 as soon as the norm form <1, -a> represents b; searching for
    a with a and 1 - a both nonsquares and applying the Steinberg relation
    {a, 1 - a} = 0 shows k_2 = 0.
    """
    squares = {x * x % q for x in range(1, q)}
    minus_one_square = (q - 1) in squares
    nonsq = [a for a in range(1, q) if a not in squares]
    witness = next((a for a in nonsq if (1 - a) % q in nonsq), None)
    return {
        "k1_dim": 1,
        "rho_nonzero": not minus_one_square,
        "k2_dim": 0 if witness is not None else None,
        "steinberg_witness": witness,
        "nonsquare": nonsq[0],
    }


def profile_finite_field(q: int, cap: int = 16) -> FieldProfile:
    if q % 2 == 0 or q < 3 or any(q % d == 0 for d in range(2, int(q**0.5) + 1)):
        raise ProfileInvalid("built-in finite fields are F_q for an odd prime q")
    info = milnor_k_mod2_finite_field(q)
    if info["k2_dim"] != 0:
        raise ProfileInvalid("could not certify k_2(F_q) = 0")
    rho_nz = info["rho_nonzero"]
    k1 = "rho" if rho_nz else f"[{info['nonsquare']}]"
    names, rho = _truncated([["1"], [k1]], {0: [[1 if rho_nz else 0]]}, cap)
    return validate(
        FieldProfile(
            f"F_{q}",
            2,
            str(q),
            1,
            2 if rho_nz else 1,
            cap,
            names,
            rho,
            witt=witt_finite_field(q),
        )
    )


def profile_rho_nilpotent(n: int, extra_degree: int | None = None, cap: int = 16) -> FieldProfile:
    """Synthetic k_* = Z/2[rho]/rho^n, optionally with one extra rho-torsion class.

    Models a field in which -1 is a sum of 2^n squares but not of 2^(n-1)
    squares, truncated to its rho-line.  The vcd recorded is n - 1, the
    smallest value compatible with rho being an isomorphism above vcd.
    """
    if n < 1:
        raise ValueError("nilpotence order must be positive")
    degrees: list[list[str]] = [[("1" if j == 0 else ("rho" if j == 1 else f"rho^{j}"))] for j in range(n)]
    maps: dict[int, np.ndarray] = {}
    for j in range(n - 1):
        maps[j] = np.array([[1]])
    vcd = n - 1
    if extra_degree is not None:
        while len(degrees) <= extra_degree:
            degrees.append([])
        degrees[extra_degree] = degrees[extra_degree] + [f"x{extra_degree}"]
        vcd = max(vcd, extra_degree)
        for j in range(len(degrees) - 1):
            src, dst = len(degrees[j]), len(degrees[j + 1])
            m = np.zeros((dst, src), dtype=np.uint8)
            if j < n - 1:
                m[0, 0] = 1
            maps[j] = m
    names, rho = _truncated(degrees, maps, cap)
    return validate(FieldProfile(f"rho-nil-{n}", 2, "0", vcd, n, cap, names, rho))


def profile_rationals(primes: Sequence[int] = (2, 3, 5), cap: int = 16) -> FieldProfile:
    """A finite truncation of k_*(Q), with the sub-basis chosen by ``primes``.

    k_1 keeps rho = [-1] and the symbols [p] for the listed primes.  k_2
    keeps rho^2 and, for each listed odd prime p, the class e_p detected
    by the tame symbol at p alone; rho [p] = e_p when p = 3 mod 4 and 0
    otherwise, and rho [2] = 0 since 2 is a sum of two squares.  From
    degree 3 on k_n is the rho-line, and rho kills every e_p because those
    classes have trivial real signature.  The truncation is a sub-module,
    so dimensions computed from it are exact for that sub-module.
    """
    primes = tuple(sorted(set(primes)))
    odd = [p for p in primes if p != 2]
    k1 = ["rho"] + [f"[{p}]" for p in primes]
    k2 = ["rho^2"] + [f"e{p}" for p in odd]
    degrees = [["1"], k1, k2] + [[f"rho^{n}"] for n in range(3, cap + 1)]
    r0 = np.zeros((len(k1), 1), dtype=np.uint8)
    r0[0, 0] = 1
    r1 = np.zeros((len(k2), len(k1)), dtype=np.uint8)
    r1[0, 0] = 1
    for j, p in enumerate(primes):
        if p % 4 == 3:
            r1[1 + odd.index(p), 1 + j] = 1
    r2 = np.zeros((1, len(k2)), dtype=np.uint8)
    r2[0, 0] = 1
    maps = {0: r0, 1: r1, 2: r2}
    for n in range(3, cap):
        maps[n] = np.ones((1, 1), dtype=np.uint8)
    names, rho = _truncated(degrees, maps, cap)
    return validate(
        FieldProfile(
            "Q", 2, "0", 2, INF, cap, names, rho, meta=(("primes", _vec(primes)),)
        )
    )


def multiplicative_order(q: int, ell: int) -> int:
    d, x = 1, q % ell
    while x != 1:
        x = x * q % ell
        d += 1
    return d


def ell_adic_valuation(n: int, ell: int) -> int:
    v = 0
    while n % ell == 0:
        n //= ell
        v += 1
    return v


def profile_finite_field_odd(q: int, ell: int, cap: int | None = None) -> FieldProfile:
    """H^{*,*}(F_q; Z/l) for an odd prime l not dividing q.

    H^{0,w} = H^0(F_q, mu_l^w) is Z/l exactly when l | q^w - 1, i.e. when
    the order d of q mod l divides w; likewise H^{1,w} for w >= 1.  The
    Bockstein H^{0,w} -> H^{1,w} is nonzero exactly when l^2 does not
    divide q^w - 1.
    """
    if q % ell == 0:
        raise ProfileInvalid("l must be prime to the characteristic")
    d = multiplicative_order(q, ell)
    cap = cap if cap is not None else 2 * ell * d
    h = []
    beta = []
    for w in range(cap + 1):
        live = w % d == 0
        d0 = 1 if live else 0
        d1 = 1 if (live and w >= 1) else 0
        h.append((d0, d1))
        if d0 and d1 and ell_adic_valuation(q**w - 1, ell) == 1:
            beta.append(np.ones((1, 1), dtype=np.uint8))
        else:
            beta.append(np.zeros((d1, d0), dtype=np.uint8))
    k_names = (("1",), (("u",) if d == 1 else ())) + ((),) * (cap - 1)
    return validate(
        FieldProfile(
            f"F_{q}@{ell}",
            ell,
            str(q),
            1,
            INF,
            cap,
            k_names,
            (),
            zeta_period=d,
            h_dims=tuple(h),
            beta=tuple(beta),
        )
    )


def builtin(name: str, cap: int = 16) -> FieldProfile:
    """Look up a built-in profile: "C", "R", "F_q" (q odd prime) or "F_q@l"."""
    if name == "C":
        return profile_complex(cap)
    if name == "R":
        return profile_real(cap)
    if name.startswith("F_"):
        body = name[2:]
        if "@" in body:
            q, ell = body.split("@")
            return profile_finite_field_odd(int(q), int(ell))
        return profile_finite_field(int(body), cap)
    if name == "Q":
        return profile_rationals(cap=cap)
    if name.startswith("rho-nil-"):
        return profile_rho_nilpotent(int(name[len("rho-nil-") :]), cap=cap)
    raise KeyError(f"unknown built-in profile {name!r}")


# ---------------------------------------------------------------------------
# text format


def _fmt_opt(x: int | None) -> str:
    return "inf" if x is None else str(x)


def _parse_opt(s: str) -> int | None:
    s = s.strip()
    return None if s in ("inf", "oo", "") else int(s)


def _vec(v: Sequence[int]) -> str:
    return ",".join(str(int(x)) for x in v)


def _unvec(s: str) -> tuple[int, ...]:
    s = s.strip()
    return tuple(int(x) for x in s.split(",")) if s else ()


def _matrix_line(m: np.ndarray) -> str:
    if m.shape[0] == 0 or m.shape[1] == 0:
        return ""
    return " ".join("".join(str(int(x)) for x in row) for row in m)


def _parse_matrix(text: str, rows: int, cols: int) -> np.ndarray:
    toks = text.split()
    if rows == 0 or cols == 0:
        if toks:
            raise ProfileInvalid("matrix entries given for an empty map")
        return np.zeros((rows, cols), dtype=np.uint8)
    if len(toks) != rows or any(len(t) != cols or set(t) - {"0", "1"} for t in toks):
        raise ProfileInvalid(f"expected {rows} rows of {cols} binary digits, got {text!r}")
    return np.array([[int(c) for c in t] for t in toks], dtype=np.uint8)


def serialize_profile(p: FieldProfile) -> str:
    lines = ["[meta]"]
    lines.append(f"name = {p.name}")
    lines.append(f"ell = {p.ell}")
    lines.append(f"characteristic = {p.characteristic}")
    lines.append(f"vcd = {_fmt_opt(p.vcd)}")
    lines.append(f"rho_nilpotence = {_fmt_opt(p.rho_nilpotence)}")
    lines.append(f"degree_cap = {p.degree_cap}")
    if p.zeta_period is not None:
        lines.append(f"zeta_period = {p.zeta_period}")
    lines.append("[k_basis]")
    for n, names in enumerate(p.k_names):
        lines.append(f"{n}: {' '.join(names)}".rstrip())
    if p.ell == 2:
        lines.append("[rho]")
        for n, m in enumerate(p.rho):
            lines.append(f"{n}: {_matrix_line(m)}".rstrip())
    if p.witt is not None:
        w = p.witt
        lines.append("[witt]")
        lines.append(f"orders = {_vec(w.orders)}")
        lines.append(f"depth = {w.depth}")
        lines.append(f"one = {_vec(w.one)}")
        for i, row in enumerate(w.mult):
            for j, v in enumerate(row):
                lines.append(f"mult {i} {j} = {_vec(v)}")
        for n, gens in enumerate(w.ideals):
            lines.append(f"ideal {n} = {'; '.join(_vec(g) for g in gens)}")
        for label, pf, sym in w.classes:
            lines.append(f"class {label} = {_vec(pf)} | {_vec(sym)}")
        for n, fac in enumerate(w.milnor):
            lines.append(f"milnor {n} = {_vec(fac)}")
    if p.ell != 2:
        lines.append("[beta]")
        for q, ((d0, d1), m) in enumerate(zip(p.h_dims, p.beta)):
            lines.append(f"{q}: {d0} {d1} | {_matrix_line(m)}".rstrip())
    return "\n".join(lines) + "\n"


def load_profile(text: str) -> FieldProfile:
    """Parse the sectioned profile format and validate every invariant."""
    sections: dict[str, list[str]] = {}
    current = None
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip()
            sections.setdefault(current, [])
            continue
        if current is None:
            raise ProfileInvalid("content before the first section")
        sections[current].append(line)
    if "meta" not in sections or "k_basis" not in sections:
        raise ProfileInvalid("profile needs [meta] and [k_basis]")
    meta: dict[str, str] = {}
    for line in sections["meta"]:
        key, _, val = line.partition("=")
        meta[key.strip()] = val.strip()
    try:
        ell = int(meta["ell"])
        cap = int(meta["degree_cap"])
    except KeyError as exc:
        raise ProfileInvalid(f"missing meta key {exc}") from None
    k_names: list[tuple[str, ...]] = [()] * (cap + 1)
    for line in sections["k_basis"]:
        key, _, val = line.partition(":")
        n = int(key)
        if n > cap:
            raise ProfileInvalid("k_basis degree beyond degree_cap")
        k_names[n] = tuple(val.split())
    rho: list[np.ndarray] = []
    if ell == 2:
        rows = {int(k): v for k, _, v in (ln.partition(":") for ln in sections.get("rho", []))}
        for n in range(cap):
            rho.append(_parse_matrix(rows.get(n, ""), len(k_names[n + 1]), len(k_names[n])))
    witt = None
    if "witt" in sections:
        witt = _parse_witt(sections["witt"])
    h_dims: list[tuple[int, int]] = []
    beta: list[np.ndarray] = []
    if ell != 2:
        for line in sections.get("beta", []):
            key, _, val = line.partition(":")
            dims, _, mat = val.partition("|")
            d0, d1 = (int(x) for x in dims.split())
            h_dims.append((d0, d1))
            beta.append(_parse_matrix(mat, d1, d0))
    p = FieldProfile(
        meta.get("name", "custom"),
        ell,
        meta.get("characteristic", "0"),
        _parse_opt(meta.get("vcd", "inf")),
        _parse_opt(meta.get("rho_nilpotence", "inf")),
        cap,
        tuple(k_names),
        tuple(rho),
        witt=witt,
        zeta_period=int(meta["zeta_period"]) if "zeta_period" in meta else None,
        h_dims=tuple(h_dims),
        beta=tuple(beta),
    )
    return validate(p)


def _parse_witt(lines: list[str]) -> WittData:
    orders: tuple[int, ...] = ()
    depth = 16
    one: tuple[int, ...] = ()
    mult: dict[tuple[int, int], tuple[int, ...]] = {}
    ideals: dict[int, tuple[tuple[int, ...], ...]] = {}
    classes = []
    milnor: dict[int, tuple[int, ...]] = {}
    for line in lines:
        key, _, val = line.partition("=")
        words = key.split()
        if words[0] == "orders":
            orders = _unvec(val)
        elif words[0] == "depth":
            depth = int(val)
        elif words[0] == "one":
            one = _unvec(val)
        elif words[0] == "mult":
            mult[(int(words[1]), int(words[2]))] = _unvec(val)
        elif words[0] == "ideal":
            ideals[int(words[1])] = tuple(_unvec(g) for g in val.split(";"))
        elif words[0] == "class":
            pf, _, sym = val.partition("|")
            classes.append((words[1], _unvec(pf), _unvec(sym)))
        elif words[0] == "milnor":
            milnor[int(words[1])] = _unvec(val)
        else:
            raise ProfileInvalid(f"unknown witt key {words[0]!r}")
    n = len(orders)
    mult_t = tuple(tuple(mult.get((i, j), (0,) * n) for j in range(n)) for i in range(n))
    return WittData(
        orders,
        depth,
        one,
        mult_t,
        tuple(ideals[k] for k in sorted(ideals)),
        tuple(classes),
        tuple(milnor[k] for k in sorted(milnor)),
    )


__all__ = [
    "FieldProfile",
    "WittData",
    "CokernelModule",
    "HBasisElement",
    "ProfileInvalid",
    "DegreeOutOfRange",
    "VcdInfinite",
    "rho_mult",
    "h_basis",
    "cokernel_C",
    "validate",
    "builtin",
    "profile_complex",
    "profile_real",
    "profile_finite_field",
    "profile_finite_field_odd",
    "profile_rho_nilpotent",
    "milnor_k_mod2_finite_field",
    "witt_complex",
    "witt_real",
    "witt_finite_field",
    "serialize_profile",
    "load_profile",
    "multiplicative_order",
    "ell_adic_valuation",
    "profile_rationals",
]
