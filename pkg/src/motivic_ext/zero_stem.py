"""Milnor-Witt K-theory in the zero line and its comparison with E-infinity.

K^MW_n = I^n x_{I^n/I^{n+1}} K^M_n carries the filtration F^0 = K^MW_n,
F^s = I^{n+s} + 2^s K^M_n for s > 0. Its quotients are compared with the
Milnor-Witt degree 0 line of the E-infinity page,

    E_inf^{s,(s-n,-n)} = k_{n+s} + 2^s K^M_n / 2^{s+1} K^M_n   (s > 0),

factor by factor: Pfister forms <<a_1,...,a_m>> against symbols
[a_1]...[a_m] in k_m, and 2-power Milnor layers against the h0 tower.
All arithmetic is driven by the profile's WittData; Z is carried as
Z/2^depth, so depth bounds the levels that can be checked exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .coefficients import FieldProfile, WittData


class WittDataMissing(ValueError):
    """The profile carries no Witt ring data."""


class DepthExceedsData(ValueError):
    """The requested depth exceeds the stored 2-adic truncation."""


def _witt(profile: FieldProfile) -> WittData:
    if profile.witt is None:
        raise WittDataMissing(f"profile {profile.name} has no Witt data")
    return profile.witt


def _max_depth(w: WittData, n: int) -> int:
    # I^{n+s+1} must still be resolved inside Z/2^depth
    return w.depth - 2 - max(n, 0)


def _ideal(w: WittData, m: int) -> frozenset[tuple[int, ...]]:
    return w.ideal(max(m, 0))


def _ideal_quotient_dim(w: WittData, m: int) -> int:
    if m < 0:
        # I^m = W for m <= 0; only the step from I^0 to I^1 is nontrivial
        return 0
    return w.quotient_dim(m)


@dataclass
class MilnorWittGroup:
    """K^MW_n with its filtration quotients to a given depth.

    ``ideal_dims[s]`` is dim I^{n+s}/I^{n+s+1} and ``milnor_dims[s]`` is
    dim 2^s K^M_n / 2^{s+1} K^M_n; level 0 is the pullback, whose quotient
    F^0/F^1 is K^M_n / 2 = k_n.
    """

    n: int
    depth: int
    ideal_dims: list[int]
    milnor_dims: list[int]
    milnor_factors: tuple[int, ...]
    pullback_generators: list[tuple[tuple[int, ...], tuple[int, ...]]] = field(default_factory=list)

    def quotient_dim(self, s: int) -> int:
        if s == 0:
            return self.milnor_dims[0]
        return self.ideal_dims[s] + self.milnor_dims[s]

    def quotient_dims(self) -> list[int]:
        return [self.quotient_dim(s) for s in range(self.depth)]


def mw_group(profile: FieldProfile, n: int, depth: int) -> MilnorWittGroup:
    """Filtration quotients of K^MW_n for s < depth."""
    w = _witt(profile)
    if depth > _max_depth(w, n):
        raise DepthExceedsData(f"depth {depth} exceeds the stored truncation ({_max_depth(w, n)})")
    ideal_dims = [_ideal_quotient_dim(w, n + s) for s in range(depth)]
    milnor_dims = [w.milnor_quotient_dim(n, s) for s in range(depth)]
    gens = _pullback_generators(w, n)
    return MilnorWittGroup(n, depth, ideal_dims, milnor_dims, w.milnor_factors(n), gens)


def _pullback_generators(w: WittData, n: int) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Pairs (Pfister form in I^n, symbol in k_n coordinates) for n <= 1.

    In degree 0 the pair is (<1>, 1); in degree 1 each square class gives
    (<<a>>, [a]). Higher degrees are covered by the diagonal check in
    ``pfister_symbol_mismatches``.
    """
    if n == 0:
        return [(w.one, (1,))]
    if n == 1:
        return [(pf, sym) for _, pf, sym in w.classes]
    return []


def pullback_violations(profile: FieldProfile, group: MilnorWittGroup) -> list[str]:
    """Generators whose two projections disagree in I^n/I^{n+1} = k_n."""
    w = _witt(profile)
    bad = []
    if group.n < 0:
        return bad
    top = _ideal(w, group.n)
    nxt = _ideal(w, group.n + 1)
    for x, y in group.pullback_generators:
        x = w.reduce(x)
        if x not in top:
            bad.append(f"{x} not in I^{group.n}")
            continue
        symbol_zero = not any(v % 2 for v in y)
        if (x in nxt) != symbol_zero:
            bad.append(f"pair ({x}, {y}) disagrees in I^{group.n}/I^{group.n + 1}")
    return bad


def pfister_symbol_mismatches(profile: FieldProfile, max_degree: int) -> list[tuple[str, int]]:
    """Square classes a and degrees m where <<a,...,a>> and rho^{m-1}[a] disagree.

    [a]^2 = [a][-1] in k_2, so the m-fold symbol of a is rho^{m-1}[a]; the
    m-fold Pfister form <<a>>^m is nonzero in I^m/I^{m+1} exactly when that
    symbol is nonzero in k_m.
    """
    w = _witt(profile)
    out = []
    for label, pf, sym in w.classes:
        form = w.reduce(pf)
        for m in range(1, max_degree + 1):
            if m > 1:
                form = w.multiply(form, w.reduce(pf))
            in_next = form in _ideal(w, m + 1)
            if form not in _ideal(w, m):
                out.append((label, m))
                continue
            if profile.k_dim(1) == 0 or not sym:
                symbol = np.zeros(profile.k_dim(m), dtype=np.int64)
            else:
                vec = np.array(sym, dtype=np.int64) % 2
                symbol = (profile.rho_power(1, m - 1).astype(np.int64) @ vec) % 2
            if in_next == bool(symbol.any()):
                out.append((label, m))
    return out


@dataclass
class EInftyCell:
    s: int
    t: int
    w: int
    k_part: int
    milnor_part: int

    @property
    def dim(self) -> int:
        return self.k_part + self.milnor_part


def einfty_mw0(profile: FieldProfile, n: int, depth: int) -> list[EInftyCell]:
    """E-infinity cells (s, s - n, -n), s < depth, on the MW-degree 0 line.

    s = 0 gives k_n; s > 0 gives k_{n+s} together with the h0-divisible layer
    2^s K^M_n / 2^{s+1} K^M_n.
    """
    w = _witt(profile)
    out = []
    for s in range(depth):
        if s == 0:
            out.append(EInftyCell(0, -n, -n, profile.k_dim(n), 0))
        else:
            out.append(EInftyCell(s, s - n, -n, profile.k_dim(n + s), _h0_layer(w, n, s)))
    return out


def _h0_layer(w: WittData, n: int, s: int) -> int:
    """log_2 |2^s K| / |2^{s+1} K| for K the 2-primary part of K^M_n, by group orders."""

    def log_order(k: int) -> int:
        # |2^k Z/2^e| = 2^{max(e - k, 0)}; Z is seen as Z/2^depth
        return sum(max((o.bit_length() - 1 if o else w.depth) - k, 0) for o in w.milnor_factors(n))

    return log_order(s) - log_order(s + 1)


@dataclass
class ZeroStemVerdict:
    field: str
    n: int
    depth: int
    accept: bool
    rows: list[tuple[int, int, int, int, int]]  # s, I-part, Milnor part, E_inf k part, E_inf Milnor part
    problems: list[str]

    def to_text(self) -> str:
        head = f"zero stem  field={self.field}  n={self.n}  depth={self.depth}  verdict={'Accept' if self.accept else 'Reject'}"
        lines = [head, "s\tF^s/F^s+1 (I, K^M)\tE_inf (k, K^M)"]
        for s, i, m, ek, em in self.rows:
            lines.append(f"{s}\t({i}, {m})\t({ek}, {em})")
        lines.extend(f"problem: {p}" for p in self.problems)
        return "\n".join(lines) + "\n"


def verify_zero_stem(profile: FieldProfile, n: int, depth: int) -> ZeroStemVerdict:
    """Match F^s/F^{s+1} of K^MW_n with E_inf^{s,(s-n,-n)} for 0 <= s < depth."""
    group = mw_group(profile, n, depth)
    cells = einfty_mw0(profile, n, depth)
    problems = pullback_violations(profile, group)
    rows = []
    for s, cell in enumerate(cells):
        if s == 0:
            i_part, m_part = group.milnor_dims[0], 0
            if i_part != cell.k_part:
                problems.append(f"s=0: K^M_{n}/2 has dim {i_part}, k_{n} has dim {cell.k_part}")
        else:
            i_part, m_part = group.ideal_dims[s], group.milnor_dims[s]
            if i_part != cell.k_part:
                problems.append(f"s={s}: I^{n + s}/I^{n + s + 1} has dim {i_part}, k_{n + s} has dim {cell.k_part}")
            if m_part != cell.milnor_part:
                problems.append(f"s={s}: Milnor layers differ ({m_part} vs {cell.milnor_part})")
        rows.append((s, i_part, m_part, cell.k_part, cell.milnor_part))
    if n >= 0:
        for label, m in pfister_symbol_mismatches(profile, min(n + depth, profile.degree_cap)):
            problems.append(f"Pfister form <<{label}>>^{m} and its symbol disagree")
    return ZeroStemVerdict(profile.name, n, depth, not problems, rows, problems)


def odd_prime_collapse(profile: FieldProfile, ell: int, levels: int = 4) -> bool:
    """(l^k, I^k) = W for k < levels, so the l-adic W-filtration quotients vanish."""
    w = _witt(profile)
    if ell % 2 == 0:
        raise ValueError("odd primes only")
    size = len(w.orders)
    units = [tuple(int(i == j) for j in range(size)) for i in range(size)]
    whole = w.subgroup(units)
    for k in range(levels):
        gens = [w.scale(ell**k, e) for e in units] + [w.multiply(g, e) for g in w.ideal_generators(k) for e in units]
        if w.subgroup(gens) != whole:
            return False
    return True


__all__ = [
    "DepthExceedsData",
    "EInftyCell",
    "MilnorWittGroup",
    "WittDataMissing",
    "ZeroStemVerdict",
    "einfty_mw0",
    "mw_group",
    "odd_prime_collapse",
    "pfister_symbol_mismatches",
    "pullback_violations",
    "verify_zero_stem",
]
