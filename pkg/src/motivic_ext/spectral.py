"""Spectral-sequence machinery and convergence diagnostics.

* the generalized Bockstein E1 page at odd l (filtration by powers of the
  ideal generated by the image of the Bockstein),
* the Adams E2 page of HZ as ker(beta)/im(beta),
* towers of finite l-groups with Mittag-Leffler diagnostics,
* exponent bounds for stable stems and a per-column convergence report.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product as iproduct
from typing import Sequence

import numpy as np

from .classical import ExtTopTable, MissingTopTable, load_ext_top
from .cobar import ExtChart, ExtClass, Tridegree, Window
from .coefficients import FieldProfile, VcdInfinite
from .finite_subalgebra import ext_oracle, hz_dim
from .gf2_linalg import PackedMatrix, rank


class NonIncreasingSequence(ValueError):
    """The k_j sequence of a tower decreases somewhere (or has a term below 1)."""


class OutsideValidityRegion(ValueError):
    """An exponent bound was requested outside the region where it is proved."""


class MissingProductData(NotImplementedError):
    """The profile does not determine the products needed for B^n H."""


# ---------------------------------------------------------------------------
# generalized Bockstein E1 at odd l


@dataclass
class BocksteinPage:
    """Cells (s, t, w, n) -> dimension over GF(l); d_r has degree (1, 0, 0, r)."""

    r: int
    ell: int
    window: Window
    cells: dict[tuple[int, int, int, int], int] = field(default_factory=dict)

    def dim(self, s: int, t: int, w: int, n: int) -> int:
        return self.cells.get((s, t, w, n), 0)

    def total(self, s: int, t: int, w: int) -> int:
        return sum(v for (a, b, c, _), v in self.cells.items() if (a, b, c) == (s, t, w))

    def to_tsv(self) -> str:
        lines = ["s\tt\tw\tn\tdim"]
        for (s, t, w, n), v in sorted(self.cells.items()):
            lines.append(f"{s}\t{t}\t{w}\t{n}\t{v}")
        return "\n".join(lines) + "\n"


def _beta_rank(profile: FieldProfile, q: int) -> int:
    m = np.asarray(profile.beta_matrix(q), dtype=np.int64) % profile.ell
    if m.size == 0:
        return 0
    return rank(PackedMatrix.from_dense(m, prime=profile.ell))


def filtration_quotient_dim(profile: FieldProfile, n: int, p: int, q: int) -> int:
    """dim (B^n H / B^{n+1} H)^{p,q} in cohomological indexing, odd l.

    B = im(beta) sits in H^{1,*}. The ideal BH is computed from the rule that
    multiplication by a nonzero class of H^{0,a} is an isomorphism between
    nonzero groups H^{1,b} -> H^{1,a+b}, which holds for the finite-field
    profiles (H^{0,*} is spanned by powers of a periodicity class). B^2 H lies
    in H^{2,*} = 0.
    """
    if profile.ell == 2:
        raise ValueError("the generalized Bockstein filtration is set up for odd l")
    if profile.zeta_period is None:
        raise MissingProductData("profile lacks the H^{0,*} periodicity needed for B H")
    h = profile.h_dim(p, q)
    if h == 0 or n >= 2:
        return 0
    if p == 0:
        return h if n == 0 else 0
    in_bh = any(
        _beta_rank(profile, b) > 0 and profile.h_dim(0, q - b) > 0 for b in range(1, q + 1)
    )
    bh = h if in_bh else 0
    return h - bh if n == 0 else bh


def general_bockstein_e1(profile: FieldProfile, window: Window, table: ExtTopTable | None = None) -> BocksteinPage:
    """E1^{s,t,w,n} = sum over (p, q) of dim(B^nH/B^{n+1}H)^{p,q} * dim Ext_Top^{s,(t+p, w+q)}.

    Homological (t, w) of the coefficient class is (-p, -q). The classical
    table must cover every contributing (s, t') or MissingTopTable is raised.
    """
    if profile.ell == 2:
        raise ValueError("general_bockstein_e1 needs an odd-l profile")
    table = table or load_ext_top(profile.ell)
    page = BocksteinPage(1, profile.ell, window)
    for d in window.cells():
        for p in (0, 1):
            tp = d.t + p
            q = 0
            while tp >= 2 * (d.w + q):
                wp = d.w + q
                if wp >= 0 and tp >= d.s:
                    ext = table.dim(d.s, tp, wp)
                    if ext:
                        for n in (0, 1):
                            f = filtration_quotient_dim(profile, n, p, q)
                            if f:
                                key = (d.s, d.t, d.w, n)
                                page.cells[key] = page.cells.get(key, 0) + f * ext
                q += 1
    return page


def filtration_finiteness_violations(page: BocksteinPage) -> list[tuple[int, int, int, int]]:
    """Cells with n > t - 2w that are nonzero (must be empty)."""
    return sorted(k for k, v in page.cells.items() if v and k[3] > k[1] - 2 * k[2])


@dataclass
class IsoRangeCell:
    s: int
    t: int
    w: int
    n: int
    sphere: int
    hz: int
    status: str  # "match", "mismatch" or "unverified"


def iso_range_shadow(profile: FieldProfile, window: Window, table: ExtTopTable | None = None) -> list[IsoRangeCell]:
    """Compare E1 for the sphere and for HZ on cells with (2l - 3)s > t - 2w + (t - s).

    The HZ page uses Ext_Top(HZ) = F_l[a0]. A contributing classical cell
    (s, t') is decisive when t' - s < (2l - 3)s, where the classical
    isomorphism applies; a cell with an indecisive or untabulated contribution
    is reported "unverified".
    """
    ell = profile.ell
    table = table or load_ext_top(ell)
    out = []
    for d in window.cells():
        k = d.t - d.s
        if not (2 * ell - 3) * d.s > d.t - 2 * d.w + k:
            continue
        for n in (0, 1):
            sphere = hz = 0
            status = "match"
            for p in (0, 1):
                tp = d.t + p
                q = 0
                while tp >= 2 * (d.w + q):
                    wp = d.w + q
                    f = filtration_quotient_dim(profile, n, p, q) if wp >= 0 else 0
                    if f and tp >= d.s:
                        if not tp - d.s < (2 * ell - 3) * d.s:
                            status = "unverified"
                        try:
                            sphere += f * table.dim(d.s, tp, wp)
                        except MissingTopTable:
                            status = "unverified"
                        hz += f * (1 if (tp == d.s and wp == 0) else 0)
                    q += 1
            if status == "match" and sphere != hz:
                status = "mismatch"
            out.append(IsoRangeCell(d.s, d.t, d.w, n, sphere, hz, status))
    return out


# ---------------------------------------------------------------------------
# Adams E2 for HZ


def adams_hz_e2(profile: FieldProfile, window: Window) -> ExtChart:
    """ker(beta) h0^s / im(beta) h0^s from the closed-form Bockstein on H."""
    chart = ExtChart(profile.name + "/HZ", window)
    for d in window.cells():
        v = hz_dim(profile, d)
        chart.dims[d] = v
        chart.classes[d] = [ExtClass(d, f"x{i}*h0^{d.s}" if d.s else f"x{i}", frozenset()) for i in range(v)]
    return chart


# ---------------------------------------------------------------------------
# towers of finite l-groups


@dataclass
class Tower:
    """Finite l-groups G_r = sum Z/l^{e_i} with maps G_{r+1} -> G_r.

    ``maps[r]`` is an integer matrix with rows indexed by the generators of
    G_r and columns by those of G_{r+1}.
    """

    ell: int
    groups: list[tuple[int, ...]]
    maps: list[np.ndarray]
    kj: tuple[int, ...] | None = None
    label: str = ""
    _composites: dict[tuple[int, int], np.ndarray] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        if len(self.maps) != max(len(self.groups) - 1, 0):
            raise ValueError("need one map per consecutive pair of levels")
        for r, m in enumerate(self.maps):
            if m.shape != (len(self.groups[r]), len(self.groups[r + 1])):
                raise ValueError(f"map {r} has shape {m.shape}")

    def __len__(self) -> int:
        return len(self.groups)

    def composite(self, r: int, k: int) -> np.ndarray:
        """The map G_{r+k} -> G_r (identity for k = 0)."""
        if k == 0:
            return np.eye(len(self.groups[r]), dtype=object)
        key = (r, k)
        if key not in self._composites:
            prev = self.composite(r, k - 1)
            m = self.maps[r + k - 1].astype(object)
            self._composites[key] = prev.dot(m) if prev.size and m.size else np.zeros((prev.shape[0], m.shape[1]), dtype=object)
        return self._composites[key]

    def image_log_order(self, r: int, k: int) -> int:
        """log_l of the order of im(G_{r+k} -> G_r)."""
        return image_log_order(self.composite(r, k), self.groups[r], self.ell)

    def to_text(self) -> str:
        lines = [f"tower l={self.ell} levels={len(self.groups)}" + (f" label={self.label}" if self.label else "")]
        if self.kj is not None:
            lines.append("kj " + " ".join(map(str, self.kj)))
        for r, g in enumerate(self.groups):
            lines.append(f"G {r}: " + " ".join(map(str, g)))
        for r, m in enumerate(self.maps):
            rows = [" ".join(str(int(x)) for x in row) for row in m]
            lines.append(f"map {r}: " + " ; ".join(rows))
        return "\n".join(lines) + "\n"

    @staticmethod
    def from_text(text: str) -> "Tower":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        head = dict(kv.split("=", 1) for kv in lines[0].split()[1:])
        ell = int(head["l"])
        kj = None
        groups: list[tuple[int, ...]] = []
        maps: list[np.ndarray] = []
        for ln in lines[1:]:
            key, _, body = ln.partition(":") if not ln.startswith("kj") else ("kj", "", ln[2:])
            if key == "kj":
                kj = tuple(int(x) for x in body.split())
            elif key.startswith("G"):
                groups.append(tuple(int(x) for x in body.split()))
            elif key.startswith("map"):
                r = int(key.split()[1])
                rows = [list(map(int, x.split())) for x in body.split(";") if x.strip()]
                shape = (len(groups[r]), len(groups[r + 1]))
                maps.append(np.array(rows, dtype=np.int64).reshape(shape))
        return Tower(ell, groups, maps, kj, head.get("label", ""))


def image_log_order(m: np.ndarray, target: Sequence[int], ell: int) -> int:
    """log_l |image| of an integer matrix in sum Z/l^{e_i}.

    Elementary target groups use a rank over GF(l); otherwise an l-local
    Smith elimination modulo l^E (E = max e_i) computes the cokernel of
    M Z^k + sum l^{e_i} Z.
    """
    if not target or m.size == 0:
        return 0
    if all(e == 1 for e in target):
        arr = np.asarray(m, dtype=object) % ell
        return rank(PackedMatrix.from_dense(arr.astype(np.int64), prime=ell))
    big = max(target)
    mod = ell**big
    cols = [[int(x) % mod for x in m[:, j]] for j in range(m.shape[1])]
    for i, e in enumerate(target):
        v = [0] * len(target)
        v[i] = ell**e % mod
        cols.append(v)
    coker = _local_coker_log(cols, len(target), ell, big)
    return sum(target) - coker


def _valuation(x: int, ell: int, cap: int) -> int:
    if x == 0:
        return cap
    v = 0
    while x % ell == 0 and v < cap:
        x //= ell
        v += 1
    return v


def _local_coker_log(cols: list[list[int]], nrows: int, ell: int, big: int) -> int:
    """log_l of the order of (Z/l^big)^nrows modulo the span of ``cols``."""
    mod = ell**big
    a = [list(c) for c in cols]
    rows_left = list(range(nrows))
    total = 0
    while rows_left and a:
        best = None
        for j, c in enumerate(a):
            for i in rows_left:
                v = _valuation(c[i], ell, big)
                if v < big and (best is None or v < best[0]):
                    best = (v, i, j)
                    if v == 0:
                        break
            if best is not None and best[0] == 0:
                break
        if best is None:
            break
        v, i, j = best
        piv = a[j]
        unit = (piv[i] // ell**v) % mod
        inv = pow(unit, -1, mod)
        piv = [(x * inv) % mod for x in piv]
        # clear row i in the other columns
        rest = []
        for jj, c in enumerate(a):
            if jj == j:
                continue
            f = c[i] // ell**v
            rest.append([(x - f * y) % mod for x, y in zip(c, piv)])
        # clear column entries of the pivot column in the other rows (row ops)
        for ii in rows_left:
            if ii == i or piv[ii] == 0:
                continue
            f = piv[ii] // ell**v
            for c in rest:
                c[ii] = (c[ii] - f * c[i]) % mod
        total += v
        rows_left.remove(i)
        a = rest
    return total + big * len(rows_left)


@dataclass
class MLVerdict:
    """Outcome of a Mittag-Leffler diagnosis on a finite tower."""

    kind: str  # "Stabilizes" or "FailsThroughDepth"
    at: int | None
    depth: int
    witness_level: int | None = None
    chains: dict[int, list[int]] = field(default_factory=dict)

    def __str__(self) -> str:
        if self.kind == "Stabilizes":
            return f"Stabilizes(at={self.at})"
        return f"FailsThroughDepth(depth={self.depth}, level={self.witness_level})"


def ml_diagnose(tower: Tower, depth: int) -> MLVerdict:
    """Image chains im(G_{r+k} -> G_r), k <= depth, for every level r.

    FailsThroughDepth when some chain strictly shrinks at every step up to
    ``depth``; otherwise Stabilizes at the largest k where a chain still
    shrinks.
    """
    if depth < 0 or depth > max(len(tower) - 1, 0):
        raise ValueError(f"depth {depth} outside the stored tower length {len(tower)}")
    chains: dict[int, list[int]] = {}
    at = 0
    for r in range(len(tower)):
        kmax = min(depth, len(tower) - 1 - r)
        chain = [tower.image_log_order(r, k) for k in range(kmax + 1)]
        chains[r] = chain
        if kmax == depth and depth > 0 and all(chain[k + 1] < chain[k] for k in range(depth)):
            return MLVerdict("FailsThroughDepth", None, depth, r, chains)
        for k in range(1, len(chain)):
            if chain[k] < chain[k - 1]:
                at = max(at, k)
    return MLVerdict("Stabilizes", at, depth, None, chains)


def build_numberfield_tower(kj: Sequence[int], ell: int, p: int = 2, w: int = -2) -> Tower:
    """The tower r -> l-torsion of l^r (sum_j Z/l^{k_j}) with its inclusions.

    l^r Z/l^{k} has l-torsion Z/l spanned by l^{k-1} e_j exactly when k > r,
    so G_r is elementary of rank #{j : k_j > r} and G_{r+1} -> G_r is the
    inclusion. Levels run over r = 0 .. max(k_j) - 1. The bidegree (p, w) of
    the modelled cohomology group is kept as a label.
    """
    kj = tuple(int(k) for k in kj)
    if any(k < 1 for k in kj) or any(b < a for a, b in zip(kj, kj[1:])):
        raise NonIncreasingSequence(f"k_j must be a nondecreasing sequence of positive integers, got {kj}")
    levels = max(kj) if kj else 1
    groups = []
    members = []
    for r in range(levels):
        js = [j for j, k in enumerate(kj) if k > r]
        members.append(js)
        groups.append((1,) * len(js))
    maps = []
    for r in range(levels - 1):
        m = np.zeros((len(members[r]), len(members[r + 1])), dtype=np.int64)
        pos = {j: i for i, j in enumerate(members[r])}
        for c, j in enumerate(members[r + 1]):
            m[pos[j], c] = 1
        maps.append(m)
    return Tower(ell, groups, maps, kj, f"H^{p + 1},{w}")


def lim1_witness(tower: Tower) -> list[tuple[int, int]]:
    """The element of prod_r G_r supported on l^{k_j - 1} e_j at level r = k_j - 1.

    Returned as (level, generator index) pairs; it is the finite shadow of
    the element whose class in lim^1 is nonzero for strictly increasing k_j.
    """
    if tower.kj is None:
        raise ValueError("tower carries no k_j data")
    out = []
    for j, k in enumerate(tower.kj):
        r = k - 1
        if r < len(tower):
            js = [jj for jj, kk in enumerate(tower.kj) if kk > r]
            out.append((r, js.index(j)))
    return out


# ---------------------------------------------------------------------------
# exponent bounds


@dataclass
class ExponentBound:
    """Per (t, w): the exponent e with l^e bounding the exponent of pi_{t,w}."""

    ell: int
    vcd: int | None
    t_range: tuple[int, int]
    w_range: tuple[int, int]
    values: dict[tuple[int, int], int | None] = field(default_factory=dict)

    def to_tsv(self) -> str:
        lines = ["t\tw\texponent\tbound"]
        for (t, w), e in sorted(self.values.items()):
            lines.append(f"{t}\t{w}\t{'-' if e is None else e}\t{'-' if e is None else self.ell ** e}")
        return "\n".join(lines) + "\n"


def exponent_bound(ell: int, t: int, w: int, vcd: int | None = None) -> int:
    """Exponent e of the bound l^e on pi_{t,w} of the (l, eta)-completed sphere."""
    if ell == 2:
        if vcd is None:
            raise VcdInfinite("the 2-primary bound needs a finite vcd")
        if not (t > 1 and t - w > 0):
            raise OutsideValidityRegion(f"(t, w) = ({t}, {w}) needs t > 1 and t - w > 0")
        return max(math.ceil((t - w + 1) / 2), t + vcd)
    if not (t > 0 and t - w > 0):
        raise OutsideValidityRegion(f"(t, w) = ({t}, {w}) needs t > 0 and t - w > 0")
    return math.ceil((t - w) / (ell - 2))


def exponent_bounds(profile: FieldProfile, t_range: tuple[int, int] = (0, 19), w_range: tuple[int, int] = (-10, 9)) -> ExponentBound:
    """Table of exponent bounds on a rectangle; None outside the validity region."""
    if profile.ell == 2 and profile.vcd is None:
        raise VcdInfinite("the 2-primary bound needs a finite vcd")
    out = ExponentBound(profile.ell, profile.vcd, t_range, w_range)
    for t, w in iproduct(range(t_range[0], t_range[1] + 1), range(w_range[0], w_range[1] + 1)):
        try:
            out.values[(t, w)] = exponent_bound(profile.ell, t, w, profile.vcd)
        except OutsideValidityRegion:
            out.values[(t, w)] = None
    return out


def ceiling_violations(chart: ExtChart, vcd: int) -> list[Tridegree]:
    """Known nonzero cells in the region the 2-primary bound declares empty.

    For stem c = t - s > 1 and m = c - w > 0 the argument behind the bound
    needs Ext^{s,(t,w)} = 0 whenever s > c + 1 + vcd and 2s > m + 3.
    """
    bad = []
    for d, v in chart.dims.items():
        c = d.t - d.s
        if not v or c <= 1 or d.mw <= 0:
            continue
        if d.s > c + 1 + vcd and 2 * d.s > d.mw + 3:
            bad.append(d)
    return sorted(bad)


# ---------------------------------------------------------------------------
# strong convergence report


@dataclass
class ColumnVerdict:
    stem: int
    w: int
    classification: str
    s0: int | None = None
    note: str = ""


def strong_convergence_report(
    profile: FieldProfile,
    window: Window,
    towers: dict[tuple[int, int], Tower] | None = None,
    depth: int | None = None,
) -> list[ColumnVerdict]:
    """Classify each column (t - s, w) of the window.

    * t - s - w = 0: convergent, nothing leaves Milnor-Witt degree 0.
    * t - s > 0: convergent when the HZ~ oracle vanishes from some s0 up to
      the cap (the enabling vanishing), reported with that s0.
    * otherwise diagnostic only; an attached tower adds its Mittag-Leffler
      verdict, and a failing verdict marks the column not strongly convergent.
    """
    towers = towers or {}
    out = []
    for stem, w in iproduct(range(window.t_min - window.s_max, window.t_max + 1), range(window.w_min, window.w_max + 1)):
        cells = [Tridegree(s, stem + s, w) for s in range(window.s_max + 1)]
        cells = [d for d in cells if window.contains(d)]
        if not cells:
            continue
        if stem - w == 0:
            out.append(ColumnVerdict(stem, w, "MW-0 convergent", note="no exiting differentials"))
            continue
        if stem > 0:
            s0 = None
            if profile.ell == 2:
                for d in reversed(cells):
                    if ext_oracle("HZ~", d, profile) != 0:
                        break
                    s0 = d.s
            verdict = "positive-stem convergent" if s0 is not None else "positive-stem convergent (vanishing not observed in window)"
            note = f"enabling vanishing observed from s0 = {s0}" if s0 is not None else ""
            out.append(ColumnVerdict(stem, w, verdict, s0, note))
            continue
        tw = towers.get((stem, w))
        if tw is not None:
            v = ml_diagnose(tw, depth if depth is not None else len(tw) - 1)
            if v.kind == "FailsThroughDepth":
                out.append(ColumnVerdict(stem, w, "not strongly convergent", note=f"ML failure witness attached: {v}"))
            else:
                out.append(ColumnVerdict(stem, w, "diagnostic-only", note=f"attached tower {v}"))
            continue
        out.append(ColumnVerdict(stem, w, "diagnostic-only", note="no convergence claim in nonpositive stems"))
    return out


__all__ = [
    "BocksteinPage",
    "ColumnVerdict",
    "ExponentBound",
    "IsoRangeCell",
    "MLVerdict",
    "MissingProductData",
    "MissingTopTable",
    "NonIncreasingSequence",
    "OutsideValidityRegion",
    "Tower",
    "adams_hz_e2",
    "build_numberfield_tower",
    "ceiling_violations",
    "exponent_bound",
    "exponent_bounds",
    "filtration_finiteness_violations",
    "filtration_quotient_dim",
    "general_bockstein_e1",
    "image_log_order",
    "iso_range_shadow",
    "lim1_witness",
    "ml_diagnose",
    "strong_convergence_report",
]
