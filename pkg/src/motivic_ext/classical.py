"""Classical Ext over the odd-primary dual Steenrod algebra, by the cobar complex.

The dual Steenrod algebra at an odd prime carries the motivic weight of its
generators (tau_i in (2l^i - 1, l^i - 1), xi_i in (2l^i - 2, l^i - 1)), and
the coproduct preserves it, so the cobar complex splits by (s, t, w). Ranks
are computed by sparse column elimination over GF(l).
"""

from __future__ import annotations

import csv
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .dual_steenrod import Mono, OddDualSteenrod, mono_degree

DATA_PACKAGE = "motivic_ext.data"


class MissingTopTable(LookupError):
    """No classical Ext table covers the requested prime or range."""


def _bars(ell: int, t_max: int) -> dict[tuple[int, int], list[Mono]]:
    alg = OddDualSteenrod(ell)
    out: dict[tuple[int, int], list[Mono]] = {}
    for t in range(1, t_max + 1):
        for m in alg.monomials(t):
            out.setdefault(mono_degree(m, ell), []).append(m)
    return out


class ClassicalCobar:
    """Normalized cobar complex of the classical dual Steenrod algebra at odd l."""

    def __init__(self, ell: int, t_max: int):
        self.ell = ell
        self.t_max = t_max
        self.alg = OddDualSteenrod(ell)
        self.bars = _bars(ell, t_max)
        self._basis: dict[tuple[int, int, int], list[tuple[Mono, ...]]] = {}

    def basis(self, s: int, t: int, w: int) -> list[tuple[Mono, ...]]:
        key = (s, t, w)
        if key in self._basis:
            return self._basis[key]
        if s == 0:
            res = [()] if (t, w) == (0, 0) else []
        else:
            res = []
            for (dt, dw), ms in self.bars.items():
                if dt > t or dw > w:
                    continue
                tail = self.basis(s - 1, t - dt, w - dw)
                if not tail:
                    continue
                for m in ms:
                    res.extend((m,) + x for x in tail)
        res.sort()
        self._basis[key] = res
        return res

    def d(self, gen: tuple[Mono, ...]) -> dict[tuple[Mono, ...], int]:
        """d[g1|...|gs] = sum_i (-1)^i [g1|...|reduced coproduct of g_i|...|gs]."""
        ell = self.ell
        out: dict[tuple[Mono, ...], int] = {}
        for i, g in enumerate(gen):
            sign = -1 if (i + 1) % 2 else 1
            for (x, y), c in self.alg.reduced_coproduct(g).items():
                key = gen[:i] + (x, y) + gen[i + 1 :]
                out[key] = (out.get(key, 0) + sign * c) % ell
        return {k: v for k, v in out.items() if v}

    def rank(self, s: int, t: int, w: int) -> int:
        """Rank of d : C^s -> C^{s+1} in internal degree (t, w)."""
        src = self.basis(s, t, w)
        if not src:
            return 0
        tgt = {g: i for i, g in enumerate(self.basis(s + 1, t, w))}
        if not tgt:
            return 0
        cols = []
        for g in src:
            col = {tgt[k]: v for k, v in self.d(g).items()}
            cols.append(col)
        return sparse_rank_mod(cols, self.ell)

    def dd_zero(self, s: int, t: int, w: int) -> bool:
        """d o d = 0 on every generator of C^s in degree (t, w)."""
        for g in self.basis(s, t, w):
            acc: dict[tuple[Mono, ...], int] = {}
            for k, v in self.d(g).items():
                for k2, v2 in self.d(k).items():
                    acc[k2] = (acc.get(k2, 0) + v * v2) % self.ell
            if any(acc.values()):
                return False
        return True

    def ext_dim(self, s: int, t: int, w: int) -> int:
        n = len(self.basis(s, t, w))
        if n == 0:
            return 0
        return n - self.rank(s, t, w) - (self.rank(s - 1, t, w) if s > 0 else 0)


def sparse_rank_mod(cols: list[dict[int, int]], p: int) -> int:
    """Rank over GF(p) of sparse columns given as {row: value} dicts."""
    pivots: dict[int, dict[int, int]] = {}
    r = 0
    for col in cols:
        c = dict(col)
        while c:
            low = max(c)
            piv = pivots.get(low)
            if piv is None:
                inv = pow(c[low], -1, p)
                pivots[low] = {k: v * inv % p for k, v in c.items()}
                r += 1
                break
            f = c[low]
            for k, v in piv.items():
                nv = (c.get(k, 0) - f * v) % p
                if nv:
                    c[k] = nv
                else:
                    c.pop(k, None)
    return r


def compute_classical_ext(ell: int, s_max: int, stem_max: int) -> dict[tuple[int, int, int], int]:
    """Nonzero dims of Ext^{s,(t,w)} for s <= s_max and t - s <= stem_max."""
    cob = ClassicalCobar(ell, stem_max + s_max + 1)
    out: dict[tuple[int, int, int], int] = {}
    for s in range(0, s_max + 1):
        for t in range(s, stem_max + s + 1):
            for w in range(0, t // 2 + 1):
                dim = cob.ext_dim(s, t, w)
                if dim:
                    out[(s, t, w)] = dim
    return out


# ---------------------------------------------------------------------------
# shipped tables


TABLE_RANGES = {3: (10, 20), 5: (10, 20), 7: (10, 20)}


def table_path(ell: int) -> Path:
    return Path(str(resources.files(DATA_PACKAGE))) / f"ext_top_{ell}.tsv"


def write_table(ell: int, path: Path | None = None) -> Path:
    s_max, stem_max = TABLE_RANGES[ell]
    dims = compute_classical_ext(ell, s_max, stem_max)
    path = path or table_path(ell)
    with open(path, "w", newline="") as fh:
        fh.write(f"# l={ell} s_max={s_max} stem_max={stem_max}\n")
        wr = csv.writer(fh, delimiter="\t")
        wr.writerow(["s", "t", "w", "dim"])
        for (s, t, w), v in sorted(dims.items()):
            wr.writerow([s, t, w, v])
    return path


class ExtTopTable:
    """Classical Ext dims with the range they were computed over."""

    def __init__(self, ell: int, s_max: int, stem_max: int, dims: dict[tuple[int, int, int], int]):
        self.ell = ell
        self.s_max = s_max
        self.stem_max = stem_max
        self.dims = dims

    def covers(self, s: int, t: int) -> bool:
        return 0 <= s <= self.s_max and t - s <= self.stem_max

    def dim(self, s: int, t: int, w: int) -> int:
        if s < 0 or t - s < 0 and not (s == 0 and t == 0):
            return 0
        if not self.covers(s, t):
            raise MissingTopTable(f"classical Ext at l={self.ell} not tabulated at (s,t)=({s},{t})")
        return self.dims.get((s, t, w), 0)


@lru_cache(maxsize=None)
def load_ext_top(ell: int) -> ExtTopTable:
    path = table_path(ell)
    if not path.exists():
        raise MissingTopTable(f"no shipped classical Ext table for l={ell}")
    with open(path) as fh:
        header = fh.readline().lstrip("# ").split()
        meta = dict(kv.split("=") for kv in header)
        rows = csv.DictReader(fh, delimiter="\t")
        dims = {(int(r["s"]), int(r["t"]), int(r["w"])): int(r["dim"]) for r in rows}
    return ExtTopTable(int(meta["l"]), int(meta["s_max"]), int(meta["stem_max"]), dims)


__all__ = [
    "ClassicalCobar",
    "ExtTopTable",
    "MissingTopTable",
    "TABLE_RANGES",
    "compute_classical_ext",
    "load_ext_top",
    "sparse_rank_mod",
    "write_table",
]
