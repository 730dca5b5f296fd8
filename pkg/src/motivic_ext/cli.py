"""Command-line front end.

    motivic-ext ext --field R --max-s 8 --max-t 12 --w-min -2 --w-max 12 --out chart.tsv
    motivic-ext zerostem --field R -n 1 --depth 8
    motivic-ext verify --suite all

Charts are written as TSV (s, t, w, dim, names), a text grid or SVG. Set
MOTIVIC_EXT_CACHE to a directory to reuse computed chart TSVs.
"""

from __future__ import annotations

import argparse
import hashlib
import os
import sys
import xml.etree.ElementTree as ET
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

from . import base_change, cobar, finite_subalgebra, spectral, zero_stem
from .coefficients import FieldProfile, builtin, load_profile, profile_finite_field_odd, serialize_profile
from .cobar import DirectCobar, ExtChart, ExtClass, Tridegree, Window

CACHE_ENV = "MOTIVIC_EXT_CACHE"


class CLIError(Exception):
    """A usage error or a failed invariant, reported with a nonzero exit."""


# ---------------------------------------------------------------------------
# shared helpers


def _profile(args) -> FieldProfile:
    if getattr(args, "profile", None):
        return load_profile(Path(args.profile).read_text())
    name = args.field
    if "@" in name and getattr(args, "cap", None):
        q, ell = name[2:].split("@")
        return profile_finite_field_odd(int(q), int(ell), args.cap)
    try:
        return builtin(name)
    except KeyError as exc:
        raise CLIError(f"--field: {exc.args[0]}") from None


def _window(args) -> Window:
    return Window(args.max_s, args.t_min, args.max_t, args.w_min, args.w_max)


def _add_window(p: argparse.ArgumentParser, s: int = 8, t: int = 12, w_min: int = -2, w_max: int = 12) -> None:
    p.add_argument("--max-s", type=int, default=s)
    p.add_argument("--t-min", type=int, default=0)
    p.add_argument("--max-t", type=int, default=t)
    p.add_argument("--w-min", type=int, default=w_min)
    p.add_argument("--w-max", type=int, default=w_max)


def _add_field(p: argparse.ArgumentParser, default: str = "R") -> None:
    p.add_argument("--field", default=default, help="built-in profile: C, R, Q, F_q, F_q@l, rho-nil-n")
    p.add_argument("--profile", help="profile file in the text format (overrides --field)")


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _cached(key: str, compute: Callable[[], str]) -> str:
    root = os.environ.get(CACHE_ENV)
    if not root:
        return compute()
    path = Path(root) / (hashlib.sha256(key.encode()).hexdigest()[:24] + ".tsv")
    if path.exists():
        return path.read_text()
    text = compute()
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return text


# ---------------------------------------------------------------------------
# parallel direct-mode charts


def _direct_cells(profile_text: str, window: Window, budget: int, cells: list[Tridegree]):
    eng = DirectCobar(load_profile(profile_text), window, budget)
    return [(d, eng.dim(d)) for d in cells]


def direct_chart_parallel(profile: FieldProfile, window: Window, budget: int, workers: int) -> ExtChart:
    """Direct-mode chart with cells spread over worker processes; output order is fixed."""
    if workers <= 1:
        return cobar.ext_chart_direct(profile, window, budget)
    cells = [d for d in window.cells() if d.mw >= 0]
    chunks = [cells[i::workers] for i in range(workers)]
    text = serialize_profile(profile)
    with ProcessPoolExecutor(workers) as pool:
        parts = list(pool.map(_direct_cells, [text] * workers, [window] * workers, [budget] * workers, chunks))
    chart = ExtChart(profile.name, window)
    found = {d: v for part in parts for d, v in part}
    for d in window.cells():
        if d.mw < 0:
            chart.dims[d] = 0
        elif found[d] is None:
            chart.unknown.add(d)
        else:
            chart.dims[d] = found[d]
            chart.classes[d] = [
                ExtClass(d, f"x{d.s}_{d.t}_{d.w}" + (f"_{j}" if found[d] > 1 else ""), frozenset())
                for j in range(found[d])
            ]
    return chart


def compute_chart(profile: FieldProfile, window: Window, budget: int, workers: int = 1) -> ExtChart:
    if profile.name == "R" and profile.ell == 2:
        return cobar.ext_chart_real(window, budget)
    return direct_chart_parallel(profile, window, budget, workers)


# ---------------------------------------------------------------------------
# rendering


@dataclass
class ChartCell:
    s: int
    t: int
    w: int
    dim: int | None
    names: str


def parse_tsv(text: str) -> list[ChartCell]:
    rows = []
    for line in text.splitlines()[1:]:
        if not line.strip():
            continue
        parts = line.split("\t")
        parts += [""] * (5 - len(parts))
        s, t, w, dim, names = parts[:5]
        rows.append(ChartCell(int(s), int(t), int(w), None if dim == "?" else int(dim), names))
    return rows


def _shade(profile: FieldProfile | None, c: ChartCell) -> bool:
    if profile is None or profile.ell != 2 or profile.vcd is None:
        return False
    return base_change.vanishing_region(profile, Tridegree(c.s, c.t, c.w))


def render_grid(cells: list[ChartCell], profile: FieldProfile | None = None, weights: Sequence[int] | None = None) -> str:
    """One text page per weight: stem t - s across, s upward; '?' unknown, '.' zero, '#' shaded zero."""
    by_w: dict[int, list[ChartCell]] = {}
    for c in cells:
        by_w.setdefault(c.w, []).append(c)
    out = []
    for w in sorted(by_w) if weights is None else weights:
        page = by_w.get(w, [])
        if not page:
            continue
        stems = sorted({c.t - c.s for c in page})
        s_max = max(c.s for c in page)
        grid = {(c.s, c.t - c.s): c for c in page}
        out.append(f"w = {w}")
        for s in range(s_max, -1, -1):
            row = []
            for k in stems:
                c = grid.get((s, k))
                if c is None:
                    row.append("  ")
                elif c.dim is None:
                    row.append(" ?")
                elif c.dim == 0:
                    row.append(" #" if _shade(profile, c) else " .")
                else:
                    row.append(f"{c.dim:2d}")
            out.append(f"{s:3d} |" + "".join(row))
        out.append("    +" + "--" * len(stems))
        out.append("     " + "".join(f"{k:2d}"[-2:] for k in stems))
        out.append("")
    return "\n".join(out)


def render_svg(cells: list[ChartCell], profile: FieldProfile | None = None, size: int = 18) -> str:
    """SVG with one rect per cell; the title carries the tridegree and class names."""
    by_w = sorted({c.w for c in cells})
    stems = [c.t - c.s for c in cells] or [0]
    k_min, k_max = min(stems), max(stems)
    s_max = max((c.s for c in cells), default=0)
    page_h = (s_max + 2) * size
    width = (k_max - k_min + 3) * size
    height = page_h * max(len(by_w), 1)
    svg = ET.Element("svg", xmlns="http://www.w3.org/2000/svg", width=str(width), height=str(height))
    for pi, w in enumerate(by_w):
        g = ET.SubElement(svg, "g", id=f"w{w}")
        label = ET.SubElement(g, "text", x="2", y=str(pi * page_h + size - 4), attrib={"font-size": "10"})
        label.text = f"w={w}"
        for c in (c for c in cells if c.w == w):
            x = (c.t - c.s - k_min + 1) * size
            y = pi * page_h + (s_max - c.s + 1) * size
            if c.dim is None:
                fill = "#bbbbbb"
            elif c.dim:
                fill = "#3465a4"
            else:
                fill = "#eeeeee" if _shade(profile, c) else "#ffffff"
            rect = ET.SubElement(
                g,
                "rect",
                x=str(x),
                y=str(y),
                width=str(size - 2),
                height=str(size - 2),
                fill=fill,
                stroke="#888888",
                attrib={"data-s": str(c.s), "data-t": str(c.t), "data-w": str(c.w), "data-dim": "?" if c.dim is None else str(c.dim)},
            )
            title = ET.SubElement(rect, "title")
            title.text = f"({c.s},{c.t},{c.w}) dim={'?' if c.dim is None else c.dim} {c.names}".rstrip()
    return ET.tostring(svg, encoding="unicode") + "\n"


# ---------------------------------------------------------------------------
# subcommands


def cmd_ext(args) -> int:
    prof = _profile(args)
    win = _window(args)
    key = f"ext|{serialize_profile(prof)}|{win}|{args.budget}"
    text = _cached(key, lambda: compute_chart(prof, win, args.budget, args.workers).to_tsv())
    _write_chart(text, args, prof)
    return 0


def _write_chart(text: str, args, prof: FieldProfile | None) -> None:
    fmt = args.format
    if fmt == "tsv":
        _emit(text, args.out)
    elif fmt == "grid":
        _emit(render_grid(parse_tsv(text), prof), args.out)
    if getattr(args, "svg", None):
        Path(args.svg).write_text(render_svg(parse_tsv(text), prof))


def cmd_basechange(args) -> int:
    prof = _profile(args)
    win = _window(args)
    if args.mode == "direct":
        text = compute_chart(prof, win, args.budget, args.workers).to_tsv()
    else:
        eng = cobar.RealCobar(win, args.budget)
        bc = base_change.base_change_chart(eng, prof, win)
        text = bc.to_tsv()
        bad = base_change.vanishing_violations(prof, bc.dims)
        if bad:
            raise CLIError(f"vanishing region violated at {bad[:5]}")
    _write_chart(text, args, prof)
    return 0


def cmd_hz(args) -> int:
    prof = _profile(args)
    win = _window(args)
    chart = spectral.adams_hz_e2(prof, win)
    if args.check:
        e0 = cobar.ext_E0(prof, win)
        bad = [d for d in win.cells() if chart.dims[d] != e0.dims[d]]
        if bad:
            raise CLIError(f"adams_hz_e2 and ext_E0 differ at {bad[:5]}")
    _write_chart(chart.to_tsv(), args, prof)
    return 0


def cmd_bockstein(args) -> int:
    prof = _profile(args)
    win = _window(args)
    page = spectral.general_bockstein_e1(prof, win)
    bad = spectral.filtration_finiteness_violations(page)
    if bad:
        raise CLIError(f"filtration finiteness violated at {bad[:5]}")
    text = page.to_tsv()
    if args.iso_shadow:
        rows = spectral.iso_range_shadow(prof, win)
        text += "\n# isomorphism-range shadow\ns\tt\tw\tn\tsphere\thz\tstatus\n"
        text += "".join(f"{r.s}\t{r.t}\t{r.w}\t{r.n}\t{r.sphere}\t{r.hz}\t{r.status}\n" for r in rows)
        if any(r.status == "mismatch" for r in rows):
            _emit(text, args.out)
            raise CLIError("isomorphism-range shadow found a mismatch")
    _emit(text, args.out)
    return 0


def _parse_kj(spec: str) -> list[int]:
    spec = spec.strip()
    if ".." in spec:
        a, b = spec.split("..")
        return list(range(int(a), int(b) + 1))
    return [int(x) for x in spec.replace(",", " ").split()]


def cmd_towers(args) -> int:
    try:
        kj = _parse_kj(args.kj)
    except ValueError:
        raise CLIError(f"--kj: cannot parse {args.kj!r}") from None
    tower = spectral.build_numberfield_tower(kj, args.ell)
    depth = args.depth if args.depth is not None else len(tower) - 1
    verdict = spectral.ml_diagnose(tower, depth)
    if args.out:
        Path(args.out).write_text(tower.to_text())
    sys.stdout.write(f"{verdict}\n")
    if verdict.kind == "FailsThroughDepth":
        sys.stdout.write(f"lim1 witness (level, generator): {spectral.lim1_witness(tower)[:8]}\n")
    return 0


def cmd_bounds(args) -> int:
    prof = _profile(args)
    table = spectral.exponent_bounds(prof, (args.t_lo, args.t_hi), (args.w_lo, args.w_hi))
    _emit(table.to_tsv(), args.out)
    if args.check_chart:
        if prof.ell != 2:
            raise CLIError("--check-chart compares with a 2-primary chart")
        chart = compute_chart(prof, Window(8, 0, 12, -2, 12), args.budget)
        bad = spectral.ceiling_violations(chart, prof.vcd)
        if bad:
            raise CLIError(f"chart cells above the vanishing ceiling: {bad[:5]}")
        sys.stderr.write(f"ceiling check: {len(chart.dims)} known cells, no violations\n")
    return 0


def cmd_zerostem(args) -> int:
    prof = _profile(args)
    verdict = zero_stem.verify_zero_stem(prof, args.n, args.depth)
    _emit(verdict.to_text(), args.out)
    return 0 if verdict.accept else 1


def cmd_chart(args) -> int:
    prof = None
    if args.input:
        text = Path(args.input).read_text()
        if args.field or args.profile:
            prof = _profile(args)
    else:
        args.field = args.field or "R"
        prof = _profile(args)
        text = compute_chart(prof, _window(args), args.budget, args.workers).to_tsv()
    _write_chart(text, args, prof)
    return 0


# ---------------------------------------------------------------------------
# verify


def _suite_checks(quick: bool) -> dict[str, Callable[[], tuple[bool, str]]]:
    win = Window(6, 0, 10, -2, 10) if quick else Window(8, 0, 12, -2, 12)
    budget = 30_000

    def golden():
        res = cobar.golden_identities()
        return all(res.values()), ", ".join(k for k, v in res.items() if not v) or "all identities hold"

    def dd():
        eng = cobar.RealCobar(win, budget)
        chart = cobar.ext_chart_real(win, budget, products=False, engine=eng)
        unchecked = [d for d in chart.dims if d.mw >= 0 and d.s > 0 and not chart.dd_verified.get(d, False)]
        ok = not eng.dd_failures and not unchecked and not chart.unknown
        return ok, f"{len(eng.dd_checked)} slices checked, failures {eng.dd_failures}, unknown {len(chart.unknown)}"

    def a1():
        n = finite_subalgebra.check_associativity()
        reps = [finite_subalgebra.verify_ases(raise_on_failure=False), finite_subalgebra.verify_tom(raise_on_failure=False)]
        return all(r.ok for r in reps), f"{n} associativity triples"

    def vanish():
        out = []
        for name in ("C", "F_3", "F_5", "rho-nil-2"):
            prof = builtin(name)
            chart = cobar.ext_chart_direct(prof, win, budget)
            out += [(name, d) for d in base_change.vanishing_violations(prof, chart.dims)]
        return not out, f"violations {out[:3]}"

    def hz():
        bad = []
        for prof in (builtin("C"), builtin("R"), builtin("F_3"), builtin("F_7@3")):
            a = spectral.adams_hz_e2(prof, win)
            b = cobar.ext_E0(prof, win)
            bad += [(prof.name, d) for d in win.cells() if a.dims[d] != b.dims[d]]
        return not bad, f"mismatches {bad[:3]}"

    def towers():
        t = spectral.build_numberfield_tower(range(1, 65), 2)
        v = spectral.ml_diagnose(t, 63)
        b = spectral.ml_diagnose(spectral.build_numberfield_tower((3, 3, 3), 2), 2)
        return v.kind == "FailsThroughDepth" and b.kind == "Stabilizes", f"{v}; {b}"

    def bounds():
        ok = spectral.exponent_bound(2, 5, 2, 0) == 5 and spectral.exponent_bound(5, 6, 3) == 1
        return ok, "formula spot checks"

    def zerostem():
        cases = [("R", 0, 8), ("R", 1, 8), ("R", 2, 8), ("C", 0, 8), ("F_3", 0, 6), ("F_3", 1, 6), ("F_5", 0, 6), ("F_5", 1, 6)]
        bad = [c for c in cases if not zero_stem.verify_zero_stem(builtin(c[0]), c[1], c[2]).accept]
        return not bad, f"rejected {bad}"

    return {
        "cobar": golden,
        "dd": dd,
        "a1": a1,
        "vanishing": vanish,
        "hz": hz,
        "towers": towers,
        "bounds": bounds,
        "zerostem": zerostem,
    }


def cmd_verify(args) -> int:
    checks = _suite_checks(args.suite == "quick")
    names = list(checks) if args.suite in ("all", "quick") else [args.suite]
    failed = []
    for name in names:
        if name not in checks:
            raise CLIError(f"--suite: unknown suite {name!r}")
        ok, detail = checks[name]()
        sys.stdout.write(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}\n")
        if not ok:
            failed.append(name)
    return 1 if failed else 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="motivic-ext", description="Motivic Adams E2 charts and convergence diagnostics.")
    sub = parser.add_subparsers(dest="command", required=True)

    def out_flags(p, formats=("tsv", "grid")):
        p.add_argument("--out", help="output file (default stdout)")
        p.add_argument("--format", choices=formats, default=formats[0])
        p.add_argument("--svg", help="also write an SVG rendering here")

    p = sub.add_parser("ext", help="Ext chart of the sphere over a field")
    _add_field(p)
    _add_window(p)
    p.add_argument("--budget", type=int, default=300_000)
    p.add_argument("--workers", type=int, default=1)
    out_flags(p)
    p.set_defaults(func=cmd_ext)

    p = sub.add_parser("basechange", help="Ext over F assembled from R (or computed directly)")
    _add_field(p, "F_3")
    _add_window(p)
    p.add_argument("--mode", choices=("tensor", "direct"), default="tensor")
    p.add_argument("--budget", type=int, default=30_000)
    p.add_argument("--workers", type=int, default=1)
    out_flags(p)
    p.set_defaults(func=cmd_basechange)

    p = sub.add_parser("hz", help="Adams E2 for HZ as ker(beta)/im(beta)")
    _add_field(p)
    _add_window(p)
    p.add_argument("--check", action="store_true", help="compare with Ext over E(0)")
    out_flags(p)
    p.set_defaults(func=cmd_hz)

    p = sub.add_parser("bockstein", help="generalized Bockstein E1 at odd l")
    _add_field(p, "F_7@3")
    _add_window(p, s=6, t=19, w_min=-6, w_max=10)
    p.add_argument("--cap", type=int, default=40, help="weight cap of the odd-l profile")
    p.add_argument("--iso-shadow", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_bockstein)

    p = sub.add_parser("towers", help="Mittag-Leffler diagnosis of l-torsion towers")
    p.add_argument("--kj", default="1..64", help="k_j sequence: 'a..b' or a comma list")
    p.add_argument("--ell", type=int, default=2)
    p.add_argument("--depth", type=int)
    p.add_argument("--out", help="write the tower in text form")
    p.set_defaults(func=cmd_towers)

    p = sub.add_parser("bounds", help="exponent bounds for stable stems")
    _add_field(p)
    p.add_argument("--t-lo", type=int, default=0)
    p.add_argument("--t-hi", type=int, default=19)
    p.add_argument("--w-lo", type=int, default=-10)
    p.add_argument("--w-hi", type=int, default=9)
    p.add_argument("--check-chart", action="store_true")
    p.add_argument("--budget", type=int, default=30_000)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("zerostem", help="Milnor-Witt filtration against the MW-degree 0 line")
    _add_field(p)
    p.add_argument("-n", type=int, default=0)
    p.add_argument("--depth", type=int, default=8)
    p.add_argument("--out")
    p.set_defaults(func=cmd_zerostem)

    p = sub.add_parser("verify", help="run the invariant suite")
    p.add_argument("--suite", default="all", help="all, quick, or one of cobar, dd, a1, vanishing, hz, towers, bounds, zerostem")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("chart", help="render a chart (from a TSV or computed)")
    p.add_argument("--input", help="chart TSV to render")
    p.add_argument("--field")
    p.add_argument("--profile")
    _add_window(p)
    p.add_argument("--budget", type=int, default=30_000)
    p.add_argument("--workers", type=int, default=1)
    out_flags(p, ("grid", "tsv"))
    p.set_defaults(func=cmd_chart)
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CLIError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except Exception as exc:  # module errors surface under their own names
        sys.stderr.write(f"{type(exc).__name__}: {exc}\n")
        return 3


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
