"""Ext over R on a small window: named classes and a text chart per weight."""

from __future__ import annotations

from motivic_ext.cli import parse_tsv, render_grid
from motivic_ext.cobar import Window, ext_chart_real
from motivic_ext.coefficients import builtin

WINDOW = Window(s_max=5, t_min=0, t_max=9, w_min=0, w_max=4)


def main() -> None:
    chart = ext_chart_real(WINDOW, budget=30_000)
    print(f"{len(chart.dims)} cells computed, {len(chart.unknown)} unknown")
    for d in sorted(chart.classes):
        names = [c.name for c in chart.classes[d]]
        if names and d.w >= d.s - 1:
            print(f"  {d.s} {d.t} {d.w}: {', '.join(names)}")
    print(render_grid(parse_tsv(chart.to_tsv()), builtin("R"), weights=[1, 2]))


if __name__ == "__main__":
    main()
