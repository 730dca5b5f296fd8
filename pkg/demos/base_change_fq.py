"""Ext over F_3 and F_5 two ways: tensor + Tor from the R slices, and directly."""

from __future__ import annotations

from motivic_ext.base_change import base_change_chart, vanishing_violations
from motivic_ext.cobar import RealCobar, Window, ext_chart_direct
from motivic_ext.coefficients import builtin

WINDOW = Window(s_max=6, t_min=0, t_max=10, w_min=-2, w_max=8)
BUDGET = 30_000


def main() -> None:
    engine = RealCobar(WINDOW, BUDGET)
    for name in ("F_3", "F_5"):
        k = builtin(name)
        assembled = base_change_chart(engine, k)
        direct = ext_chart_direct(k, WINDOW, BUDGET)
        common = [d for d in assembled.known() if d in direct.dims]
        differ = [d for d in common if assembled.dims[d] != direct.dims[d]]
        print(f"{name}: {len(common)} cells compared, {len(differ)} differ, "
              f"{len(vanishing_violations(k, direct.dims))} vanishing-region violations")
        nonzero = sorted(d for d in common if direct.dims[d] and d.s == 2)
        for d in nonzero[:6]:
            print(f"  Ext^{d.s},({d.t},{d.w}) = {direct.dims[d]}  (tensor {assembled.tensor[d]}, Tor {assembled.tor[d]})")


if __name__ == "__main__":
    main()
