"""Mittag-Leffler diagnosis of number-field style towers and the torsion exponent bounds."""

from __future__ import annotations

from motivic_ext.coefficients import builtin
from motivic_ext.spectral import build_numberfield_tower, exponent_bounds, lim1_witness, ml_diagnose


def main() -> None:
    for kj in [tuple(range(1, 65)), (3, 3, 3), (1, 2, 4, 8)]:
        tower = build_numberfield_tower(kj, 2)
        verdict = ml_diagnose(tower, len(tower) - 1)
        label = f"{kj[:4]}..." if len(kj) > 4 else str(kj)
        print(f"k_j = {label}: {verdict}; level-0 chain {verdict.chains[0][:6]}")
    print("witness levels for k_j = 1..8:", [r for r, _ in lim1_witness(build_numberfield_tower(range(1, 9), 2))])

    for name in ("R", "F_7@3"):
        table = exponent_bounds(builtin(name), (2, 7), (-2, 3))
        print(f"\nexponent of the bound over {name} (rows t, columns w = -2..3)")
        for t in range(2, 8):
            row = [table.values[(t, w)] for w in range(-2, 4)]
            print(f"  t={t}: " + " ".join("-" if e is None else str(e) for e in row))


if __name__ == "__main__":
    main()
