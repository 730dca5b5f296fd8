"""Filtration quotients of Milnor-Witt K-theory against the MW-degree 0 line."""

from __future__ import annotations

from motivic_ext.coefficients import builtin
from motivic_ext.zero_stem import verify_zero_stem


def main() -> None:
    for name, n in [("R", 0), ("R", 1), ("F_5", 1), ("F_3", 0)]:
        print(verify_zero_stem(builtin(name), n, 5).to_text())


if __name__ == "__main__":
    main()
