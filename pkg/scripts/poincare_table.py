#!/usr/bin/env python3
"""Tabulate invariant counts and their generating functions.

Prints s_k / delta_k for a range of dimensions, the reduced generating
function of the pure-order counts, and its pole order at z = 1 (which
grows like the dimension and drops in the presence of symmetry).

Usage:
  python scripts/poincare_table.py
  python scripts/poincare_table.py --dims 2 3 4 5 6 --max-k 10
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

_SRC = Path(__file__).resolve().parents[1] / "src"
if _SRC.is_dir() and str(_SRC) not in sys.path:
    sys.path.insert(0, str(_SRC))

from metricinv.counting import (
    delta_count,
    poincare,
    pole_order_at_one,
    s_count,
    series_expand,
)


def show_dimension(n: int, max_k: int) -> None:
    p = poincare(n)
    print("=" * 72)
    print(f"dimension n = {n}")
    print(f"  numerator   {list(p.numerator)}")
    print(f"  denominator {list(p.denominator)}")
    print(f"  pole order at z=1: {pole_order_at_one(p)}")
    ks = list(range(max_k + 1))
    widths = max(len(str(s_count(n, max_k))), 6)
    print(f"  {'k':>4} {'delta_k':>{widths + 2}} {'s_k':>{widths + 2}}")
    series = series_expand(p, max_k)
    for k in ks:
        assert series[k] == delta_count(n, k)
        print(f"  {k:>4} {delta_count(n, k):>{widths + 2}} {s_count(n, k):>{widths + 2}}")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--dims", type=int, nargs="+", default=[2, 3, 4, 5])
    parser.add_argument("--max-k", type=int, default=8)
    args = parser.parse_args(argv)
    for n in args.dims:
        show_dimension(n, args.max_k)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
