#!/usr/bin/env python3
"""How much the gap-product scheme concedes to the spectral optimum.

Per level: the exact product risk, the full- and strict-support optima, and
both rates scaled by N^2.  Ends with extrapolated constants for the two
routes; for d=2 the optimum follows sin^2(pi/(N+3)) (the incidence form is
a path graph there), so its N^2 rate tends to pi^2.

    python3 scripts/optimal_gap.py -d 2 -N 3:41
    python3 scripts/optimal_gap.py -d 3 -N 6:20 --extrapolate 30:120:10
"""

import argparse
import math

from sud_estimate.risk import fit_constant, RiskPoint
from sud_estimate.spectral import optimality_gap


def parse_range(text: str) -> list[int]:
    pieces = [int(p) for p in text.split(":")]
    if len(pieces) == 1:
        return pieces
    lo, hi, *step = pieces
    return list(range(lo, hi + 1, step[0] if step else 1))


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("-d", type=int, default=2)
    parser.add_argument("-N", dest="levels", type=parse_range, default="3:25",
                        metavar="A:B[:STEP]")
    parser.add_argument("--extrapolate", type=parse_range, default="81:401:20",
                        metavar="A:B[:STEP]",
                        help="levels for the N^2 rate fit of the optimum")
    args = parser.parse_args()
    for name in ("levels", "extrapolate"):
        if isinstance(getattr(args, name), str):
            setattr(args, name, parse_range(getattr(args, name)))

    closed_form = args.d == 2
    header = "   N    product    optimal     strict   N^2 opt"
    print(f"== d={args.d}")
    print(header + ("   sin^2(pi/(N+3))" if closed_form else ""))
    for n in args.levels:
        g = optimality_gap(args.d, n)
        product = f"{float(g.risk_product):.6f}" if g.risk_product is not None else "     --- "
        strict = (
            f"{g.risk_optimal_strict:.6f}" if g.risk_optimal_strict is not None else "     --- "
        )
        row = (f"  {n:4d}  {product}  {g.risk_optimal:.6f}  {strict}  "
               f"{n * n * g.risk_optimal:8.4f}")
        if closed_form:
            row += f"   {math.sin(math.pi / (n + 3)) ** 2:.6f}"
        print(row)

    points = []
    for n in args.extrapolate:
        g = optimality_gap(args.d, n)
        points.append(RiskPoint(n, None, g.risk_optimal, n * n * g.risk_optimal))
    fit = fit_constant(points)
    print(f"\n   optimal-rate fit on N={fit.window[0]}..{fit.window[1]}: "
          f"N^2 risk -> {fit.constant:.4f}"
          + (f"   (pi^2 = {math.pi ** 2:.4f})" if closed_form else ""))


if __name__ == "__main__":
    main()
