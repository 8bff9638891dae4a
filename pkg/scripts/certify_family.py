#!/usr/bin/env python3
"""Certify the standard rank-r family on kappa = (e1 - f1, e2 - f2).

Sweeps the bundle rank and the alpha/t ratio, printing one line per
certificate; mirrors `hstorus search` with an inline config.
"""

import argparse
from fractions import Fraction

from hstorus.anomaly import SolutionParams, build_certificate
from hstorus.lattice import E1, E2, F1, F2


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--r-max", type=int, default=24)
    parser.add_argument("--ratios", type=int, nargs="+", default=[2, 4],
                        help="alpha/t ratios to sweep")
    args = parser.parse_args()

    kappa1, kappa2 = E1 - F1, E2 - F2
    for ratio in args.ratios:
        print(f"alpha/t = {ratio}:")
        for r in range(1, args.r_max + 1):
            p = SolutionParams(kappa1, kappa2, Fraction(1), Fraction(ratio), r)
            cert = build_certificate(p)
            failing = [c.name for c in cert.checks if not c.ok]
            verdict = "VALID" if cert.valid else f"invalid ({', '.join(failing)})"
            print(f"  r = {r:2d}  c2(W) = {cert.c2W}  pi1 = {cert.pi1}  {verdict}")


if __name__ == "__main__":
    main()
