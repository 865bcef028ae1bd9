#!/usr/bin/env python3
"""Stress the approximation scheme: on seeded random instances its output
must be an equilibrium, have min-improvement at most 1+eps, and stay
within (1+eps) of the brute-force optimal makespan.
"""

import argparse
from fractions import Fraction

from schedgames.core import parse_rational
from schedgames.experiments import SweepConfig, ptas_sweep


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=20260809)
    parser.add_argument("--trials", type=int, default=100)
    parser.add_argument("--eps", default="1/2", help="rational, e.g. 1 or 1/2")
    parser.add_argument("--m", type=int, default=3)
    parser.add_argument("--n-lo", type=int, default=1)
    parser.add_argument("--n-hi", type=int, default=8)
    parser.add_argument("--out", default="ptas_sweep.csv")
    args = parser.parse_args()

    report = ptas_sweep(
        SweepConfig(
            seed=args.seed,
            trials=args.trials,
            m_range=(args.m, args.m),
            n_range=(args.n_lo, args.n_hi),
            p_max=20,
            scheduler="ptas",
            eps=Fraction(parse_rational(args.eps)),
        )
    )
    report.write_csv(args.out)
    print(
        f"{len(report.records)} trials, {len(report.violations)} violations, "
        f"{report.inconclusive} inconclusive, {report.elapsed:.2f}s -> {args.out}"
    )
    raise SystemExit(1 if report.violations else 0)


if __name__ == "__main__":
    main()
