#!/usr/bin/env python3
"""Search greedy (LPT) schedules for deviations with large single-member
improvement or large bystander damage, and print the verified witnesses.
"""

import argparse

from schedgames.core import format_rational, load_profile, parse_rational
from schedgames.measures import deviation_stats
from schedgames.witnesses import search_extremal_lpt


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--m", type=int, default=3)
    parser.add_argument("--ir-target", default="1.55")
    parser.add_argument("--dr-target", default="1.40")
    parser.add_argument("--budget", type=int, default=10**7)
    args = parser.parse_args()

    for measure, target in (("ir_max", args.ir_target), ("dr_max", args.dr_target)):
        result = search_extremal_lpt(
            args.m, measure, parse_rational(target), node_budget=args.budget
        )
        print(f"{measure}: target {target}, found={result.found}, "
              f"value={format_rational(result.value)} ({float(result.value):.4f})")
        if result.instance is not None:
            sizes = ", ".join(str(format_rational(q)) for q in result.instance.p)
            print(f"  jobs: {sizes}")
            loads = load_profile(result.instance, result.schedule).loads
            print(f"  greedy loads: {[str(format_rational(l)) for l in loads]}")
        if result.deviation is not None:
            stats = deviation_stats(
                result.instance, result.schedule, result.deviation.after
            )
            print(f"  witness movers: {sorted(result.deviation.migrants)}, "
                  f"improvements {[str(r) for r in stats.mover_improvement.values()]}, "
                  f"damage {[str(r) for r in stats.damage.values()]}")


if __name__ == "__main__":
    main()
