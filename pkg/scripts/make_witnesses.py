#!/usr/bin/env python3
"""Write every bundled benchmark artifact (instances, start schedules,
known deviations) into a directory tree for external tooling."""

import argparse
import json
from fractions import Fraction
from pathlib import Path

from schedgames.core import write_instance, write_schedule
from schedgames.witnesses import figure1, figure3, figure9, footnote5, ls_examples


def dump(artifact, directory: Path):
    directory.mkdir(parents=True, exist_ok=True)
    write_instance(artifact.instance, directory / "instance.json")
    write_schedule(artifact.schedule, directory / "schedule.json")
    if artifact.deviation is not None:
        payload = {
            "assignment": list(artifact.deviation.after.assignment),
            "migrants": sorted(artifact.deviation.migrants),
            "coalition": sorted(artifact.deviation.coalition),
        }
        (directory / "deviation.json").write_text(json.dumps(payload, indent=2) + "\n")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="witness_artifacts")
    args = parser.parse_args()
    root = Path(args.out)

    dump(figure1(), root / "figure1")
    for r in (Fraction(3, 2), Fraction(3), Fraction(10)):
        dump(figure3(r), root / f"figure3_r{r.numerator}_{r.denominator}")
    dump(figure9(), root / "figure9")
    dump(footnote5(Fraction(1, 10)), root / "footnote5")
    examples = ls_examples(10, Fraction(1, 10))
    improvement = root / "list_scheduling" / "improvement"
    improvement.mkdir(parents=True, exist_ok=True)
    write_instance(examples.improvement.instance, improvement / "instance.json")
    write_schedule(examples.improvement.schedule, improvement / "schedule.json")
    damage = root / "list_scheduling" / "damage"
    damage.mkdir(parents=True, exist_ok=True)
    write_instance(examples.damage.instance, damage / "instance.json")
    write_schedule(examples.damage.schedule, damage / "schedule.json")
    print(f"artifacts under {root}/")


if __name__ == "__main__":
    main()
