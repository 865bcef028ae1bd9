"""Benchmark generators: parametric instances that exhibit extremal
stability behavior, Partition-based hardness reductions with their
start schedules, and a verified search for extremal LPT instances.

Every generator returns exact rationals and every bundled deviation is
validated for profitability at construction time.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .core import (
    IdenticalInstance,
    Instance,
    Schedule,
    UnrelatedInstance,
    ValidationError,
    parse_rational,
)
from .equilibria import Deviation, is_nash, profitable_deviation
from .measures import deviation_stats, measure_report
from .schedulers import list_schedule, lpt

DEFAULT_SEARCH_NODES = 10**7


@dataclass(frozen=True)
class FigureArtifact:
    """An instance, its start schedule, and a known profitable deviation
    (None when the point of the artifact is the schedule alone)."""

    instance: Instance
    schedule: Schedule
    deviation: Deviation | None = None


def figure1() -> FigureArtifact:
    """Three machines, jobs (5,5,3,2,3,2): an equilibrium where the four
    jobs of sizes 5 and 2 jointly migrate and each improves by 5/4."""
    instance = IdenticalInstance(m=3, p=(5, 5, 3, 2, 3, 2))
    before = Schedule((1, 1, 2, 2, 3, 3))
    after = Schedule((2, 3, 2, 1, 3, 1))
    return FigureArtifact(
        instance=instance,
        schedule=before,
        deviation=profitable_deviation(instance, before, after),
    )


def figure3(r, m: int = 3) -> FigureArtifact:
    """Equilibrium family with unboundedly lucky movers: the two unit jobs
    improve by exactly r while the jobs of size 2r-1 suffer (4r-1)/(2r).

    Extra machines each carry a single inert job of size 4r.
    """
    r = parse_rational(r)
    if r <= 1:
        raise ValidationError(f"the ratio parameter must exceed 1, got {r}")
    if m < 3:
        raise ValidationError(f"needs at least 3 machines, got {m}")
    extras = m - 3
    p = (2 * r, 2 * r, 2 * r - 1, Fraction(1), 2 * r - 1, Fraction(1)) + (4 * r,) * extras
    dummies = tuple(range(4, m + 1))
    before = Schedule((1, 1, 2, 2, 3, 3) + dummies)
    after = Schedule((2, 3, 2, 1, 3, 1) + dummies)
    instance = IdenticalInstance(m=m, p=p)
    return FigureArtifact(
        instance=instance,
        schedule=before,
        deviation=profitable_deviation(instance, before, after),
    )


def figure9() -> FigureArtifact:
    """LPT schedule on (1.633, 1.633, 1.367, 1.266, 1, 1, 1) whose five
    movers all improve by just over 1.112: the busiest machine empties
    out and receives the 1.367 job plus a unit job."""
    instance = IdenticalInstance(
        m=3, p=("1.633", "1.633", "1.367", "1.266", "1", "1", "1")
    )
    before = lpt(instance)
    after = Schedule((2, 2, 1, 3, 3, 1, 3))
    return FigureArtifact(
        instance=instance,
        schedule=before,
        deviation=profitable_deviation(instance, before, after),
    )


def footnote5(eps) -> FigureArtifact:
    """Two unrelated machines where swapping lets both jobs drop from
    cost 1 to eps, so the improvement ratio 1/eps is unbounded."""
    eps = parse_rational(eps)
    if not 0 < eps < 1:
        raise ValidationError(f"eps must lie strictly between 0 and 1, got {eps}")
    instance = UnrelatedInstance(m=2, p=((Fraction(1), eps), (eps, Fraction(1))))
    before = Schedule((1, 2))
    after = Schedule((2, 1))
    return FigureArtifact(
        instance=instance,
        schedule=before,
        deviation=profitable_deviation(instance, before, after),
    )


@dataclass(frozen=True)
class LsImprovementExample:
    """List scheduling traps a unit job with the long job; moving alone
    to the other machine improves it by (1+X)/2."""

    instance: IdenticalInstance
    order: tuple[int, ...]
    schedule: Schedule
    move: tuple[int, int]
    ratio: Fraction


@dataclass(frozen=True)
class LsDamageExample:
    """List scheduling instance where a coalition makes the long job
    migrate, damaging a bystander proportionally to X."""

    instance: IdenticalInstance
    order: tuple[int, ...]
    schedule: Schedule


@dataclass(frozen=True)
class LsExamples:
    improvement: LsImprovementExample
    damage: LsDamageExample


def ls_examples(X, eps) -> LsExamples:
    """The two list-scheduling counterexamples, in their arrival order."""
    X = parse_rational(X)
    eps = parse_rational(eps)
    if X <= 1:
        raise ValidationError(f"X must exceed 1, got {X}")
    if not 0 < eps < Fraction(1, 2):
        raise ValidationError(f"eps must lie strictly between 0 and 1/2, got {eps}")

    ir_instance = IdenticalInstance(m=2, p=(Fraction(1), Fraction(1), X))
    order = (1, 2, 3)
    ir_schedule = list_schedule(ir_instance, order)
    # the unit job sharing a machine with X moves next to the other unit job
    trapped = 1 if ir_schedule.machine_of(1) == ir_schedule.machine_of(3) else 2
    target = 3 - ir_schedule.machine_of(trapped)
    old_cost = 1 + X
    new_cost = Fraction(1) + 1
    improvement = LsImprovementExample(
        instance=ir_instance,
        order=order,
        schedule=ir_schedule,
        move=(trapped, target),
        ratio=old_cost / new_cost,
    )

    dr_instance = IdenticalInstance(
        m=3, p=(1 - 2 * eps, 1 - eps, Fraction(1), Fraction(2), X, Fraction(2), Fraction(3))
    )
    dr_order = tuple(range(1, 8))
    damage = LsDamageExample(
        instance=dr_instance,
        order=dr_order,
        schedule=list_schedule(dr_instance, dr_order),
    )
    return LsExamples(improvement=improvement, damage=damage)


def partition_oracle(values) -> tuple[int, ...] | None:
    """Exact half-sum subset via the pseudo-polynomial reachability table;
    returns one witness half (as a sorted value tuple) or None."""
    items = list(values)
    for a in items:
        if not isinstance(a, int) or isinstance(a, bool) or a <= 0:
            raise ValidationError(f"partition inputs must be positive integers, got {a!r}")
    total = sum(items)
    if total % 2:
        return None
    half = total // 2
    reachable = 1
    history = []
    for a in items:
        history.append(reachable)
        reachable |= reachable << a
    if not (reachable >> half) & 1:
        return None
    chosen = []
    remaining = half
    for a, prior in zip(reversed(items), reversed(history)):
        if remaining > 0 and not (prior >> remaining) & 1:
            chosen.append(a)
            remaining -= a
    return tuple(sorted(chosen))


@dataclass(frozen=True)
class ReductionArtifact:
    """A Partition input together with the scheduling instance and start
    schedule it induces; `expected_se` mirrors the oracle's verdict."""

    partition_set: tuple[int, ...]
    instance: Instance
    start_schedule: Schedule
    expected_se: bool | None
    partition_witness: tuple[int, ...] | None


def reduce_partition_identical(values, m: int = 3) -> ReductionArtifact:
    """Identical-machines reduction: the question 'can any coalition
    improve on this equilibrium?' encodes Partition.

    All n inputs sit on machine 1 (load 2B); machines 2 and 3 each hold
    one job of size B-2 and one of size B-1; any further machine holds a
    single job of size 2B.  The start schedule is strong iff the inputs
    have no half-sum split.
    """
    items = tuple(values)
    for a in items:
        if not isinstance(a, int) or isinstance(a, bool) or a < 3:
            raise ValidationError(
                f"reduction inputs must be integers of size at least 3, got {a!r}"
            )
    total = sum(items)
    if total % 2:
        raise ValidationError(f"total size must be even, got {total}")
    if m < 3:
        raise ValidationError(f"needs at least 3 machines, got {m}")
    half = total // 2
    if half < 3:
        raise ValidationError(f"half-sum must be at least 3, got {half}")
    n = len(items)
    p = items + (half - 2, half - 2, half - 1, half - 1) + (total,) * (m - 3)
    assignment = (1,) * n + (2, 3, 2, 3) + tuple(range(4, m + 1))
    instance = IdenticalInstance(m=m, p=p)
    schedule = Schedule(assignment)
    check = is_nash(instance, schedule)
    if not check.holds:
        raise ValidationError(f"constructed start schedule is not an equilibrium: {check.witness}")
    witness = partition_oracle(items)
    return ReductionArtifact(
        partition_set=items,
        instance=instance,
        start_schedule=schedule,
        expected_se=witness is None,
        partition_witness=witness,
    )


def reduce_partition_unrelated(values, eps) -> ReductionArtifact:
    """Two unrelated machines: input job i costs a_i + eps on machine 1
    and 2*a_i + eps on machine 2; a closing job costs B on machine 1 and
    2B + n*eps on machine 2.  With all inputs on machine 1 and the
    closing job on machine 2, both loads equal 2B + n*eps, and the
    schedule is strong iff there is no half-sum split.
    """
    items = tuple(values)
    for a in items:
        if not isinstance(a, int) or isinstance(a, bool) or a <= 0:
            raise ValidationError(f"reduction inputs must be positive integers, got {a!r}")
    n = len(items)
    if n < 2:
        raise ValidationError("needs at least two input integers")
    total = sum(items)
    if total % 2:
        raise ValidationError(f"total size must be even, got {total}")
    eps = parse_rational(eps)
    if not 0 < eps < Fraction(1, n - 1):
        raise ValidationError(f"eps must lie strictly between 0 and 1/{n - 1}, got {eps}")
    half = total // 2
    row1 = tuple(a + eps for a in items) + (Fraction(half),)
    row2 = tuple(2 * a + eps for a in items) + (2 * half + n * eps,)
    instance = UnrelatedInstance(m=2, p=(row1, row2))
    schedule = Schedule((1,) * n + (2,))
    check = is_nash(instance, schedule)
    if not check.holds:
        raise ValidationError(f"constructed start schedule is not an equilibrium: {check.witness}")
    witness = partition_oracle(items)
    return ReductionArtifact(
        partition_set=items,
        instance=instance,
        start_schedule=schedule,
        expected_se=witness is None,
        partition_witness=witness,
    )


@dataclass(frozen=True)
class ExtremalSearchResult:
    found: bool
    instance: IdenticalInstance | None
    schedule: Schedule | None
    deviation: Deviation | None
    value: Fraction
    budget_charged: int


_EPS_GRID = [
    Fraction(1, 8),
    Fraction(1, 12),
    Fraction(1, 16),
    Fraction(1, 20),
    Fraction(1, 24),
    Fraction(1, 32),
    Fraction(1, 48),
    Fraction(1, 64),
]


def _extremal_candidates(m: int):
    """Deterministic stream of small LPT stress instances.

    Two perturbation families (graded near-unit jobs; a 3/2-plateau with
    perturbed unit jobs) over a grid of perturbations, then generic
    multisets over a coarse value grid.  For m > 3, inert oversized jobs
    park one per extra machine.
    """
    one = Fraction(1)

    def pad(sizes):
        sizes = tuple(sizes)
        if m == 3:
            return sizes
        giant = 2 * max(sizes)
        return tuple(sorted(sizes, reverse=True)) + (giant,) * (m - 3)

    for eps in _EPS_GRID:
        yield pad([1 + 5 * eps, 1 + 4 * eps, 1 + 3 * eps, 1 + 2 * eps, 1 + eps, one, one])
        yield pad([3, 3, 2, 2, 1 + eps, 1 + eps, 1 + eps])
    for eps in (Fraction(1, 8), Fraction(1, 16)):
        grid = (one, 1 + eps, 1 + 2 * eps, Fraction(2), 2 + eps, Fraction(3))
        for combo in itertools.combinations_with_replacement(grid, 6):
            yield pad(combo)


def search_extremal_lpt(
    m: int, measure: str, target, node_budget: int = DEFAULT_SEARCH_NODES
) -> ExtremalSearchResult:
    """Search LPT schedules for a profitable deviation whose improvement
    (measure='ir_max') or damage (measure='dr_max') reaches `target`.

    Every hit is re-verified: the witness deviation is revalidated from
    scratch and must reproduce the claimed ratio.  Returns the best value
    found when the candidate stream or the node budget runs out.
    """
    if m < 3:
        raise ValidationError(f"needs at least 3 machines, got {m}")
    if measure not in ("ir_max", "dr_max"):
        raise ValidationError(f"measure must be 'ir_max' or 'dr_max', got {measure!r}")
    target = parse_rational(target)
    best_value = Fraction(1)
    best: tuple | None = None
    charged = 0
    for sizes in _extremal_candidates(m):
        instance = IdenticalInstance(m=m, p=sizes)
        # a scan visits at most ~1.5 * m^n nodes; charge a safe upper bound
        cost = 2 * m**instance.n
        if charged + cost > node_budget:
            break
        charged += cost
        schedule = lpt(instance)
        report = measure_report(instance, schedule, node_budget=cost)
        if not report.exhaustive:
            continue
        value = report.ir_max if measure == "ir_max" else report.dr_max
        witness = report.ir_max_witness if measure == "ir_max" else report.dr_max_witness
        if value > best_value:
            best_value = value
            best = (instance, schedule, witness)
        if value >= target and witness is not None:
            stats = deviation_stats(instance, schedule, witness.after)
            achieved = stats.max_improvement if measure == "ir_max" else stats.max_damage
            if achieved != value:
                raise AssertionError(
                    f"witness re-verification mismatch: {achieved} != {value}"
                )
            return ExtremalSearchResult(
                found=True,
                instance=instance,
                schedule=schedule,
                deviation=witness,
                value=value,
                budget_charged=charged,
            )
    instance, schedule, witness = best if best else (None, None, None)
    return ExtremalSearchResult(
        found=False,
        instance=instance,
        schedule=schedule,
        deviation=witness,
        value=best_value,
        budget_charged=charged,
    )
