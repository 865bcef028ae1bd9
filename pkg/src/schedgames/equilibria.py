"""Exact equilibrium checking: unilateral moves, coalition deviations,
and pruned exhaustive search over joint actions.

The search works in common-denominator integers (see `_scaling`) and
visits candidate joint actions in lexicographic order of the assignment
vector, so every reported witness is the lexicographically smallest one
of its kind and runs are reproducible.  Deciding strong stability is a
hard problem, so searches carry an explicit node budget and fail loudly
(never approximately) when it runs out.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator

from ._scaling import scaled_sizes
from .core import (
    BudgetExceededError,
    Instance,
    Schedule,
    ValidationError,
    load_profile,
    validate_schedule,
)

DEFAULT_SEARCH_BUDGET = 10**8

COALITION_MODES = ("migrants-only", "migrants-plus-improvers")
OBJECTIVES = ("any", "maximize-ir-min", "maximize-ir-max", "maximize-dr-max")


@dataclass(frozen=True)
class SearchOptions:
    node_budget: int = DEFAULT_SEARCH_BUDGET
    coalition_mode: str = "migrants-only"
    objective: str = "any"

    def __post_init__(self):
        if not isinstance(self.node_budget, int) or self.node_budget < 1:
            raise ValidationError(f"node budget must be positive, got {self.node_budget!r}")
        if self.coalition_mode not in COALITION_MODES:
            raise ValidationError(f"unknown coalition mode {self.coalition_mode!r}")
        if self.objective not in OBJECTIVES:
            raise ValidationError(f"unknown objective {self.objective!r}")


@dataclass(frozen=True)
class Deviation:
    """A joint move: `coalition` members all strictly improve, everyone
    else keeps their machine.  `migrants` are the jobs that actually
    change machine (always a subset of the coalition)."""

    before: Schedule
    after: Schedule
    migrants: frozenset[int]
    coalition: frozenset[int]


@dataclass(frozen=True)
class NashResult:
    holds: bool
    witness: tuple[int, int] | None = None  # (job, target machine)

    def __bool__(self) -> bool:
        return self.holds


@dataclass(frozen=True)
class StrongResult:
    holds: bool
    witness: Deviation | None = None

    def __bool__(self) -> bool:
        return self.holds


def improving_moves(instance: Instance, schedule: Schedule) -> Iterator[tuple[int, int, Fraction]]:
    """All strictly improving unilateral moves as (job, machine, new cost),
    in ascending job then machine order."""
    validate_schedule(instance, schedule)
    loads = load_profile(instance, schedule).loads
    for j in range(1, instance.n + 1):
        here = schedule.machine_of(j)
        cost = loads[here - 1]
        for i in range(1, instance.m + 1):
            if i == here:
                continue
            moved = loads[i - 1] + instance.processing_time(j, i)
            if moved < cost:
                yield j, i, moved


def is_nash(instance: Instance, schedule: Schedule) -> NashResult:
    """No job can strictly lower its cost by moving alone.  On failure the
    witness is the lowest-index improving (job, machine) pair."""
    for j, i, _ in improving_moves(instance, schedule):
        return NashResult(holds=False, witness=(j, i))
    return NashResult(holds=True)


def improving_bystanders(instance: Instance, before: Schedule, after: Schedule) -> frozenset[int]:
    """Non-migrating jobs whose machine load strictly decreased; they can
    join the coalition of the move without violating profitability."""
    old = load_profile(instance, before).loads
    new = load_profile(instance, after).loads
    out = []
    for j in range(1, instance.n + 1):
        i = before.machine_of(j)
        if after.machine_of(j) == i and new[i - 1] < old[i - 1]:
            out.append(j)
    return frozenset(out)


def profitable_deviation(
    instance: Instance, before: Schedule, after: Schedule, coalition=None
) -> Deviation:
    """Validated constructor: checks the joint move is a profitable
    deviation and raises ValidationError naming the first violator."""
    validate_schedule(instance, before)
    validate_schedule(instance, after)
    migrants = frozenset(
        j for j in range(1, instance.n + 1) if before.machine_of(j) != after.machine_of(j)
    )
    if not migrants:
        raise ValidationError("the two schedules are identical; a deviation must move someone")
    members = frozenset(coalition) if coalition is not None else migrants
    if not migrants <= members:
        stranded = min(migrants - members)
        raise ValidationError(f"job {stranded} migrates but is not in the coalition")
    old = load_profile(instance, before).loads
    new = load_profile(instance, after).loads
    for j in sorted(members):
        if not (new[after.machine_of(j) - 1] < old[before.machine_of(j) - 1]):
            raise ValidationError(
                f"job {j} does not strictly improve "
                f"({old[before.machine_of(j) - 1]} -> {new[after.machine_of(j) - 1]})"
            )
    return Deviation(before=before, after=after, migrants=migrants, coalition=members)


class _StopScan(Exception):
    pass


class ScanContext:
    """Read-only scaled-integer view of (instance, schedule) shared by a scan."""

    __slots__ = ("instance", "schedule", "m", "n", "sizes", "scale", "orig", "load0", "cost0")

    def __init__(self, instance: Instance, schedule: Schedule):
        validate_schedule(instance, schedule)
        self.instance = instance
        self.schedule = schedule
        self.m = instance.m
        self.n = instance.n
        self.sizes, self.scale = scaled_sizes(instance)
        self.orig = [i - 1 for i in schedule.assignment]
        load0 = [0] * self.m
        for j, i in enumerate(self.orig):
            load0[i] += self.sizes[i][j]
        self.load0 = load0
        self.cost0 = [load0[i] for i in self.orig]

    def to_schedule(self, assign) -> Schedule:
        return Schedule(tuple(i + 1 for i in assign))

    def migrants_of(self, assign) -> frozenset[int]:
        return frozenset(j + 1 for j in range(self.n) if assign[j] != self.orig[j])


def scan_deviations(
    instance: Instance,
    schedule: Schedule,
    *,
    budget: int,
    on_leaf: Callable,
    coalition=None,
    min_ratio_floor=None,
) -> ScanContext:
    """Depth-first search over joint actions, calling on_leaf(ctx, assign,
    loads) for every profitable candidate in lexicographic order.

    Without `coalition`, any set of jobs may move and a candidate is
    profitable iff every mover strictly improves.  With `coalition`, only
    those jobs may act and every member (moving or staying) must strictly
    improve.  A branch is cut as soon as some machine's partial load
    reaches the smallest original cost among the movers bound to it.
    `min_ratio_floor`, a mutable [num, den] pair, further prunes branches
    whose smallest member improvement ratio cannot exceed num/den.
    """
    if not isinstance(budget, int) or budget < 1:
        raise ValidationError(f"node budget must be positive, got {budget!r}")
    ctx = ScanContext(instance, schedule)
    m, n = ctx.m, ctx.n
    sizes, orig, cost0 = ctx.sizes, ctx.orig, ctx.cost0

    loads = [0] * m
    if coalition is None:
        free = list(range(n))
        members_fixed = False
    else:
        seen = set()
        for j in coalition:
            if not isinstance(j, int) or isinstance(j, bool) or not 1 <= j <= n:
                raise ValidationError(f"coalition member {j!r} is not a job index in 1..{n}")
            seen.add(j - 1)
        free = sorted(seen)
        members_fixed = True
        for j in range(n):
            if j not in seen:
                loads[orig[j]] += sizes[orig[j]][j]

    depth = len(free)
    infinity = sum(max(sizes[i][j] for i in range(m)) for j in range(n)) + 1
    caps = [infinity] * m
    assign = list(orig)
    choice = [0] * depth
    nodes = 0

    def resolved_fraction() -> Fraction:
        if depth == 0:
            return Fraction(1)
        covered = 0
        for d in range(depth):
            covered += choice[d] * m ** (depth - d - 1)
        return Fraction(covered, m**depth)

    def dfs(t: int, migrants: int):
        nonlocal nodes
        if t == depth:
            if migrants:
                on_leaf(ctx, assign, loads)
            return
        j = free[t]
        oj = orig[j]
        cj = cost0[j]
        for i in range(m):
            choice[t] = i
            nodes += 1
            if nodes > budget:
                raise BudgetExceededError(
                    f"deviation search exceeded {budget} nodes",
                    nodes=nodes,
                    budget=budget,
                    explored_fraction=resolved_fraction(),
                )
            stay = i == oj
            size = sizes[i][j]
            if not stay and size >= cj:
                continue
            new_load = loads[i] + size
            old_cap = caps[i]
            new_cap = old_cap
            if not stay or members_fixed:
                if cj < new_cap:
                    new_cap = cj
            if new_load >= new_cap:
                continue
            if min_ratio_floor is not None and new_cap != infinity:
                if new_cap * min_ratio_floor[1] <= new_load * min_ratio_floor[0]:
                    continue
            loads[i] = new_load
            caps[i] = new_cap
            assign[j] = i
            dfs(t + 1, migrants if stay else migrants + 1)
            loads[i] = new_load - size
            caps[i] = old_cap
        assign[j] = oj
        choice[t] = 0

    try:
        dfs(0, 0)
    except _StopScan:
        pass
    return ctx


def find_profitable_deviation(
    instance: Instance, schedule: Schedule, options: SearchOptions | None = None
) -> Deviation | None:
    """Search for a profitable joint move; None means the schedule is a
    strong equilibrium (the search is exhaustive within its budget).

    objective="any" returns the lexicographically smallest qualifying
    joint action; the maximize-* objectives return the deviation
    attaining the largest min-improvement, max-improvement (counting
    improving bystanders), or max-damage ratio respectively.
    """
    options = options or SearchOptions()
    if options.objective == "any":
        hit: list = []

        def grab(ctx, assign, loads):
            hit.append(ctx.to_schedule(assign))
            raise _StopScan

        ctx = scan_deviations(
            instance, schedule, budget=options.node_budget, on_leaf=grab
        )
        if not hit:
            return None
        return _attach_coalition(instance, ctx.schedule, hit[0], options.coalition_mode)

    best: dict = {}
    if options.objective == "maximize-ir-min":
        floor = [1, 1]

        def leaf(ctx, assign, loads):
            num, den = _leaf_min_improvement(ctx, assign, loads)
            if num is not None and num * floor[1] > floor[0] * den:
                floor[0], floor[1] = num, den
                best["after"] = ctx.to_schedule(assign)

        ctx = scan_deviations(
            instance,
            schedule,
            budget=options.node_budget,
            on_leaf=leaf,
            min_ratio_floor=floor,
        )
    elif options.objective == "maximize-ir-max":
        ctx = _scan_maximize(instance, schedule, options.node_budget, best, _leaf_max_improvement)
    else:  # maximize-dr-max
        ctx = _scan_maximize(instance, schedule, options.node_budget, best, _leaf_max_damage)
    if "after" not in best:
        return None
    return _attach_coalition(instance, ctx.schedule, best["after"], options.coalition_mode)


def _leaf_min_improvement(ctx, assign, loads):
    """Smallest improvement ratio among the movers of a leaf: (num, den)."""
    num, den = None, None
    for j in range(ctx.n):
        if assign[j] != ctx.orig[j]:
            c, l = ctx.cost0[j], loads[assign[j]]
            if num is None or c * den < num * l:
                num, den = c, l
    return num, den


def _stayer_flags(ctx, assign):
    stayers = [False] * ctx.m
    for j in range(ctx.n):
        if assign[j] == ctx.orig[j]:
            stayers[assign[j]] = True
    return stayers


def _leaf_max_improvement(ctx, assign, loads):
    """Largest improvement over movers and improving bystanders: (num, den)."""
    num, den = None, None
    for j in range(ctx.n):
        if assign[j] != ctx.orig[j]:
            c, l = ctx.cost0[j], loads[assign[j]]
            if num is None or c * den > num * l:
                num, den = c, l
    stayers = _stayer_flags(ctx, assign)
    for i in range(ctx.m):
        if stayers[i] and loads[i] < ctx.load0[i]:
            c, l = ctx.load0[i], loads[i]
            if num is None or c * den > num * l:
                num, den = c, l
    return num, den


def _leaf_max_damage(ctx, assign, loads):
    """Largest load growth on a machine keeping at least one job: (num, den)."""
    num, den = None, None
    stayers = _stayer_flags(ctx, assign)
    for i in range(ctx.m):
        if stayers[i] and loads[i] > ctx.load0[i]:
            c, l = loads[i], ctx.load0[i]
            if num is None or c * den > num * l:
                num, den = c, l
    return num, den


def _scan_maximize(instance, schedule, budget, best, leaf_value):
    state = [0, 1]  # best value seen, as num/den

    def leaf(ctx, assign, loads):
        num, den = leaf_value(ctx, assign, loads)
        if num is not None and num * state[1] > state[0] * den:
            state[0], state[1] = num, den
            best["after"] = ctx.to_schedule(assign)

    return scan_deviations(instance, schedule, budget=budget, on_leaf=leaf)


def _attach_coalition(instance, before, after, coalition_mode) -> Deviation:
    migrants = frozenset(
        j for j in range(1, instance.n + 1) if before.machine_of(j) != after.machine_of(j)
    )
    coalition = migrants
    if coalition_mode == "migrants-plus-improvers":
        coalition = migrants | improving_bystanders(instance, before, after)
    return Deviation(before=before, after=after, migrants=migrants, coalition=coalition)


def is_strong(
    instance: Instance, schedule: Schedule, node_budget: int = DEFAULT_SEARCH_BUDGET
) -> StrongResult:
    """Is the schedule resilient to every coalition move?  Exhaustive
    within the budget; raises BudgetExceededError rather than guessing."""
    witness = find_profitable_deviation(
        instance, schedule, SearchOptions(node_budget=node_budget)
    )
    return StrongResult(holds=witness is None, witness=witness)


def can_coalition_deviate(
    instance: Instance,
    schedule: Schedule,
    coalition,
    node_budget: int = DEFAULT_SEARCH_BUDGET,
) -> Deviation | None:
    """Joint move of exactly the given jobs in which every one of them
    (moving or staying put) strictly improves; None if impossible."""
    members = frozenset(coalition)
    if not members:
        return None
    hit: list = []

    def grab(ctx, assign, loads):
        hit.append(ctx.to_schedule(assign))
        raise _StopScan

    scan_deviations(
        instance, schedule, budget=node_budget, on_leaf=grab, coalition=members
    )
    if not hit:
        return None
    after = hit[0]
    migrants = frozenset(
        j for j in range(1, instance.n + 1) if schedule.machine_of(j) != after.machine_of(j)
    )
    return Deviation(before=schedule, after=after, migrants=migrants, coalition=members)


@dataclass(frozen=True)
class DeviationSweep:
    """Materialized stream of profitable deviations in lexicographic
    order; `complete` is False when a limit or the budget truncated it."""

    deviations: tuple[Deviation, ...]
    complete: bool

    def __iter__(self):
        return iter(self.deviations)

    def __len__(self):
        return len(self.deviations)


def enumerate_profitable_deviations(
    instance: Instance,
    schedule: Schedule,
    limit: int | None = None,
    node_budget: int = DEFAULT_SEARCH_BUDGET,
) -> DeviationSweep:
    """Every profitable deviation (movers-only coalitions), lexicographic
    in the joint action; complete iff it finished under budget and limit."""
    found: list[Deviation] = []
    truncated = False

    def grab(ctx, assign, loads):
        nonlocal truncated
        after = ctx.to_schedule(assign)
        migrants = ctx.migrants_of(assign)
        found.append(
            Deviation(before=ctx.schedule, after=after, migrants=migrants, coalition=migrants)
        )
        if limit is not None and len(found) >= limit:
            truncated = True
            raise _StopScan

    try:
        scan_deviations(instance, schedule, budget=node_budget, on_leaf=grab)
    except BudgetExceededError:
        truncated = True
    return DeviationSweep(deviations=tuple(found), complete=not truncated)
