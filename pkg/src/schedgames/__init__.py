"""Scheduling games: exact schedulers, equilibrium checks, and stability
measures under coalition deviations."""

from .core import (
    BudgetExceededError,
    IdenticalInstance,
    LoadProfile,
    Schedule,
    UnrelatedInstance,
    ValidationError,
    canonical_form,
    induced_instance,
    job_cost,
    load_profile,
    parse_rational,
)
from .equilibria import (
    Deviation,
    SearchOptions,
    can_coalition_deviate,
    enumerate_profitable_deviations,
    find_profitable_deviation,
    is_nash,
    is_strong,
    profitable_deviation,
)
from .measures import (
    MeasureReport,
    alpha_strong,
    check_flower,
    deviation_stats,
    dr_max,
    ir_max,
    ir_min,
    measure_report,
    structural_report,
)
from .schedulers import (
    PtasConfig,
    lex_compare,
    lex_min_assignment,
    list_schedule,
    lpt,
    optimal_makespan,
    ptas,
)

__all__ = [
    "BudgetExceededError",
    "Deviation",
    "IdenticalInstance",
    "LoadProfile",
    "MeasureReport",
    "PtasConfig",
    "Schedule",
    "SearchOptions",
    "UnrelatedInstance",
    "ValidationError",
    "alpha_strong",
    "can_coalition_deviate",
    "canonical_form",
    "check_flower",
    "deviation_stats",
    "dr_max",
    "enumerate_profitable_deviations",
    "find_profitable_deviation",
    "induced_instance",
    "ir_max",
    "ir_min",
    "is_nash",
    "is_strong",
    "job_cost",
    "lex_compare",
    "lex_min_assignment",
    "list_schedule",
    "load_profile",
    "lpt",
    "measure_report",
    "optimal_makespan",
    "parse_rational",
    "profitable_deviation",
    "ptas",
    "structural_report",
]
