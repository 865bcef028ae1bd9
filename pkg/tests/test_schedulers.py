from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from conftest import identical_instances
from oracles import (
    brute_lex_min_vector,
    brute_optimal_makespan,
    greedy_resimulation,
)
from schedgames.core import (
    BudgetExceededError,
    IdenticalInstance,
    Schedule,
    ValidationError,
    induced_instance,
    load_profile,
)
from schedgames.equilibria import is_nash, is_strong
from schedgames.schedulers import (
    PtasConfig,
    lex_compare,
    lex_min_assignment,
    list_schedule,
    lpt,
    optimal_makespan,
    ptas,
    size_ordered_jobs,
    sorted_loads,
)


def loads_of(instance, schedule):
    return sorted(load_profile(instance, schedule).loads, reverse=True)


# --- lpt ---------------------------------------------------------------


def test_lpt_rounded_benchmark_instance():
    instance = IdenticalInstance(m=3, p=("1.633", "1.633", "1.367", "1.266", "1", "1", "1"))
    assert loads_of(instance, lpt(instance)) == [
        Fraction(3633, 1000),
        Fraction(2633, 1000),
        Fraction(2633, 1000),
    ]


def test_lpt_spreads_equal_jobs():
    instance = IdenticalInstance(m=3, p=(2, 2, 2))
    assert loads_of(instance, lpt(instance)) == [2, 2, 2]


def test_lpt_greedy_trace():
    instance = IdenticalInstance(m=3, p=(5, 5, 3, 3, 2, 2))
    schedule = lpt(instance)
    assert loads_of(instance, schedule) == [7, 7, 6]
    assert schedule.assignment == greedy_resimulation(instance, size_ordered_jobs(instance))


@given(identical_instances(min_m=1, max_m=4, max_n=7))
def test_lpt_matches_reference_greedy_on_sorted_order(instance):
    assert lpt(instance).assignment == greedy_resimulation(
        instance, size_ordered_jobs(instance)
    )


@given(identical_instances(min_m=1, max_m=4, max_n=7))
def test_lpt_output_is_equilibrium(instance):
    assert is_nash(instance, lpt(instance)).holds


@given(identical_instances(min_m=2, max_m=4, min_n=1, max_n=7), st.data())
def test_lpt_is_subset_preserving(instance, data):
    schedule = lpt(instance)
    subset = data.draw(st.sets(st.integers(1, instance.m), min_size=1, max_size=instance.m))
    induced = induced_instance(instance, schedule, subset)
    assert lpt(induced.instance).assignment == induced.induced_schedule(schedule).assignment


@given(identical_instances(min_m=1, max_m=3, max_n=6))
def test_lpt_meets_four_thirds_makespan_bound(instance):
    bound = Fraction(4, 3) - Fraction(1, 3 * instance.m)
    opt = optimal_makespan(instance).value
    assert load_profile(instance, lpt(instance)).makespan <= bound * opt


# --- list_schedule -----------------------------------------------------


def test_list_schedule_traps_unit_job_with_long_job():
    instance = IdenticalInstance(m=2, p=(1, 1, 10))
    schedule = list_schedule(instance, (1, 2, 3))
    assert load_profile(instance, schedule).loads == (11, 1)


def test_list_schedule_sorted_order_equals_lpt():
    instance = IdenticalInstance(m=3, p=(4, 1, 3, 3, 2))
    assert (
        list_schedule(instance, size_ordered_jobs(instance)).assignment
        == lpt(instance).assignment
    )


def test_list_schedule_arrival_order_trace():
    instance = IdenticalInstance(m=3, p=("0.8", "0.9", "1", "2", "10", "2", "3"))
    order = tuple(range(1, 8))
    assert list_schedule(instance, order).assignment == greedy_resimulation(instance, order)


def test_list_schedule_rejects_non_permutation():
    instance = IdenticalInstance(m=2, p=(1, 2, 3))
    with pytest.raises(ValidationError):
        list_schedule(instance, (1, 2, 2))
    with pytest.raises(ValidationError):
        list_schedule(instance, (1, 2))


@given(identical_instances(min_m=1, max_m=3, max_n=6), st.randoms(use_true_random=False))
def test_list_schedule_meets_two_approximation(instance, rnd):
    order = list(range(1, instance.n + 1))
    rnd.shuffle(order)
    schedule = list_schedule(instance, order)
    bound = 2 - Fraction(1, instance.m)
    assert load_profile(instance, schedule).makespan <= bound * optimal_makespan(instance).value


# --- lex_min_assignment ------------------------------------------------


def test_lex_min_spreads_three_jobs():
    instance = IdenticalInstance(m=3, p=(5, 5, 3))
    partial = lex_min_assignment(instance, 3)
    assert sorted_loads(partial.loads) == (5, 5, 3)


def test_lex_min_benchmark_vector():
    instance = IdenticalInstance(m=3, p=(5, 5, 3, 3, 2, 2))
    partial = lex_min_assignment(instance, 6)
    assert sorted_loads(partial.loads) == (7, 7, 6)
    assert sorted_loads(partial.loads) == brute_lex_min_vector(instance, range(1, 7))


def test_lex_min_empty_prefix():
    instance = IdenticalInstance(m=2, p=(1, 2))
    partial = lex_min_assignment(instance, 0)
    assert partial.jobs == () and partial.machines == ()


def test_lex_min_rejects_bad_k():
    instance = IdenticalInstance(m=2, p=(1, 2))
    with pytest.raises(ValidationError):
        lex_min_assignment(instance, 3)
    with pytest.raises(ValidationError):
        lex_min_assignment(instance, -1)


def test_lex_min_budget_error_names_bound():
    instance = IdenticalInstance(m=3, p=(1,) * 8)
    with pytest.raises(BudgetExceededError, match="3\\^8"):
        lex_min_assignment(instance, 8, node_budget=10)


@given(identical_instances(min_m=1, max_m=3, min_n=0, max_n=6))
def test_lex_min_matches_exhaustive_oracle(instance):
    k = instance.n
    partial = lex_min_assignment(instance, k)
    chosen = size_ordered_jobs(instance)[:k]
    assert sorted_loads(partial.loads) == brute_lex_min_vector(instance, chosen)


@given(identical_instances(min_m=2, max_m=3, min_n=1, max_n=5))
def test_lex_min_prefix_is_strong_on_its_subinstance(instance):
    partial = lex_min_assignment(instance, instance.n)
    by_job = partial.as_mapping()
    schedule = Schedule(tuple(by_job[j] for j in range(1, instance.n + 1)))
    assert is_strong(instance, schedule).holds


# --- lex_compare -------------------------------------------------------


def test_lex_compare_first_component():
    assert lex_compare((7, 7, 6), (8, 6, 6)) == -1
    assert lex_compare((8, 6, 6), (7, 7, 6)) == 1


def test_lex_compare_equal():
    assert lex_compare((7, 7, 6), (7, 7, 6)) == 0


def test_lex_compare_normalizes_unsorted_input():
    assert lex_compare((7, 6, 7), (7, 7, 6)) == 0


def test_lex_compare_rejects_length_mismatch():
    with pytest.raises(ValidationError):
        lex_compare((1, 2), (1, 2, 3))


# --- ptas --------------------------------------------------------------


def test_ptas_all_jobs_in_prefix_is_optimal():
    instance = IdenticalInstance(m=3, p=(5, 5, 3, 3, 2, 2))
    schedule = ptas(instance, PtasConfig(epsilon=Fraction(1, 100)))  # k >= n
    assert load_profile(instance, schedule).makespan == optimal_makespan(instance).value
    assert loads_of(instance, schedule) == [7, 7, 6]


def test_ptas_two_machine_benchmark():
    instance = IdenticalInstance(m=2, p=(3, 3, 2, 2, 2))
    schedule = ptas(instance, PtasConfig(epsilon=Fraction(1)))  # k = 2
    assert loads_of(instance, schedule) == [7, 5]
    assert optimal_makespan(instance).value == 6


def test_ptas_rejects_nonpositive_epsilon():
    with pytest.raises(ValidationError):
        PtasConfig(epsilon=Fraction(0))
    with pytest.raises(ValidationError):
        PtasConfig(epsilon=Fraction(-1, 2))


def test_ptas_budget_error():
    instance = IdenticalInstance(m=3, p=(1,) * 9)
    with pytest.raises(BudgetExceededError):
        ptas(instance, PtasConfig(epsilon=Fraction(1, 3), node_budget=20))


def test_ptas_prefix_size():
    config = PtasConfig(epsilon=Fraction(1, 2))
    assert config.prefix_size(m=3, n=100) == 6
    assert config.prefix_size(m=3, n=4) == 4
    assert PtasConfig(epsilon=Fraction(1), k_override=2).prefix_size(m=3, n=100) == 2


@given(
    identical_instances(min_m=2, max_m=3, max_n=7),
    st.sampled_from([Fraction(1), Fraction(1, 2)]),
    st.booleans(),
)
@settings(max_examples=40)
def test_ptas_meets_makespan_bound_and_equilibrium(instance, eps, refine):
    schedule = ptas(instance, PtasConfig(epsilon=eps, refine=refine))
    opt = optimal_makespan(instance).value
    assert load_profile(instance, schedule).makespan <= (1 + eps) * opt
    assert is_nash(instance, schedule).holds


@given(
    identical_instances(min_m=2, max_m=3, min_n=1, max_n=6),
    st.sampled_from([Fraction(1), Fraction(1, 2)]),
    st.data(),
)
@settings(max_examples=40)
def test_ptas_stays_near_optimal_on_every_machine_subset(instance, eps, data):
    schedule = ptas(instance, PtasConfig(epsilon=eps))
    subset = data.draw(st.sets(st.integers(1, instance.m), min_size=1, max_size=instance.m))
    induced = induced_instance(instance, schedule, subset)
    induced_span = load_profile(
        induced.instance, induced.induced_schedule(schedule)
    ).makespan
    assert induced_span <= (1 + eps) * optimal_makespan(induced.instance).value


# --- optimal_makespan --------------------------------------------------


def test_optimal_makespan_benchmark():
    instance = IdenticalInstance(m=3, p=(5, 5, 3, 2, 3, 2))
    result = optimal_makespan(instance)
    assert result.value == 7
    assert loads_of(instance, result.schedule) == [7, 7, 6]


def test_optimal_makespan_single_job():
    instance = IdenticalInstance(m=3, p=(9,))
    assert optimal_makespan(instance).value == 9


def test_optimal_makespan_two_machines():
    instance = IdenticalInstance(m=2, p=(3, 3, 2, 2, 2))
    assert optimal_makespan(instance).value == 6


def test_optimal_makespan_budget_error_carries_best():
    # greedy warm start (makespan 9) beats neither lower bound (8), so
    # the search has to run and trips the tiny budget
    instance = IdenticalInstance(m=2, p=(4, 3, 3, 3, 3))
    with pytest.raises(BudgetExceededError) as info:
        optimal_makespan(instance, node_budget=3)
    best = info.value.best
    assert best is not None
    assert load_profile(instance, best.schedule).makespan == best.value


@given(identical_instances(min_m=1, max_m=3, max_n=6))
def test_optimal_makespan_matches_exhaustive_oracle(instance):
    result = optimal_makespan(instance)
    expected = brute_optimal_makespan(instance) if instance.n else Fraction(0)
    assert result.value == expected
    assert load_profile(instance, result.schedule).makespan == result.value
