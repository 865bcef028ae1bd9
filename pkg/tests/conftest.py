import sys
from fractions import Fraction
from pathlib import Path

from hypothesis import HealthCheck, settings, strategies as st

from schedgames.core import IdenticalInstance, Schedule

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile(
    "suite",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


def rationals(max_value=8, max_denominator=12):
    return st.fractions(
        min_value=Fraction(1, max_denominator),
        max_value=Fraction(max_value),
        max_denominator=max_denominator,
    )


def identical_instances(min_m=1, max_m=3, min_n=0, max_n=6, sizes=None):
    sizes = sizes or rationals()
    return st.builds(
        lambda m, p: IdenticalInstance(m=m, p=tuple(p)),
        st.integers(min_m, max_m),
        st.lists(sizes, min_size=min_n, max_size=max_n),
    )


@st.composite
def instance_with_schedule(draw, min_m=1, max_m=3, min_n=0, max_n=6, sizes=None):
    instance = draw(identical_instances(min_m, max_m, min_n, max_n, sizes))
    assignment = draw(
        st.lists(
            st.integers(1, instance.m),
            min_size=instance.n,
            max_size=instance.n,
        )
    )
    return instance, Schedule(tuple(assignment))
