from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from darmonlab.numberfield import parse_field

settings.register_profile(
    "darmonlab", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("darmonlab")

FIELD_SPECS = ["Q", "Q(sqrt,-1)", "Q(sqrt,2)", "Q(sqrt,-5)", "poly:[-1,-1,0,1]"]
FIELDS = {s: parse_field(s) for s in FIELD_SPECS}


@pytest.fixture(scope="session")
def QQ():
    return FIELDS["Q"]


@pytest.fixture(scope="session")
def Qi():
    return FIELDS["Q(sqrt,-1)"]


@pytest.fixture(scope="session")
def Qr2():
    return FIELDS["Q(sqrt,2)"]


@pytest.fixture(scope="session")
def Qm5():
    return FIELDS["Q(sqrt,-5)"]


@pytest.fixture(scope="session")
def cubic():
    return FIELDS["poly:[-1,-1,0,1]"]


def rationals(height=30, nonzero=True):
    s = st.builds(Fraction, st.integers(-height, height), st.integers(1, height))
    return s.filter(bool) if nonzero else s


def elements(K, height=20, nonzero=True):
    s = st.lists(rationals(height, nonzero=False), min_size=K.degree, max_size=K.degree).map(K.element)
    return s.filter(lambda x: not x.is_zero()) if nonzero else s


field_specs = st.sampled_from(FIELD_SPECS)
