import numpy as np
import pytest

from mop import RecurrenceSpec, Symbol

# reference configurations with independently frozen expected values
P8 = (3, 1, 5, 2, 2, 9, 6, 1)     # p=2, period 8; real sections known to 2 digits
P6 = (3, 2, 3, 5, 4, 1)           # p=2, period 6; interlacing demo configuration
ORD4 = (3.0, 1.2, 2.0, 0.7)       # p=2, period 4; residue products 6 > 0.84


@pytest.fixture(scope="session")
def spec_p8():
    return RecurrenceSpec.periodic(2, P8)


@pytest.fixture(scope="session")
def sym_p8(spec_p8):
    return Symbol.from_recurrence(spec_p8)


@pytest.fixture(scope="session")
def spec_p6():
    return RecurrenceSpec.periodic(2, P6)


@pytest.fixture(scope="session")
def spec_ord():
    return RecurrenceSpec.periodic(2, ORD4)


@pytest.fixture(scope="session")
def sym_ord(spec_ord):
    return Symbol.from_recurrence(spec_ord)


def random_positive_spec(rng, p_choices=(2, 3, 4), r_hi=7, lo=0.3, hi=3.0):
    p = int(rng.choice(p_choices))
    r = int(rng.integers(1, r_hi))
    return RecurrenceSpec.periodic(p, rng.uniform(lo, hi, r))
