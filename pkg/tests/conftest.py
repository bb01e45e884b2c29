import numpy as np
import pytest

import spinanneal as sp
from spinanneal.schedule import AnnealSchedule


@pytest.fixture(scope="session")
def gadget4():
    return sp.make_gadget(4)


@pytest.fixture(scope="session")
def info4(gadget4):
    return sp.enumerate_ground_space(gadget4)


@pytest.fixture(scope="session")
def default_sched():
    return sp.default_schedule()


@pytest.fixture(scope="session")
def const_schedule():
    """A(s) = 0, B(s) = 1 everywhere: fixed-point dynamics for chain tests."""
    return AnnealSchedule(s=np.array([0.0, 1.0]), A=np.array([0.0, 0.0]),
                          B=np.array([1.0, 1.0]), name="const")
