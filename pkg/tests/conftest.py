import time

import pytest

from apoint_lab.special_fn import primes_up_to
from apoint_lab.stats import dist_log_zeta
from apoint_lab.zeros_apoints import find_zeros


@pytest.fixture(scope="session")
def zeros_to_2e5():
    """Every zero ordinate in [10, 2e5 + 5], with the time it took."""
    t0 = time.perf_counter()
    zl = find_zeros(10.0, 2e5 + 5.0)
    return zl, time.perf_counter() - t0


@pytest.fixture(scope="session")
def dist_1e6():
    t0 = time.perf_counter()
    d = dist_log_zeta(1e6, 0.0, 100_000, 1)
    return d, time.perf_counter() - t0


@pytest.fixture(scope="session")
def table_1e6():
    return primes_up_to(10**6)
