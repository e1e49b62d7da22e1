import numpy as np
import pytest

from maxroot import painleve


@pytest.fixture(scope="session")
def table():
    """Default-range table shared by the whole suite."""
    return painleve.default_table()


@pytest.fixture(scope="session")
def wide_table():
    """Table reaching x = 12 so diagnostics at x = 10 stay interior."""
    return painleve.build_table(-10.0, 12.0)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)
