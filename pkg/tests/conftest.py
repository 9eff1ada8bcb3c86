import numpy as np
import pytest

from korovkinlab import Grid, make_test_suite, suite_by_id


@pytest.fixture(scope="session")
def suite():
    return make_test_suite()


@pytest.fixture(scope="session")
def by_id():
    return suite_by_id()


@pytest.fixture(scope="session")
def grid():
    return Grid(4096)


@pytest.fixture(scope="session")
def grid1k():
    return Grid(1024)


@pytest.fixture()
def rng():
    return np.random.default_rng(20220928)
