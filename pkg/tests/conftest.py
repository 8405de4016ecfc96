import pytest

from solitoncs.config import RunConfig
from solitoncs.numerics import Grid1D, MomentumNodes


@pytest.fixture(scope="session")
def grid():
    return Grid1D(-20.0, 20.0, 2001)


@pytest.fixture(scope="session")
def nodes():
    return MomentumNodes()


@pytest.fixture(scope="session")
def cfg():
    return RunConfig()
