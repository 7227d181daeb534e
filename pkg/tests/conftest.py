import pytest

from gaploc import load_fixture


@pytest.fixture(scope="session")
def t1():
    return load_fixture("T1")


@pytest.fixture(scope="session")
def mvd():
    return load_fixture("MVD-params")


@pytest.fixture(scope="session")
def bbca():
    return load_fixture("BBCA-params")
