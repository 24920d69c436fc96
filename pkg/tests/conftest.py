import pytest

from weaktrace import builtin_scenario


@pytest.fixture(scope="session")
def fig1():
    return builtin_scenario("fig1")


@pytest.fixture(scope="session")
def fig2():
    return builtin_scenario("fig2")
