import pytest

from hsagg import scheme


@pytest.fixture(scope="session")
def ex1():
    return scheme.build_example1()


@pytest.fixture(scope="session")
def ex2():
    return scheme.build_example2()
