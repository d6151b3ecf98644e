import pytest

from conetrace import builtin


@pytest.fixture(scope="session")
def octagon():
    return builtin("octagon6pi")


@pytest.fixture(scope="session")
def decagon():
    return builtin("decagon4pi4pi")
