import pytest

from algebroids import Scalar, make_example, parse_scalar


@pytest.fixture
def tangent2():
    return make_example("tangent_lie", n=2).algebroid


@pytest.fixture
def courant1():
    return make_example("courant_standard", n=1)


@pytest.fixture
def courant2():
    return make_example("courant_standard", n=2)


def scal(text: str, names) -> Scalar:
    return parse_scalar(text, names)
