from fractions import Fraction

import numpy as np
import pytest

from fibochain.golden import GoldenInt, GoldenNum
from fibochain.model_set import ModelSetSpec, cut_and_project
from fibochain.substitution import geometric_inflation, get_rule


@pytest.fixture(scope="session")
def fib_spec() -> ModelSetSpec:
    return ModelSetSpec.fibonacci()


@pytest.fixture(scope="session")
def fibonacci():
    return get_rule("fibonacci")


@pytest.fixture(scope="session")
def reshuffled():
    return get_rule("reshuffled")


@pytest.fixture(scope="session")
def fib_inflation(fibonacci):
    return geometric_inflation(fibonacci)


@pytest.fixture(scope="session")
def reshuffled_inflation(reshuffled):
    return geometric_inflation(reshuffled)


@pytest.fixture(scope="session")
def large_patch(fib_spec):
    """The model set on [-1e5, 1e5], shared by the slow oracle tests."""
    return cut_and_project(fib_spec, (-100_000, 100_000))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def golden_ints(rng):
    pairs = rng.integers(-50, 51, size=(60, 2))
    return [GoldenInt(int(m), int(n)) for m, n in pairs]


@pytest.fixture
def golden_nums(rng):
    values = []
    for a, b, c, d in rng.integers(-30, 31, size=(60, 4)):
        values.append(
            GoldenNum(Fraction(int(a), abs(int(c)) + 1), Fraction(int(b), abs(int(d)) + 1))
        )
    return values
