import random

import pytest

from hstorus.lattice import RANK, LatticeClass


@pytest.fixture
def rng():
    return random.Random(1729)


def random_class(rng, bound=9):
    return LatticeClass(tuple(rng.randint(-bound, bound) for _ in range(RANK)))
