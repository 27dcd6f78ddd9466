import numpy as np
import pytest

import sl2mc
from sl2mc import Ensemble, TracelessGenerator, QPolynomial


@pytest.fixture(scope="session", autouse=True)
def _threads():
    sl2mc.set_threads(2)


@pytest.fixture
def rotation_ensemble():
    # deterministic rotation generator: all gains vanish
    return Ensemble.from_atoms([(1.0, TracelessGenerator(0.0, -1.0, 1.0))])


@pytest.fixture
def diagonal_ensemble():
    return Ensemble.from_atoms([(1.0, TracelessGenerator(1.0, 0.0, 0.0))])


@pytest.fixture
def coin_diagonal_ensemble():
    # P = +-(1,0,0) equally: log norm at theta=0 is a centered random walk
    return Ensemble.from_atoms(
        [(0.5, TracelessGenerator(1.0, 0.0, 0.0)), (0.5, TracelessGenerator(-1.0, 0.0, 0.0))]
    )


@pytest.fixture
def centered_vw_ensemble():
    # P = v*(1,0,0) + w*(0,1,-1), v,w in {+-1} independent
    atoms = [(0.25, TracelessGenerator(v, w, -w)) for v in (1.0, -1.0) for w in (1.0, -1.0)]
    return Ensemble.from_atoms(atoms)


def random_generator(rng) -> TracelessGenerator:
    a, b, c = rng.uniform(-2.0, 2.0, size=3)
    return TracelessGenerator(a, b, c)


def random_unimodular(rng):
    from sl2mc import exponential

    return exponential(rng.uniform(0.1, 1.0), random_generator(rng))
