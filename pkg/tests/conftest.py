import numpy as np
import pytest

from evoinspect.core import GameParams, QuadraticCost, SigmoidNorm

CLEAN = dict(r=1.0, l=2.0, f=3.0, c=1.0, lam=0.8, N=1000, omega=0.5, beta=0.05, delta=0.1)
NORM_CASE = dict(CLEAN, f=1.0)


@pytest.fixture
def clean():
    return GameParams(**CLEAN)


@pytest.fixture
def clean_cost(clean):
    return QuadraticCost.linear_response(clean)


@pytest.fixture
def norm_params():
    return GameParams(**NORM_CASE)


@pytest.fixture
def sigmoid():
    return SigmoidNorm(1.5, 20.0, 0.5)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
