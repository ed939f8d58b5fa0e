import os
import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

from _helpers import random_stable_system, write_mtx_dir  # noqa: E402

from noisyloewner import InterpolationSet, StateSpaceSystem, build_loewner, make_penzl, sample_data  # noqa: E402
from noisyloewner.experiments import ExperimentConfig, prepare  # noqa: E402

settings.register_profile('default', max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile('default')


@pytest.fixture(scope='session')
def penzl():
    return make_penzl()


@pytest.fixture(scope='session')
def penzl_problem(penzl):
    return prepare(ExperimentConfig(), penzl)


@pytest.fixture
def scalar_sys():
    # H(s) = 1 / (s + 1)
    return StateSpaceSystem([[1.0]], [[-1.0]], [1.0], [1.0])


@pytest.fixture
def scalar_points():
    return InterpolationSet([1j], [-1j])


@pytest.fixture
def scalar_data(scalar_sys, scalar_points):
    return sample_data(scalar_sys, scalar_points)


@pytest.fixture
def scalar_model(scalar_data):
    return build_loewner(scalar_data)


@pytest.fixture
def small_system_dir(tmp_path):
    sys30 = random_stable_system(np.random.default_rng(30), 30)
    return write_mtx_dir(tmp_path / 'sys30', sys30.A, sys30.B[:, None], sys30.C[None, :])
