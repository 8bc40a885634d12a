import numpy as np
import pytest

from cfmvc.data import save_dataset
from cfmvc.toys import gen_blobs, gen_three_ring, gen_two_moon


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(scope='session')
def two_moon():
    return gen_two_moon(200, 0.05, seed=7)


@pytest.fixture(scope='session')
def three_ring():
    return gen_three_ring(200, 0.05, seed=7)


@pytest.fixture(scope='session')
def small_blobs():
    """Two well separated blobs in two views, small enough for quick end-to-end runs."""
    return gen_blobs(40, 2, dims=2, separation=20.0, views=2, seed=3)


@pytest.fixture
def blobs_dir(tmp_path, small_blobs):
    path = tmp_path / 'blobs'
    save_dataset(small_blobs, path)
    return path
