import numpy as np
import pytest

import eitlab as el


@pytest.fixture(scope="session")
def strips2_mesh64():
    p = el.build_partition(2)
    return p, el.generate_mesh(p, 1 / 64)


@pytest.fixture(scope="session")
def strips3_mesh64():
    p = el.build_partition(3)
    return p, el.generate_mesh(p, 1 / 64)


@pytest.fixture(scope="session")
def disk_mesh64():
    return el.generate_disk_mesh(1 / 64)


@pytest.fixture(scope="session")
def disk_mesh32():
    return el.generate_disk_mesh(1 / 32)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240831)
