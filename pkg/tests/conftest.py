import numpy as np
import pytest

from schedsim.harness import generate_pool, generate_workload
from schedsim.model import ResourcePool, Workload


def random_instance(n_tasks, n_resources, seed, length_range=(100, 1000), mips_range=(100, 1000)):
    return generate_workload(n_tasks, length_range, seed), generate_pool(n_resources, mips_range, seed)


@pytest.fixture
def small_instance():
    return Workload.from_lengths([100, 200, 300]), ResourcePool.from_mips([500, 250])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
