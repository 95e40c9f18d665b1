"""Independent random streams derived from a master seed.

Every stochastic step draws from a generator keyed by (master seed, stream
tag, indices...), so results do not depend on the order in which ants,
iterations or runs are executed.
"""

import numpy as np

ANT = 0
CSA = 1
WORKLOAD = 2
POOL = 3


def stream(seed: int, tag: int, *indices: int) -> np.random.Generator:
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    return np.random.default_rng(np.random.SeedSequence([seed, tag, *indices]))
