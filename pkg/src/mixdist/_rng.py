import numpy as np


def rng_for(seed, *key):
    """Independent generator for the stream addressed by ``key`` under ``seed``.

    Streams for different keys are statistically independent and do not depend
    on the order in which they are requested.
    """
    key = tuple(int(k) for k in key)
    return np.random.default_rng(np.random.SeedSequence(entropy=int(seed), spawn_key=key))
