"""
Seeding helpers.

All randomized operations draw from numpy's PCG64 bit generator, keyed by a
SeedSequence so that per-record streams are independent of execution order.
"""
import numpy as np

PRNG_ALGORITHM = 'PCG64/SeedSequence'


def make_rng(seed, *keys):
    """
    Build a generator for ``seed`` split by ``keys``.

    Args:
        seed: Top-level (manifest, training, experiment) seed
        *keys: Integers identifying the sub-stream (record index, epoch...)

    Returns:
        numpy.random.Generator: PCG64 generator
    """
    entropy = [int(seed)] + [int(k) for k in keys]
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))


def derive_seed(seed, *keys):
    """Return a 64-bit integer seed derived from ``seed`` and ``keys``."""
    entropy = [int(seed)] + [int(k) for k in keys]
    state = np.random.SeedSequence(entropy).generate_state(1, dtype=np.uint64)
    return int(state[0])
