"""
Reproducible random streams.

Every experiment derives trial t from (master seed, t) with the counter based
Philox generator, so trials are independent of each other and of execution order.
"""
import numpy as np


def trial_rng(seed: int, trial: int = 0) -> np.random.Generator:
    """
    :param seed: master seed (64 bit)
    :param trial: trial index
    :return: numpy Generator backed by Philox
    """
    sequence = np.random.SeedSequence(entropy=seed, spawn_key=(trial,))
    return np.random.Generator(np.random.Philox(sequence))


def random_bits(rng: np.random.Generator, shape) -> np.ndarray:
    """Uniform 0/1 array of dtype uint8."""
    return rng.integers(0, 2, size=shape, dtype=np.uint8)
