"""Action selection and the two fixed baselines."""

import numpy as np

STANDARD_ACTION = 6


def select_action(probs, mode="sample", rng=None) -> int:
    """1-based action from a probability vector.

    Greedy mode breaks ties towards the lowest index.
    """
    probs = np.asarray(probs, dtype=float)
    if mode == "greedy":
        return int(np.argmax(probs)) + 1
    if mode != "sample":
        raise ValueError(f"unknown selection mode {mode!r}")
    cdf = np.cumsum(probs)
    k = int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"))
    return min(k, len(probs) - 1) + 1


def standard_policy(obs=None) -> int:
    """Keep every radio at full rate and never intervene."""
    return STANDARD_ACTION


def random_policy(rng, obs=None) -> int:
    return int(rng.integers(1, 7))


def normalize_observation(obs, rate_max=500.0, ttl=3600.0):
    """Scale rates by ``rate_max`` and the mean delay by ``ttl``.

    Occupancy and utilizations are already fractions.
    """
    x = np.array(obs, dtype=float)
    n_nodes = (len(x) - 2) // 2
    x[1 : 1 + n_nodes] /= rate_max
    x[1 + n_nodes] /= ttl
    return x
