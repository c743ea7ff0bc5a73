"""Shared generators for randomized solver tests."""

import numpy as np

import rdc


def random_binary_source(rng: np.random.Generator, floor: float = 0.05) -> rdc.MixtureSource:
    """Binary mixture source with priors and pmfs bounded away from degenerate."""
    prior1 = rng.uniform(0.2, 0.8)
    p1 = rng.uniform(floor, 1.0 - floor)
    p2 = rng.uniform(floor, 1.0 - floor)
    return rdc.MixtureSource(prior1, 1.0 - prior1, [p1, 1.0 - p1], [p2, 1.0 - p2])


def random_channel(rng: np.random.Generator, n: int, m: int) -> rdc.Channel:
    k = rng.uniform(0.01, 1.0, size=(n, m))
    return rdc.Channel(k / k.sum(axis=1, keepdims=True))


def random_source(rng: np.random.Generator, n: int, floor: float = 0.01) -> rdc.MixtureSource:
    prior1 = rng.uniform(0.2, 0.8)
    p1 = rng.uniform(floor, 1.0, size=n)
    p2 = rng.uniform(floor, 1.0, size=n)
    return rdc.MixtureSource(prior1, 1.0 - prior1, p1 / p1.sum(), p2 / p2.sum())


def clean_bayes_error(source: rdc.MixtureSource) -> float:
    """Error of the Bayes region evaluated on the unmodified source."""
    return float(np.minimum(source.prior1 * source.p_x1, source.prior2 * source.p_x2).sum())
