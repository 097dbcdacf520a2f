"""Shared generators for the test suites."""
import math

import numpy as np

from wptrelay.mechanism import AuctionInput
from wptrelay.valuation import ValuationModel, sample_valuation

P_MAX = 0.1


def support_points(model, zs):
    """Valuations whose fading z-score is ``zs``."""
    return model.p_si + model.k * np.exp(-model.sigma_ln * np.asarray(zs))


def z_max(model, rel_gap=1e-10):
    """Largest z whose support point is still resolvable above p_si."""
    return math.log(model.k / (rel_gap * model.p_si)) / model.sigma_ln


def random_models(rng, count, sigma_range=(0.05, 4.0)):
    for _ in range(count):
        p = 10 ** rng.uniform(-8, -2)
        k = p * 10 ** rng.uniform(2, 8)
        yield ValuationModel(p, k, rng.uniform(*sigma_range))


def random_instance(seed, n_max=5, identical=False):
    """Models drawn at random, valuations drawn from those models."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, n_max + 1))
    models = []
    for _ in range(1 if identical else n):
        p = 10 ** rng.uniform(-6, -3)
        models.append(ValuationModel(p, 10 ** rng.uniform(-3, 0), rng.uniform(0.2, 3.0),
                                     wpt_gain=10 ** rng.uniform(-9, -6)))
    if identical:
        models = models * n
    bids = [sample_valuation(m, rng).value for m in models]
    p_s = 10 ** rng.uniform(-2, 0.5)
    return AuctionInput.build(P_MAX, p_s, bids, models)
