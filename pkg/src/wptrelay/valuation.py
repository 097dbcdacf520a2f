"""Private valuations of relay candidates and their virtual valuations.

A candidate's valuation is the smallest total source power that lets it
harvest enough to pay for its own retransmission. Seen from the source, the
only unknown is the lognormal fading of the candidate-to-AP link, so the
valuation has the form ``v = p_si + k / H`` with ``H ~ Lognormal(0, sigma)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._backend import kernels
from .errors import DomainError, SupportError
from .numerics import DEFAULT_BISECTION, BisectionSpec, std_normal_cdf, std_normal_pdf


@dataclass(frozen=True)
class ValuationModel:
    """Law of ``p_si + k / H``, ``ln H ~ N(0, sigma_ln**2)``.

    ``wpt_gain`` is ``alpha * A_r * H_si`` (harvested watts per watt of WPT
    power). It does not enter the distribution; mechanisms use it to report
    harvested power, and it is ``None`` for bare statistical models.
    """

    p_si: float
    k: float
    sigma_ln: float
    wpt_gain: Optional[float] = None

    def __post_init__(self):
        if not (self.p_si > 0 and self.k > 0 and self.sigma_ln > 0):
            raise DomainError(
                f"need p_si, k, sigma_ln > 0; got {self.p_si!r}, {self.k!r}, {self.sigma_ln!r}")

    @classmethod
    def from_physical(cls, *, gamma_th: float, noise_power: float, h_si: float,
                      h_pl_i: float, alpha: float, a_r: float,
                      sigma_ln: float) -> "ValuationModel":
        """Build from the link quantities the source knows."""
        gs = gamma_th * noise_power
        wpt_gain = alpha * a_r * h_si
        return cls(p_si=gs / h_si, k=gs / (h_pl_i * wpt_gain), sigma_ln=sigma_ln,
                   wpt_gain=wpt_gain)

    def z_score(self, v: float) -> float:
        return math.log(hss_of_valuation(self, v)) / self.sigma_ln


@dataclass(frozen=True)
class Valuation:
    value: float


def min_inducement_power(p_si: float, p_i: float, alpha: float, a_r: float, h_si: float) -> float:
    """Smallest total source power at which relaying costs the candidate nothing."""
    if not (p_si > 0 and p_i > 0 and alpha > 0 and a_r > 0 and h_si > 0):
        raise DomainError("all inputs must be > 0")
    if alpha > 1:
        raise DomainError("alpha must be <= 1")
    return p_si + p_i / (alpha * a_r * h_si)


def _check_support(model: ValuationModel, v: float) -> None:
    if not v > model.p_si:
        raise SupportError(f"valuation {v!r} not above p_si {model.p_si!r}")


def hss_of_valuation(model: ValuationModel, v: float) -> float:
    """Fading realisation that produces valuation ``v``."""
    _check_support(model, v)
    return model.k / (v - model.p_si)


def valuation_pdf(model: ValuationModel, v: float) -> float:
    if not v > model.p_si:
        return 0.0
    z = math.log(model.k / (v - model.p_si)) / model.sigma_ln
    return std_normal_pdf(z) / (model.sigma_ln * (v - model.p_si))


def valuation_cdf(model: ValuationModel, v: float) -> float:
    if not v > model.p_si:
        return 0.0
    # v grows as the fading shrinks, so P(V <= v) = P(Z >= z).
    z = math.log(model.k / (v - model.p_si)) / model.sigma_ln
    return std_normal_cdf(-z)


def virtual_valuation(model: ValuationModel, v: float) -> float:
    """``v + F(v)/f(v)`` evaluated through the Mills ratio."""
    _check_support(model, v)
    return kernels.virtual_valuation(model.p_si, model.k, model.sigma_ln, v)


def virtual_valuation_derivative(model: ValuationModel, v: float) -> float:
    _check_support(model, v)
    return kernels.virtual_valuation_derivative(model.p_si, model.k, model.sigma_ln, v)


def inverse_virtual_valuation(model: ValuationModel, target: float,
                              spec: BisectionSpec = DEFAULT_BISECTION) -> float:
    """Valuation whose virtual valuation equals ``target``.

    Only the tolerances of ``spec`` are used; the bracket is built by doubling
    ``p_si + 2**m * k`` until it covers ``target``.
    """
    return kernels.inverse_virtual_valuation(
        model.p_si, model.k, model.sigma_ln, target,
        spec.abs_tol, spec.rel_tol, spec.max_iter)


def sample_valuation(model: ValuationModel, rng: np.random.Generator) -> Valuation:
    h = math.exp(model.sigma_ln * rng.standard_normal())
    return Valuation(model.p_si + model.k / h)


def sample_valuations(model: ValuationModel, rng: np.random.Generator, size: int) -> np.ndarray:
    h = np.exp(model.sigma_ln * rng.standard_normal(size))
    return model.p_si + model.k / h
