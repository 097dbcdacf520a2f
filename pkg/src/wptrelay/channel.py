"""Reference path loss with lognormal fading, and the SNR-driven power laws.

Channel coefficients are linear power gains. All powers are in watts.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainError

LN10_OVER_10 = math.log(10.0) / 10.0


@dataclass(frozen=True)
class ChannelParams:
    pl_intercept_db: float
    pl_exponent: float
    fading_std_db: float

    def __post_init__(self):
        if not self.pl_exponent > 0:
            raise DomainError("pl_exponent must be > 0")
        if not self.fading_std_db >= 0:
            raise DomainError("fading_std_db must be >= 0")

    def scaled(self, gamma_scale: float) -> "ChannelParams":
        """Copy with the fading std multiplied by ``gamma_scale``."""
        return replace(self, fading_std_db=self.fading_std_db * gamma_scale)


@dataclass(frozen=True)
class LinkBudget:
    gamma_th: float      # linear SNR threshold
    noise_power: float   # W
    p_max: float         # W

    def __post_init__(self):
        for name in ("gamma_th", "noise_power", "p_max"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be > 0")

    @classmethod
    def from_db(cls, gamma_th_db: float, noise_dbm: float, p_max_mw: float) -> "LinkBudget":
        return cls(db_to_linear(gamma_th_db), dbm_to_watts(noise_dbm), p_max_mw * 1e-3)

    @property
    def snr_noise_product(self) -> float:
        return self.gamma_th * self.noise_power


LOS_DEFAULT = ChannelParams(0.0, 2.5, 8.66)
NLOS_DEFAULT = ChannelParams(-25.0, 5.76, 9.06)


def db_to_linear(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


def dbm_to_watts(x_dbm: float) -> float:
    return 10.0 ** ((x_dbm - 30.0) / 10.0)


def fading_sigma_ln(fading_std_db: float) -> float:
    """Natural-log std of the fading gain whose dB value has std ``fading_std_db``."""
    if fading_std_db < 0:
        raise DomainError("fading_std_db must be >= 0")
    return LN10_OVER_10 * fading_std_db


def path_loss_linear(params: ChannelParams, d: float) -> float:
    if not d > 0:
        raise DomainError(f"distance must be > 0, got {d!r}")
    return 10.0 ** ((params.pl_intercept_db - 10.0 * params.pl_exponent * math.log10(d)) / 10.0)


def sample_channel(params: ChannelParams, d: float, rng: np.random.Generator) -> float:
    """One channel draw: path loss times ``exp(-sigma_ln * Z)``."""
    pl = path_loss_linear(params, d)
    z = rng.standard_normal()
    if params.fading_std_db == 0:
        return pl
    return pl * math.exp(-fading_sigma_ln(params.fading_std_db) * z)


def sample_channels(params: ChannelParams, d, rng: np.random.Generator) -> np.ndarray:
    """Vectorised :func:`sample_channel` over an array of distances."""
    d = np.asarray(d, dtype=float)
    if np.any(~(d > 0)):
        raise DomainError("all distances must be > 0")
    pl = 10.0 ** ((params.pl_intercept_db - 10.0 * params.pl_exponent * np.log10(d)) / 10.0)
    z = rng.standard_normal(d.shape)
    return pl * np.exp(-fading_sigma_ln(params.fading_std_db) * z)


def required_power(budget: LinkBudget, h: float) -> float:
    """Transmit power that meets the SNR threshold over a channel of gain ``h``."""
    if not h > 0:
        raise DomainError(f"channel gain must be > 0, got {h!r}")
    return budget.gamma_th * budget.noise_power / h


def harvested_power(alpha: float, p_wpt: float, a_r: float, h_si: float) -> float:
    if not 0.0 <= alpha <= 1.0:
        raise DomainError("alpha must lie in [0, 1]")
    if p_wpt < 0 or not a_r > 0 or not h_si > 0:
        raise DomainError("need p_wpt >= 0, a_r > 0, h_si > 0")
    return alpha * p_wpt * a_r * h_si
