"""Monte Carlo scenarios, per-trial mechanism evaluation and aggregation.

Geometry: the AP sits at the origin and the source at ``(d_source, 0)``.
Every trial draws from its own Philox stream keyed by ``(seed, trial_index)``,
so results do not depend on evaluation order.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Iterator, Optional

import numpy as np

from .channel import (
    LOS_DEFAULT, NLOS_DEFAULT, ChannelParams, LinkBudget, fading_sigma_ln,
    path_loss_linear,
)
from .errors import DomainError, SimulationAbort, ValidationError, WptRelayError
from .mechanism import (
    SOURCE, AuctionInput, AuctionOutcome, run_direct, run_myerson,
    run_perfect_info, run_vickrey,
)
from .numerics import DEFAULT_BISECTION, BisectionSpec, std_normal_cdf
from .valuation import ValuationModel, min_inducement_power

log = logging.getLogger(__name__)

MECHANISMS = ("direct", "myerson", "vickrey", "perfect_info")
MAX_FAILURE_FRACTION = 1e-3

DEFAULT_D_SOURCE = 8.1
# Visually similar to the four-candidate study layout: candidate 1 next to
# the source, the rest spread toward the AP.
DEFAULT_FIXED_POSITIONS = ((7.1, 0.3), (5.6, 1.6), (4.2, -1.2), (2.6, 0.9))


@dataclass(frozen=True)
class Placement:
    """Where candidates live.

    ``kind="disk"`` samples uniformly from the annulus
    ``inner_radius <= |q - center| <= radius`` (a disk when ``inner_radius``
    is 0). ``kind="fixed"`` uses the first ``n`` entries of ``positions``.
    """

    kind: str = "disk"
    center: tuple = (DEFAULT_D_SOURCE, 0.0)
    radius: float = 2.0
    inner_radius: float = 0.0
    positions: tuple = ()

    def __post_init__(self):
        if self.kind == "disk":
            if not (self.radius > 0 and 0 <= self.inner_radius < self.radius):
                raise ValidationError("placement needs 0 <= inner_radius < radius")
        elif self.kind == "fixed":
            if not self.positions:
                raise ValidationError("fixed placement needs at least one position")
        else:
            raise ValidationError(f"unknown placement kind {self.kind!r}")


@dataclass(frozen=True)
class SimConfig:
    n_candidates: int = 4
    d_source: float = DEFAULT_D_SOURCE
    placement: Placement = field(default_factory=Placement)
    los_params: ChannelParams = LOS_DEFAULT
    nlos_params: ChannelParams = NLOS_DEFAULT
    budget: LinkBudget = field(default_factory=lambda: LinkBudget.from_db(33.18, -75.0, 100.0))
    alpha: float = 0.3
    a_r: float = 1e-4           # m^2
    gamma_scale: float = 1.0
    n_trials: int = 10_000
    seed: int = 0
    min_distance: float = 1.0   # m; shorter links are clamped

    def __post_init__(self):
        if self.n_candidates < 0:
            raise ValidationError("n_candidates must be >= 0")
        if not self.gamma_scale > 0:
            raise ValidationError("gamma_scale must be > 0")
        if self.n_trials < 1:
            raise ValidationError("n_trials must be >= 1")
        if not 0 < self.alpha <= 1:
            raise ValidationError("alpha ∈ [0,1] required (and alpha > 0)")
        if not self.a_r > 0:
            raise ValidationError("a_r must be > 0")
        if not self.d_source > 0:
            raise ValidationError("d_source must be > 0")
        if not self.min_distance > 0:
            raise ValidationError("min_distance must be > 0")
        if self.los_params.fading_std_db <= 0 or self.nlos_params.fading_std_db <= 0:
            raise ValidationError("fading stds must be > 0")
        if self.placement.kind == "fixed" and self.n_candidates > len(self.placement.positions):
            raise ValidationError(
                f"n_candidates={self.n_candidates} exceeds the "
                f"{len(self.placement.positions)} fixed positions")
        if self.seed < 0:
            raise ValidationError("seed must be >= 0")

    @property
    def los(self) -> ChannelParams:
        return self.los_params.scaled(self.gamma_scale)

    @property
    def nlos(self) -> ChannelParams:
        return self.nlos_params.scaled(self.gamma_scale)


@dataclass(frozen=True)
class Scenario:
    q_s: tuple
    q: np.ndarray          # (n, 2)
    h_s: float
    h_si: np.ndarray
    h_i: np.ndarray
    p_s: float
    p_si: np.ndarray
    p_i: np.ndarray
    valuations: np.ndarray
    models: tuple

    @property
    def n(self) -> int:
        return len(self.valuations)


@dataclass(frozen=True)
class TrialResult:
    myerson: AuctionOutcome
    vickrey: AuctionOutcome
    perfect_info: AuctionOutcome
    direct: AuctionOutcome
    lower_bound: Optional[float] = None   # min valuation, None when n = 0

    def outcome(self, mechanism: str) -> AuctionOutcome:
        return getattr(self, mechanism)


@dataclass(frozen=True)
class MechanismMetrics:
    outage_prob: float
    mean_source_power_cond: float     # W, over trials with communication; 0 if none
    mean_source_power_uncond: float   # W, outage trials count as 0 W
    mean_harvested: float             # W, 0 on trials without a relay
    mean_surplus: float               # W, 0 on trials without a relay
    mean_cost: float                  # W, payment or v0 when the source keeps the job
    relay_rate: float
    selection_freq: tuple


@dataclass(frozen=True)
class Metrics:
    mechanisms: dict
    trial_count: int
    failed_trials: int = 0

    def __getitem__(self, mechanism: str) -> MechanismMetrics:
        return self.mechanisms[mechanism]


def trial_rng(seed: int, trial_index: int) -> np.random.Generator:
    """Independent stream for one trial, keyed by ``(seed, trial_index)``."""
    return np.random.Generator(np.random.Philox(key=np.array([seed, trial_index], dtype=np.uint64)))


def _candidate_positions(config: SimConfig, gx: np.ndarray, gy: np.ndarray) -> np.ndarray:
    """Map one Gaussian pair per candidate to a position.

    For an isotropic pair, ``atan2`` is a uniform angle and
    ``exp(-(x^2 + y^2) / 2)`` an independent uniform, which sets the squared
    radius so that points are uniform over the annulus area.
    """
    pl = config.placement
    n = len(gx)
    if pl.kind == "fixed":
        return np.asarray(pl.positions[:n], dtype=float).reshape(n, 2)
    u = np.exp(-0.5 * (gx * gx + gy * gy))
    theta = np.arctan2(gy, gx)
    r = np.sqrt(pl.inner_radius ** 2 + u * (pl.radius ** 2 - pl.inner_radius ** 2))
    return np.column_stack((pl.center[0] + r * np.cos(theta), pl.center[1] + r * np.sin(theta)))


def _link_distance(d, floor: float):
    if np.any(np.asarray(d) == 0):
        raise DomainError("zero link distance")
    return np.maximum(d, floor)


def _path_loss(params: ChannelParams, d: np.ndarray) -> np.ndarray:
    return 10.0 ** ((params.pl_intercept_db - 10.0 * params.pl_exponent * np.log10(d)) / 10.0)


def generate_scenario(config: SimConfig, rng: np.random.Generator) -> Scenario:
    """Draw one world.

    The stream is consumed as one block of ``1 + 4n`` standard normals: the
    source fading, then per candidate two placement normals and the fading of
    its source and AP links. A scenario with ``n`` candidates is therefore
    the prefix of the same trial with more candidates, and changing ``alpha``
    or ``gamma_scale`` reuses the same draws.
    """
    n = config.n_candidates
    gs = config.budget.snr_noise_product
    block = rng.standard_normal(1 + 4 * n)
    z_s = block[0]
    gx, gy, z_si, z_i = block[1:].reshape(n, 4).T if n else (np.empty(0),) * 4

    q_s = (config.d_source, 0.0)
    q = _candidate_positions(config, gx, gy)
    d_s = float(_link_distance(config.d_source, config.min_distance))
    d_si = _link_distance(np.hypot(q[:, 0] - q_s[0], q[:, 1] - q_s[1]), config.min_distance)
    d_i = _link_distance(np.hypot(q[:, 0], q[:, 1]), config.min_distance)

    los, nlos = config.los, config.nlos
    sig_los = fading_sigma_ln(los.fading_std_db)
    h_s = path_loss_linear(nlos, d_s) * math.exp(-fading_sigma_ln(nlos.fading_std_db) * z_s)
    h_si = _path_loss(los, d_si) * np.exp(-sig_los * z_si)
    h_pl_i = _path_loss(los, d_i)
    h_i = h_pl_i * np.exp(-sig_los * z_i)

    p_s = gs / h_s
    p_si = gs / h_si
    p_i = gs / h_i
    models = tuple(
        ValuationModel.from_physical(
            gamma_th=config.budget.gamma_th, noise_power=config.budget.noise_power,
            h_si=float(h_si[j]), h_pl_i=float(h_pl_i[j]),
            alpha=config.alpha, a_r=config.a_r, sigma_ln=sig_los)
        for j in range(n))
    valuations = np.array([
        min_inducement_power(float(p_si[j]), float(p_i[j]), config.alpha, config.a_r, float(h_si[j]))
        for j in range(n)])
    return Scenario(q_s, q, h_s, h_si, h_i, p_s, p_si, p_i, valuations, models)


def run_trial(scenario: Scenario, config: SimConfig,
              spec: BisectionSpec = DEFAULT_BISECTION) -> TrialResult:
    """Evaluate every mechanism on one scenario with truthful bids."""
    inp = AuctionInput.build(config.budget.p_max, scenario.p_s,
                             [float(v) for v in scenario.valuations], scenario.models)
    return TrialResult(
        myerson=run_myerson(inp, spec),
        vickrey=run_vickrey(inp),
        perfect_info=run_perfect_info(inp),
        direct=run_direct(inp),
        lower_bound=min(inp.bids) if inp.bids else None,
    )


def iter_trials(config: SimConfig, spec: BisectionSpec = DEFAULT_BISECTION,
                start: int = 0, stop: Optional[int] = None) -> Iterator[tuple]:
    """Yield ``(trial_index, TrialResult | exception)`` for each trial."""
    stop = config.n_trials if stop is None else stop
    for t in range(start, stop):
        try:
            result = run_trial(generate_scenario(config, trial_rng(config.seed, t)), config, spec)
        except WptRelayError as exc:
            log.warning("trial %d failed: %s", t, exc)
            yield t, exc
        else:
            yield t, result


class _Accumulator:
    def __init__(self, n: int):
        self.outages = 0
        self.relays = 0
        self.power_sum = 0.0
        self.success = 0
        self.harvest_sum = 0.0
        self.surplus_sum = 0.0
        self.cost_sum = 0.0
        self.wins = [0] * n

    def add(self, o: AuctionOutcome) -> None:
        if o.comm_success:
            self.success += 1
            self.power_sum += o.source_tx_power
        else:
            self.outages += 1
        self.cost_sum += o.procurement_cost
        if o.relay_assigned:
            self.relays += 1
            self.harvest_sum += o.harvested
            self.surplus_sum += o.surplus
            self.wins[o.winner] += 1

    def finish(self, count: int) -> MechanismMetrics:
        return MechanismMetrics(
            outage_prob=self.outages / count,
            mean_source_power_cond=self.power_sum / self.success if self.success else 0.0,
            mean_source_power_uncond=self.power_sum / count,
            mean_harvested=self.harvest_sum / count,
            mean_surplus=self.surplus_sum / count,
            mean_cost=self.cost_sum / count,
            relay_rate=self.relays / count,
            selection_freq=tuple(w / count for w in self.wins),
        )


def aggregate(results, n_candidates: int) -> Metrics:
    acc = {m: _Accumulator(n_candidates) for m in MECHANISMS}
    count = 0
    for r in results:
        count += 1
        for m in MECHANISMS:
            acc[m].add(r.outcome(m))
    if count == 0:
        raise SimulationAbort("no successful trials to aggregate")
    return Metrics({m: a.finish(count) for m, a in acc.items()}, count)


def run_experiment(config: SimConfig, spec: BisectionSpec = DEFAULT_BISECTION) -> Metrics:
    """Run ``config.n_trials`` independent trials and aggregate them.

    Failed trials are logged and skipped; more than 0.1% failures aborts.
    """
    ok = []
    failed = 0
    for _, r in iter_trials(config, spec):
        if isinstance(r, Exception):
            failed += 1
            if failed > MAX_FAILURE_FRACTION * config.n_trials:
                raise SimulationAbort(
                    f"{failed} of {config.n_trials} trials failed; last error: {r}")
        else:
            ok.append(r)
    metrics = aggregate(ok, config.n_candidates)
    return Metrics(metrics.mechanisms, metrics.trial_count, failed)


def direct_outage_probability(config: SimConfig) -> float:
    """Closed-form outage of the direct NLoS link, ``Q(margin_db / sigma_db)``."""
    nlos = config.nlos
    h_pl = path_loss_linear(nlos, max(config.d_source, config.min_distance))
    margin_db = 10.0 * math.log10(config.budget.p_max * h_pl / config.budget.snr_noise_product)
    return std_normal_cdf(-margin_db / nlos.fading_std_db)


__all__ = [
    "MECHANISMS", "SOURCE", "Placement", "SimConfig", "Scenario", "TrialResult",
    "MechanismMetrics", "Metrics", "trial_rng", "generate_scenario", "run_trial",
    "iter_trials", "aggregate", "run_experiment", "direct_outage_probability",
]
