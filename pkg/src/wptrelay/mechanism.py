"""Relay-selection mechanisms and the communication outcome they imply.

The source is a buyer procuring relay service; candidates bid the total
source power they need. ``SOURCE`` as a winner means the buyer keeps the job,
which translates to direct transmission if ``p_s <= p_max`` and to an outage
otherwise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from ._backend import kernels
from .errors import EmptyError, MechanismError
from .numerics import DEFAULT_BISECTION, BisectionSpec
from .valuation import ValuationModel

SOURCE = -1


@dataclass(frozen=True)
class AuctionInput:
    v0: float
    p_max: float
    p_s: float
    bids: Sequence[float]
    models: Sequence[ValuationModel] = field(default_factory=tuple)

    def __post_init__(self):
        if len(self.bids) != len(self.models):
            raise MechanismError(f"{len(self.bids)} bids but {len(self.models)} models")
        for i, (b, m) in enumerate(zip(self.bids, self.models)):
            if not b > m.p_si:
                raise MechanismError(f"bid {i} = {b!r} is not above its p_si {m.p_si!r}")

    @classmethod
    def build(cls, p_max: float, p_s: float, bids: Sequence[float],
              models: Sequence[ValuationModel]) -> "AuctionInput":
        return cls(min(p_max, p_s), p_max, p_s, tuple(bids), tuple(models))

    @property
    def v0_is_pmax(self) -> bool:
        """True when the source cannot reach the AP directly and v0 is only a price cap."""
        return self.p_s > self.p_max


@dataclass(frozen=True)
class AuctionOutcome:
    winner: int
    payment: float
    source_tx_power: float
    comm_success: bool
    harvested: float = 0.0
    surplus: float = 0.0
    v0_is_pmax: bool = False
    v0: float = math.nan

    @property
    def relay_assigned(self) -> bool:
        return self.winner != SOURCE

    @property
    def procurement_cost(self) -> float:
        """Buyer's cost: the payment, or its own valuation when it keeps the job."""
        return self.payment if self.relay_assigned else self.v0


def _source_outcome(inp: AuctionInput) -> AuctionOutcome:
    success = inp.p_s <= inp.p_max
    return AuctionOutcome(SOURCE, 0.0, inp.p_s if success else 0.0, success,
                          v0_is_pmax=inp.v0_is_pmax, v0=inp.v0)


def _relay_outcome(inp: AuctionInput, winner: int, payment: float) -> AuctionOutcome:
    model = inp.models[winner]
    if model.wpt_gain is None:
        harvested = surplus = math.nan
    else:
        harvested = model.wpt_gain * (payment - model.p_si)
        # the winner's retransmission power under a truthful bid
        p_i = model.wpt_gain * (inp.bids[winner] - model.p_si)
        surplus = harvested - p_i
    return AuctionOutcome(winner, payment, payment, True, harvested, surplus,
                          v0_is_pmax=inp.v0_is_pmax, v0=inp.v0)


def run_myerson(inp: AuctionInput, spec: BisectionSpec = DEFAULT_BISECTION) -> AuctionOutcome:
    """Buyer-optimal reverse auction.

    The lowest virtual valuation wins if it does not exceed ``v0`` (ties go
    to the lowest index) and is paid its critical bid: the largest bid that
    would still have won.
    """
    models = inp.models
    winner, payment = kernels.myerson_select(
        list(inp.bids), [m.p_si for m in models], [m.k for m in models],
        [m.sigma_ln for m in models], inp.v0, spec.abs_tol, spec.rel_tol, spec.max_iter)
    if winner == SOURCE:
        return _source_outcome(inp)
    return _relay_outcome(inp, winner, payment)


def run_vickrey(inp: AuctionInput) -> AuctionOutcome:
    """Second-price reverse auction with the source's valuation as reserve."""
    bids = list(inp.bids)
    if not bids:
        return _source_outcome(inp)
    winner = min(range(len(bids)), key=bids.__getitem__)
    if not bids[winner] < inp.v0:
        return _source_outcome(inp)
    others = bids[:winner] + bids[winner + 1:]
    payment = min(min(others), inp.v0) if others else inp.v0
    return _relay_outcome(inp, winner, payment)


def perfect_info_bound(valuations: Sequence[float]) -> float:
    if len(valuations) == 0:
        raise EmptyError("perfect-information bound needs at least one candidate")
    return min(valuations)


def run_perfect_info(inp: AuctionInput) -> AuctionOutcome:
    """Take-it-or-leave-it offer at the lowest valuation, when it beats ``v0``."""
    if not inp.bids:
        return _source_outcome(inp)
    bound = perfect_info_bound(inp.bids)
    if bound > inp.v0:
        return _source_outcome(inp)
    return _relay_outcome(inp, list(inp.bids).index(bound), bound)


def run_direct(inp: AuctionInput) -> AuctionOutcome:
    """Ignore all candidates."""
    return _source_outcome(inp)


def utility(candidate_valuation: float, outcome: AuctionOutcome, candidate_index: int) -> float:
    if outcome.winner != candidate_index:
        return 0.0
    return outcome.payment - candidate_valuation
