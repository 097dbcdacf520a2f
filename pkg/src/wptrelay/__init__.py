"""Relay selection for a blocked source, paid for with wireless power.

A source with a poor direct link runs a buyer-optimal reverse auction among
nearby candidates; the payment is the total SWIPT power it radiates.
"""
from ._backend import BACKEND
from .channel import ChannelParams, LinkBudget
from .mechanism import (
    SOURCE, AuctionInput, AuctionOutcome, perfect_info_bound, run_myerson,
    run_perfect_info, run_vickrey, utility,
)
from .numerics import BisectionSpec
from .sim import Metrics, Placement, SimConfig, run_experiment
from .valuation import ValuationModel

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "SOURCE", "AuctionInput", "AuctionOutcome", "BisectionSpec",
    "ChannelParams", "LinkBudget", "Metrics", "Placement", "SimConfig",
    "ValuationModel", "perfect_info_bound", "run_experiment", "run_myerson",
    "run_perfect_info", "run_vickrey", "utility",
]
