"""Asynchronous distributed ADMM with quantized communication over digraphs.

A deterministic simulator and library: directed-graph model, exact-rational
asymmetric quantization, an event-driven bounded-delay message layer,
finite-time quantized average consensus by integer mass splitting, local
cost solvers, the ADMM run loop, and an experiment CLI.
"""

from .admm import IterationRecord, NodeState, RunResult, admm_iterate, error_metric, lagrangian_gap, run
from .config import ConfigError, RunConfig, load_config
from .consensus import (
    ConsensusResult,
    MassState,
    NonTerminationError,
    RoutingTable,
    absorb,
    check_terminate,
    init_masses,
    maxmin_merge,
    maxmin_round_start,
    run_consensus,
    run_maxmin,
    split_and_route,
)
from .costs import AbsCost, QuadraticCost, abs_x_update, centralized_optimum, quadratic_x_update, random_quadratic
from .graph import DiGraph, NotStronglyConnectedError, diameter, from_edge_list, random_strongly_connected
from .netsim import InvalidReceiverError, MassPiece, MaxMinPair, Message, SimClock
from .quant import QuantLevel, Rational, dequantize, level_for, parse_rational, quantize

__version__ = "0.1.0"

__all__ = [
    "AbsCost",
    "ConfigError",
    "ConsensusResult",
    "DiGraph",
    "InvalidReceiverError",
    "IterationRecord",
    "MassPiece",
    "MassState",
    "MaxMinPair",
    "Message",
    "NodeState",
    "NonTerminationError",
    "NotStronglyConnectedError",
    "QuadraticCost",
    "QuantLevel",
    "Rational",
    "RoutingTable",
    "RunConfig",
    "RunResult",
    "SimClock",
    "absorb",
    "abs_x_update",
    "admm_iterate",
    "centralized_optimum",
    "check_terminate",
    "dequantize",
    "diameter",
    "error_metric",
    "from_edge_list",
    "init_masses",
    "lagrangian_gap",
    "level_for",
    "load_config",
    "maxmin_merge",
    "maxmin_round_start",
    "parse_rational",
    "quadratic_x_update",
    "quantize",
    "random_quadratic",
    "random_strongly_connected",
    "run",
    "run_consensus",
    "run_maxmin",
    "split_and_route",
]
