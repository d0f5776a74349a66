"""Per-iteration ADMM orchestration, run loop, and convergence metrics.

One iteration: every node minimizes its penalized local cost, the network
agrees on a common z (either the exact arithmetic mean of x_i + lambda_i/rho
as the real-valued baseline, or its quantized-consensus approximation), and
every node takes the dual step lambda += rho * (x - z).
"""

from __future__ import annotations

import random
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .config import RunConfig, build_costs, build_graph
from .consensus import run_consensus
from .costs import CostFunction, QuadraticCost, centralized_optimum
from .graph import DiGraph
from .quant import QuantLevel

MODES = ("quantized", "exact", "refined")


class DegenerateStartError(ValueError):
    """All nodes initialized exactly at the optimum; relative error undefined."""


@dataclass
class NodeState:
    x: np.ndarray
    z: np.ndarray
    lam: np.ndarray
    cost: CostFunction


@dataclass
class IterationRecord:
    k: int
    error: float
    consensus_steps: int
    lagrangian_gap: Optional[float]
    delta_used: Fraction


@dataclass
class RunResult:
    records: list[IterationRecord]
    nodes: list[NodeState]
    x_star: np.ndarray
    graph: DiGraph
    initial_x: np.ndarray = None
    initial_z: np.ndarray = None
    initial_lambda: np.ndarray = None


def admm_iterate(
    nodes: Sequence[NodeState],
    graph: DiGraph,
    rho: float,
    level: Optional[QuantLevel],
    B: int,
    seed: int,
    mode: str = "quantized",
    trace=None,
) -> int:
    """Run one full iteration in place; returns the consensus step count.

    mode 'exact' replaces the averaging protocol with the exact arithmetic
    mean (the zero-quantization baseline); 'quantized' and 'refined' both run
    the protocol at the supplied level (the refinement schedule is applied by
    the caller, which owns the iteration index).
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    for node in nodes:
        node.x = node.cost.x_update(node.z, node.lam, rho)
    inputs = np.stack([node.x + node.lam / rho for node in nodes])
    if mode == "exact":
        common = inputs.mean(axis=0)
        for node in nodes:
            node.z = common.copy()
        steps = 0
    else:
        if level is None:
            raise ValueError("quantized modes need a quantization level")
        p = inputs.shape[1]
        values = [row[0] for row in inputs] if p == 1 else [list(row) for row in inputs]
        result = run_consensus(values, graph, level, B, seed, trace=trace)
        for node, zv in zip(nodes, result.z):
            node.z = np.atleast_1d(np.asarray(zv, dtype=float))
        steps = result.steps
    for node in nodes:
        node.lam = node.lam + rho * (node.x - node.z)
    return steps


def error_metric(nodes: Sequence[NodeState], x0_snapshot: np.ndarray, x_star: np.ndarray) -> float:
    """Distance to the optimum, normalized by the starting distance.

    Equals 1 at iteration zero by construction.
    """
    num = float(np.sqrt(sum(float(np.sum((n.x - x_star) ** 2)) for n in nodes)))
    den = float(np.sqrt(np.sum((x0_snapshot - x_star) ** 2)))
    if den == 0.0:
        raise DegenerateStartError("all nodes started exactly at the optimum")
    return num / den


def saddle_multipliers(costs: Sequence[CostFunction], x_star: np.ndarray) -> Optional[np.ndarray]:
    """Optimal dual variables lambda_i* = -grad f_i(x*), available for quadratics."""
    if not all(isinstance(c, QuadraticCost) for c in costs):
        return None
    return np.stack([-c.subgradient(x_star) for c in costs])


def lagrangian_gap(
    x_bar: np.ndarray,
    z_bar: np.ndarray,
    costs: Sequence[CostFunction],
    x_star: np.ndarray,
    lambda_star: np.ndarray,
) -> float:
    """Gap between the Lagrangian at the running averages and at the saddle.

    Both points keep their z components pairwise equal, so the indicator
    terms vanish and the gap reduces to sum f_i(xbar_i) - sum f_i(x*) plus
    lambda*'(Xbar - zbar).  Nonnegative up to the quantization floor.
    """
    total = 0.0
    for i, cost in enumerate(costs):
        total += cost.eval(x_bar[i]) - cost.eval(x_star)
        total += float(lambda_star[i] @ (x_bar[i] - z_bar[i]))
    return total


def run(config: RunConfig, trace=None) -> RunResult:
    """Execute the configured experiment and return per-iteration records."""
    graph = build_graph(config)
    costs = build_costs(config, graph.n)
    n = graph.n
    p = costs[0].dim
    if any(c.dim != p for c in costs):
        raise ValueError("all local costs must share one dimension")

    rng = np.random.default_rng(config.seed)
    x0 = rng.uniform(-1.0, 1.0, size=(n, p))
    z0 = rng.uniform(-1.0, 1.0, size=(n, p))
    lam0 = rng.uniform(-1.0, 1.0, size=(n, p))
    nodes = [NodeState(x0[i].copy(), z0[i].copy(), lam0[i].copy(), costs[i]) for i in range(n)]

    x_star = centralized_optimum(costs)
    lambda_star = saddle_multipliers(costs, x_star)
    x0_snapshot = x0.copy()
    start_distance = float(np.sqrt(np.sum((x0_snapshot - x_star) ** 2)))
    if start_distance == 0.0:
        warnings.warn("degenerate start: reporting absolute error instead of relative")

    seed_stream = random.Random(config.seed)
    base_level = QuantLevel(config.delta)
    sum_x = np.zeros((n, p))
    sum_z = np.zeros((n, p))
    records: list[IterationRecord] = []
    for k in range(config.k_max):
        if config.mode == "exact":
            level_k = None
            delta_used = Fraction(0)
        elif config.mode == "refined":
            level_k = QuantLevel(base_level.delta / (10 * (k + 1)))
            delta_used = level_k.delta
        else:
            level_k = base_level
            delta_used = base_level.delta
        consensus_seed = seed_stream.getrandbits(62)
        steps = admm_iterate(
            nodes, graph, config.rho, level_k, config.B, consensus_seed,
            mode=config.mode, trace=trace,
        )
        sum_x += np.stack([node.x for node in nodes])
        sum_z += np.stack([node.z for node in nodes])
        if start_distance == 0.0:
            err = float(np.sqrt(sum(float(np.sum((nd.x - x_star) ** 2)) for nd in nodes)))
        else:
            err = error_metric(nodes, x0_snapshot, x_star)
        gap = None
        if lambda_star is not None:
            gap = lagrangian_gap(sum_x / (k + 1), sum_z / (k + 1), costs, x_star, lambda_star)
        records.append(IterationRecord(k + 1, err, steps, gap, delta_used))
    return RunResult(
        records=records, nodes=nodes, x_star=x_star, graph=graph,
        initial_x=x0, initial_z=z0, initial_lambda=lam0,
    )
