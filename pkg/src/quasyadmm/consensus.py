"""Finite-time quantized average consensus via integer mass splitting.

Each node's input is quantized and held as an integer pair (y, xi) of mass
and piece count.  Every step a node splits its mass into near-equal integer
pieces, keeps one, and routes the rest uniformly at random among its
out-neighbors and itself.  Totals are conserved exactly, so the piece values
contract toward the quantized network average.  Termination is detected by a
max/min consensus over the mass ratios, restarted every D*B steps (graph
diameter times the delay bound): when the global extrema differ by at most
one, every node stops with the same value m*delta.

Two hardenings against in-flight state at round boundaries (both inert when
B = 1, where nothing crosses a step):

* max/min pairs are round-tagged and stale ones discarded, so a pair sent
  just before a round boundary cannot widen the next round's extrema at some
  nodes but not others (which would break simultaneous termination);
* the stopping condition uses extrema into which each node folds the values
  of pieces it emitted during the last B-1 steps, so pieces still in flight
  are covered and a passing check certifies every piece in the system; the
  output value itself stays the plain merged ratio minimum times delta,
  which the certificate pins within one unit of the quantized average,
  giving |z - mean| <= 2*delta unconditionally.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .graph import DiGraph
from .netsim import MassPiece, MaxMinPair, SimClock
from .quant import QuantLevel, dequantize, quantize

MASS_LIMIT = 2**63

DEFAULT_STEP_CAP = 1_000_000


class NonTerminationError(RuntimeError):
    """Step cap exceeded; signals a protocol bug, never expected."""


class MassRangeError(ValueError):
    """Quantized mass would leave the signed 64-bit wire range."""


def _floor_div(a: int, b: int) -> int:
    return a // b


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


@dataclass(slots=True)
class MassState:
    """Per-node, per-coordinate integer consensus state."""

    y: int
    xi: int
    level: QuantLevel
    M: int = 0
    m: int = 0
    d: int = 0
    flag: bool = False


class RoutingTable:
    """Uniform routing over out-neighbors plus self: b = 1/(1 + out-degree)."""

    def __init__(self, graph: DiGraph):
        self.candidates = tuple(
            tuple(graph.out_neighbors(i)) + (i,) for i in range(graph.n)
        )

    def probability(self, receiver: int, sender: int) -> Fraction:
        cands = self.candidates[sender]
        if receiver in cands:
            return Fraction(1, len(cands))
        return Fraction(0)

    def choose(self, sender: int, rng) -> int:
        cands = self.candidates[sender]
        return cands[int(rng.random() * len(cands))]


def init_masses(value, level: QuantLevel) -> MassState:
    """Initial state: two pieces, total mass twice the quantized input."""
    y = 2 * quantize(value, level)
    if not -MASS_LIMIT < y < MASS_LIMIT:
        raise MassRangeError(
            f"quantized mass {y} exceeds the 63-bit range (value {value!r} at level {level})"
        )
    return MassState(y=y, xi=2, level=level)


def split_and_route(state: MassState, routing: RoutingTable, rng, sender: int = 0, coord: int = 0):
    """Split the local mass into xi near-equal pieces, keep one, route the rest.

    Emits exactly xi-1 pieces of value floor(y/xi) evaluated as the mass
    shrinks; emitted and retained values differ pairwise by at most one and
    sum to the original mass.
    """
    out = []
    state.d = state.xi
    while state.d > 1:
        c = state.y // state.xi
        state.y -= c
        state.xi -= 1
        state.d -= 1
        receiver = routing.choose(sender, rng)
        out.append((receiver, MassPiece(coord, c)))
    return out


def absorb(state: MassState, pieces: Sequence[MassPiece]) -> None:
    """Fold received pieces into the local mass; each carries count 1."""
    for piece in pieces:
        state.y += piece.value
    state.xi += len(pieces)


def maxmin_round_start(state: MassState) -> tuple[int, int]:
    """Reset the extrema from the local mass ratio: (ceil, floor) of y/xi."""
    state.M = _ceil_div(state.y, state.xi)
    state.m = _floor_div(state.y, state.xi)
    return state.M, state.m


def maxmin_merge(state: MassState, incoming: Sequence[tuple[int, int]]) -> None:
    """Merge received (max, min) pairs into the running extrema."""
    for hi, lo in incoming:
        if hi > state.M:
            state.M = hi
        if lo < state.m:
            state.m = lo


def check_terminate(state: MassState) -> Optional[float]:
    """Stop with m*delta when the merged extrema differ by at most one."""
    if state.M - state.m <= 1:
        state.flag = True
        return dequantize(state.m, state.level)
    return None


@dataclass
class ConsensusResult:
    z: list
    steps: int


def _levels_for(level: QuantLevel, p: int) -> list[QuantLevel]:
    # Vector inputs use a per-coordinate step of delta/ceil(sqrt(p)): rational,
    # and at most delta/sqrt(p), so the Euclidean agreement bound still holds.
    if p == 1:
        return [level]
    root = math.isqrt(p)
    if root * root < p:
        root += 1
    return [QuantLevel(level.delta / root)] * p


def run_consensus(
    values,
    graph: DiGraph,
    level: QuantLevel,
    B: int,
    seed: int = 0,
    *,
    max_steps: int = DEFAULT_STEP_CAP,
    clock: Optional[SimClock] = None,
    on_step=None,
    trace=None,
) -> ConsensusResult:
    """Run the full averaging protocol until every node terminates.

    ``values`` holds one scalar per node, or one length-p sequence per node
    (p independent scalar instances share the message layer and terminate
    jointly).  Returns the per-node results, all identical, and the step
    count at termination.  ``on_step(eta, states, clock)`` is called after
    each step's deliveries, for invariant checking.
    """
    n = graph.n
    try:
        p = len(values[0])
        rows = [list(map(float, row)) for row in values]
    except TypeError:
        p = 1
        rows = [[float(v)] for v in values]
    if len(rows) != n:
        raise ValueError(f"got {len(rows)} inputs for {n} nodes")

    levels = _levels_for(level, p)
    states = [[init_masses(rows[i][c], levels[c]) for c in range(p)] for i in range(n)]
    routing = RoutingTable(graph)
    if clock is None:
        clock = SimClock(B, seed=seed, graph=graph, trace=trace)
    rng = clock.rng
    L = graph.diameter * B
    start_mod = 1 % L
    horizon = B - 1
    # Recently emitted piece values, per node and coordinate; only pieces sent
    # within the last B-1 steps can still be in flight at a round start.
    # Folding them into the stopping-condition extrema makes a passing check
    # certify every piece in the system, not just the node-held ones.
    windows = [[deque() for _ in range(p)] for _ in range(n)]
    cond_hi = [[0] * p for _ in range(n)]
    cond_lo = [[0] * p for _ in range(n)]

    out_neighbors = [graph.out_neighbors(i) for i in range(n)]
    final_eta = None
    for eta in range(1, max_steps + 1):
        clock.begin()
        round_no = (eta - 1) // L + 1
        if eta % L == start_mod:
            cutoff = eta - horizon
            for i in range(n):
                for c in range(p):
                    st = states[i][c]
                    hi, lo = maxmin_round_start(st)
                    if horizon:
                        w = windows[i][c]
                        while w and w[0][0] < cutoff:
                            w.popleft()
                        for _, v in w:
                            if v > hi:
                                hi = v
                            if v < lo:
                                lo = v
                    cond_hi[i][c] = hi
                    cond_lo[i][c] = lo
        for i in range(n):
            for c in range(p):
                st = states[i][c]
                pair = MaxMinPair(c, cond_hi[i][c], cond_lo[i][c], st.M, st.m, round_no)
                for l in out_neighbors[i]:
                    clock.send(i, l, pair)
        for i in range(n):
            for c in range(p):
                st = states[i][c]
                if st.xi > 1:
                    for receiver, piece in split_and_route(st, routing, rng, sender=i, coord=c):
                        if horizon:
                            windows[i][c].append((eta, piece.value))
                        clock.send(i, receiver, piece)
        for msg in clock.drain_due():
            payload = msg.payload
            i = msg.receiver
            c = payload.coord
            st = states[i][c]
            if type(payload) is MassPiece:
                st.y += payload.value
                st.xi += 1
            elif payload.round_no == round_no:
                if payload.max_value > cond_hi[i][c]:
                    cond_hi[i][c] = payload.max_value
                if payload.min_value < cond_lo[i][c]:
                    cond_lo[i][c] = payload.min_value
                if payload.z_max > st.M:
                    st.M = payload.z_max
                if payload.z_min < st.m:
                    st.m = payload.z_min
        if on_step is not None:
            on_step(eta, states, clock)
        if eta % L == 0:
            decisions = [
                all(cond_hi[i][c] - cond_lo[i][c] <= 1 for c in range(p))
                for i in range(n)
            ]
            if all(decisions):
                final_eta = eta
                break
            if any(decisions):
                # Round-tagged extrema make the check outcome identical at
                # every node; a split decision means the simulator is broken.
                raise NonTerminationError(
                    f"asymmetric termination decision at step {eta}"
                )
    if final_eta is None:
        raise NonTerminationError(
            f"consensus did not terminate within {max_steps} steps "
            f"(n={n}, B={B}, diameter={graph.diameter})"
        )

    z = []
    for i in range(n):
        vals = [check_terminate(states[i][c]) for c in range(p)]
        if any(v is None for v in vals):
            # a certified pass implies every merged ratio extremum is within
            # one unit, so the per-state check cannot fail here
            raise NonTerminationError(f"inconsistent termination state at node {i}")
        z.append(vals[0] if p == 1 else vals)

    # Late pieces addressed to terminated nodes are absorbed for bookkeeping
    # only, so mass totals stay exact through the end of the run.
    while clock.pending_count():
        clock.begin()
        for msg in clock.drain_due():
            payload = msg.payload
            if type(payload) is MassPiece:
                st = states[msg.receiver][payload.coord]
                st.y += payload.value
                st.xi += 1
        if on_step is not None:
            on_step(clock.eta, states, clock)

    return ConsensusResult(z=z, steps=final_eta)


def run_maxmin(
    values: Sequence[int],
    graph: DiGraph,
    B: int,
    seed: int = 0,
    steps: Optional[int] = None,
) -> tuple[list[int], list[int]]:
    """Plain asynchronous max/min consensus on static integer values.

    Runs for D*B steps by default, after which every node holds the global
    extrema.  Used standalone and as the stopping layer's reference behavior.
    """
    n = graph.n
    if len(values) != n:
        raise ValueError(f"got {len(values)} values for {n} nodes")
    if steps is None:
        steps = graph.diameter * B
    clock = SimClock(B, seed=seed, graph=graph)
    hi = [int(v) for v in values]
    lo = [int(v) for v in values]
    out_neighbors = [graph.out_neighbors(i) for i in range(n)]
    for _ in range(steps):
        clock.begin()
        for i in range(n):
            pair = MaxMinPair(0, hi[i], lo[i], hi[i], lo[i], 1)
            for l in out_neighbors[i]:
                clock.send(i, l, pair)
        for msg in clock.drain_due():
            payload = msg.payload
            i = msg.receiver
            if payload.max_value > hi[i]:
                hi[i] = payload.max_value
            if payload.min_value < lo[i]:
                lo[i] = payload.min_value
    return hi, lo
