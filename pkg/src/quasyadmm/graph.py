"""Directed communication graphs: validation, generation, and metrics.

Edges are stored as ordered pairs ``(receiver, sender)``: the pair ``(l, i)``
means node ``l`` can receive from node ``i``.  Every node additionally has an
implicit self-edge used for message routing; self-edges are never part of the
edge set, never count toward out-degrees, and never count toward path lengths.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence


class NotStronglyConnectedError(ValueError):
    """Raised when a digraph has no directed path between some node pair."""


@dataclass(frozen=True)
class DiGraph:
    """Static directed graph on nodes 0..n-1, guaranteed strongly connected.

    Construct through :func:`from_edge_list` or
    :func:`random_strongly_connected`; both enforce strong connectivity.
    Instances are immutable and safe to share across threads.
    """

    n: int
    edges: frozenset[tuple[int, int]]
    _in: tuple[tuple[int, ...], ...] = field(repr=False, compare=False)
    _out: tuple[tuple[int, ...], ...] = field(repr=False, compare=False)
    _diameter: int = field(repr=False, compare=False)

    def in_neighbors(self, i: int) -> tuple[int, ...]:
        """Nodes that can transmit to ``i`` (sorted, self excluded)."""
        return self._in[i]

    def out_neighbors(self, i: int) -> tuple[int, ...]:
        """Nodes that can receive from ``i`` (sorted, self excluded)."""
        return self._out[i]

    def out_degree(self, i: int) -> int:
        return len(self._out[i])

    @property
    def diameter(self) -> int:
        """Longest shortest directed path over all ordered node pairs."""
        return self._diameter


def from_edge_list(n: int, pairs: Iterable[tuple[int, int]]) -> DiGraph:
    """Build a DiGraph from ``(receiver, sender)`` pairs.

    Raises ValueError on out-of-range indices, self-pairs, or duplicates, and
    NotStronglyConnectedError when some ordered node pair has no directed path.
    """
    if n < 2:
        raise ValueError(f"need at least 2 nodes, got n={n}")
    edge_set: set[tuple[int, int]] = set()
    for recv, send in pairs:
        if not (0 <= recv < n and 0 <= send < n):
            raise ValueError(f"edge ({recv}, {send}) out of range for n={n}")
        if recv == send:
            raise ValueError(f"explicit self-edge ({recv}, {send}) not allowed")
        if (recv, send) in edge_set:
            raise ValueError(f"duplicate edge ({recv}, {send})")
        edge_set.add((recv, send))

    ins: list[list[int]] = [[] for _ in range(n)]
    outs: list[list[int]] = [[] for _ in range(n)]
    for recv, send in edge_set:
        ins[recv].append(send)
        outs[send].append(recv)
    in_adj = tuple(tuple(sorted(a)) for a in ins)
    out_adj = tuple(tuple(sorted(a)) for a in outs)

    if not _reaches_all(out_adj, 0) or not _reaches_all(in_adj, 0):
        raise NotStronglyConnectedError(
            f"digraph on {n} nodes with {len(edge_set)} edges is not strongly connected"
        )
    diam = _diameter_bfs(out_adj)
    return DiGraph(n, frozenset(edge_set), in_adj, out_adj, diam)


def diameter(g: DiGraph) -> int:
    """Longest shortest-path length between any ordered pair of nodes."""
    return g.diameter


def _reaches_all(adj: Sequence[Sequence[int]], start: int) -> bool:
    seen = [False] * len(adj)
    seen[start] = True
    queue = deque([start])
    count = 1
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if not seen[v]:
                seen[v] = True
                count += 1
                queue.append(v)
    return count == len(adj)


def _diameter_bfs(out_adj: Sequence[Sequence[int]]) -> int:
    n = len(out_adj)
    best = 0
    for src in range(n):
        dist = [-1] * n
        dist[src] = 0
        queue = deque([src])
        while queue:
            u = queue.popleft()
            for v in out_adj[u]:
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    queue.append(v)
        best = max(best, max(dist))
    return best


def random_strongly_connected(n: int, extra_edge_prob: float, seed: int) -> DiGraph:
    """Random strongly connected digraph: Hamiltonian cycle plus extra arcs.

    A random directed Hamiltonian cycle guarantees strong connectivity; every
    other ordered pair is added independently with ``extra_edge_prob``.
    Deterministic for a given seed.
    """
    if n < 2:
        raise ValueError(f"need at least 2 nodes, got n={n}")
    if not (0.0 <= extra_edge_prob <= 1.0):
        raise ValueError(f"extra_edge_prob must be in [0, 1], got {extra_edge_prob}")
    rng = random.Random(seed)
    order = list(range(n))
    rng.shuffle(order)
    pairs = set()
    for t in range(n):
        sender = order[t]
        receiver = order[(t + 1) % n]
        pairs.add((receiver, sender))
    if extra_edge_prob > 0.0:
        for sender in range(n):
            for receiver in range(n):
                if receiver == sender or (receiver, sender) in pairs:
                    continue
                if rng.random() < extra_edge_prob:
                    pairs.add((receiver, sender))
    return from_edge_list(n, pairs)


def read_edge_list(path: str | Path) -> DiGraph:
    """Parse the edge-list text format: first line n, then 'receiver sender' lines."""
    lines = Path(path).read_text().split("\n")
    stripped = [ln.strip() for ln in lines]
    body = [ln for ln in stripped if ln]
    if not body:
        raise ValueError(f"{path}: empty edge-list file")
    try:
        n = int(body[0])
    except ValueError:
        raise ValueError(f"{path}: first line must be the node count, got {body[0]!r}")
    pairs = []
    for ln in body[1:]:
        fields = ln.split()
        if len(fields) != 2:
            raise ValueError(f"{path}: expected 'receiver sender', got {ln!r}")
        pairs.append((int(fields[0]), int(fields[1])))
    return from_edge_list(n, pairs)


def write_edge_list(g: DiGraph, path: str | Path) -> None:
    """Write the edge-list text format (sorted pairs, deterministic)."""
    out = [str(g.n)]
    out.extend(f"{recv} {send}" for recv, send in sorted(g.edges))
    Path(path).write_text("\n".join(out) + "\n")
