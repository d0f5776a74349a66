"""Deterministic event-driven message layer with bounded per-message delays.

Time advances in integer steps eta = 1, 2, ...  A message sent during step
eta is delivered during step ``eta + delay`` where delay is drawn uniformly
from {0, ..., B-1} from the clock's seeded stream; self-addressed messages
always have delay 0.  The per-message draw realizes every delay pattern the
bound admits while staying reproducible: one seeded generator serves both
delay draws and any caller randomness (routing), interleaved in event order.

Step protocol: ``begin()`` opens step eta, callers ``send()`` during the
step, ``drain_due()`` closes it and hands over everything due at eta
(including same-step delay-0 sends).  ``advance()`` composes begin+drain for
drivers that only consume; a send between steps belongs to the next step.
"""

from __future__ import annotations

import random
from typing import Callable, Iterator, NamedTuple, Optional, Union


class MassPiece(NamedTuple):
    """One split-off integer mass piece; carries an implicit count of 1."""

    coord: int
    value: int


class MaxMinPair(NamedTuple):
    """Running max/min of the mass ratios, scoped to one max/min round.

    ``max_value``/``min_value`` are the termination-condition extrema, which
    also cover pieces the sender recently emitted (possibly still in flight);
    ``z_max``/``z_min`` are the plain mass-ratio extrema that define the
    output value.  Pairs from an earlier round can still be in flight when a
    new round starts; the round tag lets receivers discard them (merging
    stale extrema would make round restarts meaningless).
    """

    coord: int
    max_value: int
    min_value: int
    z_max: int
    z_min: int
    round_no: int


Payload = Union[MassPiece, MaxMinPair]


class Message(NamedTuple):
    sender: int
    receiver: int
    payload: Payload
    sent_at: int
    deliver_at: int


class InvalidReceiverError(ValueError):
    """Raised when the receiver is not an out-neighbor of the sender."""


TraceFn = Callable[[int, int, int, str, str], None]


class SimClock:
    """Global step counter plus a deterministic pending-message queue."""

    def __init__(self, B: int, seed: int = 0, graph=None, trace: Optional[TraceFn] = None):
        if B < 1:
            raise ValueError(f"delay bound B must be >= 1, got {B}")
        self.B = B
        self.eta = 0
        self.rng = random.Random(seed)
        self.graph = graph
        self.trace = trace
        self.sent_count = 0
        self.delivered_count = 0
        self._queue: dict[int, list[Message]] = {}
        self._open = False

    def begin(self) -> int:
        """Open the next step and return its index."""
        self.eta += 1
        self._open = True
        return self.eta

    def send(self, sender: int, receiver: int, payload: Payload) -> None:
        """Enqueue a message with a uniformly drawn bounded delay.

        Sends between steps (no step open) are stamped for the next step.
        """
        if self.graph is not None and receiver != sender:
            if receiver not in self.graph.out_neighbors(sender):
                raise InvalidReceiverError(
                    f"node {receiver} is not an out-neighbor of node {sender}"
                )
        sent_at = self.eta if self._open else self.eta + 1
        if receiver == sender:
            delay = 0
        else:
            delay = int(self.rng.random() * self.B)
        msg = Message(sender, receiver, payload, sent_at, sent_at + delay)
        self._queue.setdefault(msg.deliver_at, []).append(msg)
        self.sent_count += 1

    def drain_due(self) -> list[Message]:
        """Close the current step and return its deliveries.

        Messages come grouped by receiver; within a receiver group they keep
        enqueue order (which follows sender order for loop-driven senders).
        """
        self._open = False
        due = self._queue.pop(self.eta, [])
        due.sort(key=lambda m: m.receiver)
        self.delivered_count += len(due)
        if self.trace is not None:
            for m in due:
                if isinstance(m.payload, MassPiece):
                    kind, value = "mass", str(m.payload.value)
                else:
                    kind, value = "maxmin", f"{m.payload.max_value};{m.payload.min_value}"
                self.trace(self.eta, m.sender, m.receiver, kind, value)
        return due

    def advance(self) -> list[Message]:
        """Increment eta and return exactly the messages due at the new step."""
        self.begin()
        return self.drain_due()

    def pending(self) -> Iterator[Message]:
        """All enqueued, undelivered messages (for accounting and tests)."""
        for step in sorted(self._queue):
            yield from self._queue[step]

    def pending_count(self) -> int:
        return sum(len(v) for v in self._queue.values())
