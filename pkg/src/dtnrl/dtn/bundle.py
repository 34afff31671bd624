"""Bundles, node buffers and the two buffer operations the agent triggers."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Iterable


class Priority(IntEnum):
    LOW = 0
    MEDIUM = 1
    HIGH = 2


class BundleState(IntEnum):
    BUFFERED = 0
    IN_FLIGHT = 1
    DELIVERED = 2
    DROPPED = 3


DROP_CAUSES = ("overflow", "ttl", "action")

ACCEPTED = "accepted"
DROPPED_OVERFLOW = "dropped_overflow"
DROPPED_TTL = "dropped_ttl"


@dataclass(slots=True, eq=False)
class Bundle:
    id: int
    source: int
    destination: int
    size: float
    priority: Priority
    creation_time: float
    ttl: float
    current_holder: int = -1
    delivered_time: float | None = None
    hop_count: int = 0
    state: BundleState = BundleState.BUFFERED
    # first hop of the current route; None while unroutable
    next_hop: int | None = None
    planned_contact_end: float = float("inf")

    def __post_init__(self):
        if not self.size > 0:
            raise ValueError(f"bundle size must be positive, got {self.size}")
        if not self.ttl > 0:
            raise ValueError(f"bundle ttl must be positive, got {self.ttl}")
        if self.current_holder < 0:
            self.current_holder = self.source

    def expired(self, now: float) -> bool:
        return now >= self.creation_time + self.ttl


@dataclass
class DropCounter:
    count: list = field(default_factory=lambda: [0, 0, 0])
    bits: list = field(default_factory=lambda: [0.0, 0.0, 0.0])

    def add(self, bundle: Bundle):
        self.count[bundle.priority] += 1
        self.bits[bundle.priority] += bundle.size

    @property
    def total_count(self) -> int:
        return sum(self.count)

    @property
    def total_bits(self) -> float:
        return sum(self.bits)


@dataclass(eq=False)
class NodeState:
    """A DTN node: one FCFS buffer, a radio rate and drop tallies.

    ``buffer`` maps bundle id to bundle; ``queue`` is the departure line in
    arrival order. The line may hold stale entries for bundles that already
    left; they are skipped lazily.
    """

    id: int
    buffer_capacity: float = 80_000.0
    radio_rate: float = 500.0
    buffer: dict = field(default_factory=dict)
    buffered_bits: float = 0.0
    queue: deque = field(default_factory=deque)
    drops: dict = field(default_factory=lambda: {c: DropCounter() for c in DROP_CAUSES})

    @property
    def utilization(self) -> float:
        return self.buffered_bits / self.buffer_capacity

    def remove(self, bundle: Bundle) -> None:
        del self.buffer[bundle.id]
        self.buffered_bits -= bundle.size
        if not self.buffer:
            self.buffered_bits = 0.0

    def record_drop(self, bundle: Bundle, cause: str) -> None:
        bundle.state = BundleState.DROPPED
        self.drops[cause].add(bundle)

    def holds(self, bundle: Bundle) -> bool:
        return bundle.state is BundleState.BUFFERED and bundle.current_holder == self.id

    def prune_queues(self) -> None:
        """Drop stale line entries for bundles that left the buffer."""
        self.queue = deque(b for b in self.queue if self.holds(b))

    def head(self) -> Bundle | None:
        """Oldest buffered bundle that has a route, or None."""
        q = self.queue
        while q and not self.holds(q[0]):
            q.popleft()
        for b in q:
            if b.next_hop is not None and self.holds(b):
                return b
        return None


def enqueue(node: NodeState, bundle: Bundle, now: float) -> str:
    """Tail-append ``bundle`` to the node buffer if it fits.

    Queued bundles are never evicted; an incoming bundle that does not fit
    is dropped and tallied under ``overflow``. Expired bundles are refused
    and tallied under ``ttl``.
    """
    if bundle.expired(now):
        node.record_drop(bundle, "ttl")
        return DROPPED_TTL
    if node.buffered_bits + bundle.size > node.buffer_capacity:
        node.record_drop(bundle, "overflow")
        return DROPPED_OVERFLOW
    bundle.current_holder = node.id
    bundle.state = BundleState.BUFFERED
    bundle.next_hop = None
    node.buffer[bundle.id] = bundle
    node.queue.append(bundle)
    node.buffered_bits += bundle.size
    return ACCEPTED


def drop_by_priority(node: NodeState, priorities: Iterable[Priority]) -> float:
    """Remove every buffered bundle whose priority is in ``priorities``.

    Survivors keep their FCFS order. Returns the number of bits removed.
    """
    wanted = {Priority(p) for p in priorities}
    if not wanted or not node.buffer:
        return 0.0
    victims = [b for b in node.buffer.values() if b.priority in wanted]
    dropped = 0.0
    for b in victims:
        node.remove(b)
        node.record_drop(b, "action")
        dropped += b.size
    if victims:
        node.prune_queues()
    return dropped


def purge_expired(node: NodeState, now: float) -> int:
    victims = [b for b in node.buffer.values() if b.expired(now)]
    for b in victims:
        node.remove(b)
        node.record_drop(b, "ttl")
    if victims:
        node.prune_queues()
    return len(victims)
