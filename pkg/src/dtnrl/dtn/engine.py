"""Discrete-event DTN engine advanced in fixed control steps.

Every node keeps one FCFS departure line. The oldest routed bundle leaves
over the first contact of its route as soon as that contact is open and its
link transmitter is idle; until then it blocks the bundles behind it. Each
ordered node pair has one transmitter running at the sender's current radio
rate. A transmission only starts if it finishes inside the contact and its
arrival lands inside the current step, so every hop is charged, and every
delivery counted, in one step.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from ..events import EventQueue
from ..orbits import Contact, ContactPlan
from .bundle import (
    ACCEPTED,
    DROP_CAUSES,
    Bundle,
    BundleState,
    NodeState,
    Priority,
    drop_by_priority,
    enqueue,
    purge_expired,
)
from .routing import cgr_route, contact_graph

_GENERATE, _CONTACT_START, _CONTACT_END, _TX_END, _ARRIVE = range(5)


@dataclass
class StepMetrics:
    delivered_bits: float = 0.0
    cost_bits: float = 0.0
    delivered_bundle_count: int = 0
    generated_bundle_count: int = 0
    generated_bits: float = 0.0
    mean_delivery_delay: float = 0.0
    drops_by_cause: dict = field(default_factory=lambda: {c: 0 for c in DROP_CAUSES})
    dropped_bits_by_cause: dict = field(default_factory=lambda: {c: 0.0 for c in DROP_CAUSES})
    utilizations: list = field(default_factory=list)
    total_link_capacity: float = 0.0

    @property
    def max_utilization(self) -> float:
        return max(self.utilizations) if self.utilizations else 0.0


@dataclass
class Totals:
    generated: int = 0
    generated_bits: float = 0.0
    delivered: int = 0
    delivered_bits: float = 0.0
    cost_bits: float = 0.0


class Engine:
    """Single-threaded DTN simulation over a fixed contact plan.

    ``traffic`` is any object with ``generate_for_window(node, t_a, t_b)``
    returning bundles; it may be None for hand-fed scenarios (see
    :meth:`inject`).
    """

    def __init__(
        self,
        plan: ContactPlan,
        node_ids: Iterable[int],
        buffer_capacity: float = 80_000.0,
        rates=500.0,
        traffic=None,
        start_time: float | None = None,
    ):
        self.plan = plan
        self.graph = contact_graph(plan)
        self.node_ids = list(node_ids)
        if isinstance(rates, (int, float)):
            rates = {n: float(rates) for n in self.node_ids}
        self.nodes = {
            n: NodeState(n, buffer_capacity, float(rates[n])) for n in self.node_ids
        }
        self.rates = {n: self.nodes[n].radio_rate for n in self.node_ids}
        self.traffic = traffic
        self.now = plan.horizon[0] if start_time is None else float(start_time)
        self.step_end = self.now
        self.events = EventQueue()
        self.active: dict[tuple[int, int], Contact] = {}
        self.busy: set[tuple[int, int]] = set()
        self.in_flight: dict[int, Bundle] = {}
        self.totals = Totals()
        self._step: StepMetrics | None = None
        self._delay_sum = 0.0
        self._drop_marks = self._drop_snapshot()
        # set to a list to record ("enter" | "depart", node, bundle id) events
        self.trace: list | None = None
        self._contacts_by_start = sorted(plan.contacts, key=lambda c: c.start)
        for c in self._contacts_by_start:
            if c.end <= self.now:
                continue
            if c.start <= self.now:
                self.active[(c.from_id, c.to_id)] = c
            else:
                self.events.push(c.start, _CONTACT_START, c)
            self.events.push(c.end, _CONTACT_END, c)

    # -- control surface ----------------------------------------------------

    def set_rate(self, node_id: int, rate: float) -> None:
        self.nodes[node_id].radio_rate = float(rate)
        self.rates[node_id] = float(rate)

    def drop_priorities(self, priorities: Iterable[Priority]) -> float:
        """Apply :func:`drop_by_priority` at every node; returns bits removed."""
        priorities = set(priorities)
        return sum(drop_by_priority(self.nodes[n], priorities) for n in self.node_ids)

    def inject(self, bundle: Bundle) -> None:
        """Schedule an externally built bundle for creation at its source."""
        self.events.push(bundle.creation_time, _GENERATE, bundle)

    # -- stepping -----------------------------------------------------------

    def step_simulation(self, duration: float) -> StepMetrics:
        if not duration > 0:
            raise ValueError(f"step duration must be positive, got {duration}")
        t_a = self.now
        t_b = t_a + duration
        self.step_end = t_b
        self._step = m = StepMetrics()
        self._delay_sum = 0.0

        if self.traffic is not None:
            for n in self.node_ids:
                for b in self.traffic.generate_for_window(n, t_a, t_b):
                    self.events.push(b.creation_time, _GENERATE, b)

        for n in self.node_ids:
            node = self.nodes[n]
            for b in [b for b in node.queue if b.next_hop is None and node.holds(b)]:
                self._route(node, b, kick=False)
            self._kick(node)

        events = self.events
        while events.peek_time() <= t_b:
            time, kind, payload = events.pop()
            self.now = time
            if kind == _GENERATE:
                self._on_generate(payload)
            elif kind == _TX_END:
                self._on_tx_end(*payload)
            elif kind == _ARRIVE:
                self._on_arrive(*payload)
            elif kind == _CONTACT_START:
                self._on_contact_start(payload)
            else:
                self._on_contact_end(payload)
        self.now = t_b

        for n in self.node_ids:
            purge_expired(self.nodes[n], t_b)

        m.total_link_capacity = self.link_capacity(t_a, t_b)
        m.mean_delivery_delay = (
            self._delay_sum / m.delivered_bundle_count if m.delivered_bundle_count else 0.0
        )
        marks = self._drop_snapshot()
        for cause in DROP_CAUSES:
            m.drops_by_cause[cause] = marks[cause][0] - self._drop_marks[cause][0]
            m.dropped_bits_by_cause[cause] = marks[cause][1] - self._drop_marks[cause][1]
        self._drop_marks = marks
        m.utilizations = [self.nodes[n].utilization for n in self.node_ids]
        self._step = None
        return m

    def link_capacity(self, t_a: float, t_b: float) -> float:
        """Sum over contacts of sender rate times window overlap with ``[t_a, t_b]``."""
        total = 0.0
        for c in self._contacts_by_start:
            if c.start >= t_b:
                break
            overlap = min(c.end, t_b) - max(c.start, t_a)
            if overlap > 0:
                total += self.rates[c.from_id] * overlap
        return total

    # -- bookkeeping ----------------------------------------------------------

    def drop_totals(self) -> dict:
        """``cause -> (count, bits)`` summed over all nodes."""
        return self._drop_snapshot()

    def _drop_snapshot(self):
        out = {}
        for cause in DROP_CAUSES:
            count = bits = 0
            for n in self.node_ids:
                d = self.nodes[n].drops[cause]
                count += d.total_count
                bits += d.total_bits
            out[cause] = (count, bits)
        return out

    def buffered(self) -> tuple[int, float]:
        count = sum(len(self.nodes[n].buffer) for n in self.node_ids)
        bits = sum(self.nodes[n].buffered_bits for n in self.node_ids)
        return count, bits

    def conservation(self) -> dict:
        """Both sides of the bundle balance, by count and by bits."""
        drops = self._drop_snapshot()
        buffered_count, buffered_bits = self.buffered()
        in_flight_bits = sum(b.size for b in self.in_flight.values())
        return {
            "generated": self.totals.generated,
            "generated_bits": self.totals.generated_bits,
            "accounted": self.totals.delivered
            + sum(drops[c][0] for c in DROP_CAUSES)
            + buffered_count
            + len(self.in_flight),
            "accounted_bits": self.totals.delivered_bits
            + sum(drops[c][1] for c in DROP_CAUSES)
            + buffered_bits
            + in_flight_bits,
        }

    # -- event handlers -------------------------------------------------------

    def _on_generate(self, b: Bundle) -> None:
        self.totals.generated += 1
        self.totals.generated_bits += b.size
        if self._step is not None:
            self._step.generated_bundle_count += 1
            self._step.generated_bits += b.size
        node = self.nodes[b.source]
        if enqueue(node, b, self.now) == ACCEPTED:
            if self.trace is not None:
                self.trace.append(("enter", node.id, b.id))
            self._route(node, b)

    def _on_contact_start(self, c: Contact) -> None:
        self.active[(c.from_id, c.to_id)] = c
        self._kick(self.nodes[c.from_id])

    def _on_contact_end(self, c: Contact) -> None:
        pair = (c.from_id, c.to_id)
        if self.active.get(pair) is c:
            del self.active[pair]
        node = self.nodes[c.from_id]
        now = self.now
        stranded = [
            b
            for b in node.queue
            if b.next_hop == c.to_id and b.planned_contact_end <= now and node.holds(b)
        ]
        for b in stranded:
            self._route(node, b, kick=False)
        if stranded:
            self._kick(node)

    def _on_tx_end(self, pair, b: Bundle, owlt: float) -> None:
        self.busy.discard(pair)
        self.totals.cost_bits += b.size
        self._step.cost_bits += b.size
        self.events.push(self.now + owlt, _ARRIVE, (pair[1], b))
        self._kick(self.nodes[pair[0]])

    def _on_arrive(self, v: int, b: Bundle) -> None:
        del self.in_flight[b.id]
        b.hop_count += 1
        if v == b.destination:
            b.state = BundleState.DELIVERED
            b.current_holder = v
            b.delivered_time = self.now
            self.totals.delivered += 1
            self.totals.delivered_bits += b.size
            m = self._step
            m.delivered_bits += b.size
            m.delivered_bundle_count += 1
            self._delay_sum += self.now - b.creation_time
            return
        node = self.nodes[v]
        if enqueue(node, b, self.now) == ACCEPTED:
            if self.trace is not None:
                self.trace.append(("enter", v, b.id))
            self._route(node, b)

    # -- forwarding -----------------------------------------------------------

    def _route(self, node: NodeState, b: Bundle, kick: bool = True) -> None:
        route = cgr_route(b, self.plan, node.id, self.now, rates=self.rates)
        if route is None or not route.hops:
            b.next_hop = None
            b.planned_contact_end = float("inf")
            return
        first = route.hops[0]
        b.next_hop = first.to_id
        b.planned_contact_end = first.end
        if kick:
            self._kick(node)

    def _kick(self, node: NodeState) -> None:
        """Start as many departures from the head of the line as possible."""
        now = self.now
        u = node.id
        while True:
            b = node.head()
            if b is None:
                return
            if b.expired(now):
                node.remove(b)
                node.record_drop(b, "ttl")
                continue
            pair = (u, b.next_hop)
            if pair in self.busy:
                return
            c = self.active.get(pair)
            if c is None:
                return
            tx = b.size / node.radio_rate
            if now + tx > c.end or now + tx + c.owlt > self.step_end:
                return
            node.remove(b)
            if self.trace is not None:
                self.trace.append(("depart", u, b.id))
            b.state = BundleState.IN_FLIGHT
            self.in_flight[b.id] = b
            self.busy.add(pair)
            self.events.push(now + tx, _TX_END, (pair, b, c.owlt))
