"""Earliest-delivery contact graph routing.

The search is Dijkstra over nodes keyed by earliest arrival time. Because
departure ``max(arrival, contact.start)`` is non-decreasing in the arrival
time, the node-level earliest arrival is exact for contact sequences.
"""

from __future__ import annotations

import heapq
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from ..orbits import Contact, ContactPlan


@dataclass
class Route:
    hops: list[Contact] = field(default_factory=list)
    best_delivery_time: float = 0.0

    @property
    def next_hop(self) -> int | None:
        return self.hops[0].to_id if self.hops else None


class ContactGraph:
    """Per-sender index of a contact plan: for each neighbour, contacts by start."""

    def __init__(self, plan: ContactPlan):
        by_pair: dict[tuple[int, int], list[Contact]] = {}
        for c in plan.contacts:
            by_pair.setdefault((c.from_id, c.to_id), []).append(c)
        self.out: dict[int, list[tuple]] = {}
        for (u, v), cs in sorted(by_pair.items()):
            cs.sort(key=lambda c: c.start)
            self.out.setdefault(u, []).append(
                (
                    v,
                    [c.start for c in cs],
                    [c.end for c in cs],
                    [c.owlt for c in cs],
                    cs,
                )
            )
        self.horizon_end = plan.horizon[1]


def contact_graph(plan: ContactPlan) -> ContactGraph:
    """Index for ``plan``, built once and cached on the plan object."""
    graph = plan.__dict__.get("_contact_graph")
    if graph is None or graph[0] != len(plan.contacts):
        graph = (len(plan.contacts), ContactGraph(plan))
        plan.__dict__["_contact_graph"] = graph
    return graph[1]


def cgr_route(
    bundle,
    plan: ContactPlan,
    at_node: int,
    now: float,
    excluded_nodes=(),
    rates: Mapping[int, float] | Sequence[float] | None = None,
) -> Route | None:
    """Best route for ``bundle`` held at ``at_node`` at time ``now``.

    Traversing a contact costs ``max(t, start) + owlt + size / rate`` where
    the transmission must finish inside the window and ``rate`` is the
    sender's rate taken from ``rates`` (or the contact's nominal rate).
    Returns None if the destination cannot be reached before the bundle
    expires or the plan ends.
    """
    dest = bundle.destination
    if at_node == dest:
        return Route([], now)
    if dest in excluded_nodes:
        return None
    graph = contact_graph(plan)
    ttl_deadline = bundle.creation_time + bundle.ttl
    horizon_end = graph.horizon_end
    size = bundle.size

    best = {at_node: now}
    pred: dict[int, tuple[int, Contact]] = {}
    done = set()
    heap = [(now, at_node)]
    inf = float("inf")
    out = graph.out
    pop, push = heapq.heappop, heapq.heappush
    while heap:
        t, u = pop(heap)
        if u in done:
            continue
        if u == dest:
            break
        done.add(u)
        tx = None if rates is None else size / rates[u]
        for v, starts, ends, owlts, contacts in out.get(u, ()):
            if v in done or (excluded_nodes and v in excluded_nodes):
                continue
            k = bisect_right(ends, t)
            n = len(ends)
            while k < n:
                if rates is None:
                    tx = size / contacts[k].rate
                dep = starts[k] if starts[k] > t else t
                if dep + tx <= ends[k]:
                    break
                k += 1
            else:
                continue
            arr = dep + tx + owlts[k]
            if arr >= ttl_deadline or arr > horizon_end:
                continue
            if arr < best.get(v, inf):
                best[v] = arr
                pred[v] = (u, contacts[k])
                push(heap, (arr, v))

    if dest not in pred:
        return None
    hops = []
    node = dest
    while node != at_node:
        u, c = pred[node]
        hops.append(c)
        node = u
    hops.reverse()
    return Route(hops, best[dest])
