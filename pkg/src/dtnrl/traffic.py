"""Periodic, priority-tagged bundle generation at every node."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dtn.bundle import Bundle, Priority


@dataclass(frozen=True)
class TrafficConfig:
    inter_arrival: float = 9.0
    priorities: tuple = (1 / 3, 1 / 3, 1 / 3)  # low, medium, high
    ttl: float = 3600.0
    bundle_size: float = 500.0
    destination_policy: str = "uniform-over-other-LEO"

    def __post_init__(self):
        if not self.inter_arrival > 0:
            raise ValueError("inter_arrival must be positive")
        if len(self.priorities) != 3 or any(p < 0 for p in self.priorities):
            raise ValueError("priorities must be three non-negative weights")
        if abs(sum(self.priorities) - 1.0) > 1e-9:
            raise ValueError(f"priority distribution sums to {sum(self.priorities)}, not 1")
        if self.destination_policy != "uniform-over-other-LEO":
            raise ValueError(f"unknown destination policy {self.destination_policy!r}")


def emission_times(phase: float, inter_arrival: float, t_a: float, t_b: float) -> list[float]:
    """Instants ``phase + k * inter_arrival`` (k >= 0) inside ``[t_a, t_b)``."""
    k = max(0, math.ceil((t_a - phase) / inter_arrival))
    # guard against ceil landing one slot late through rounding
    while k > 0 and phase + (k - 1) * inter_arrival >= t_a:
        k -= 1
    times = []
    t = phase + k * inter_arrival
    while t < t_b:
        if t >= t_a:
            times.append(t)
        k += 1
        t = phase + k * inter_arrival
    return times


def generate_for_window(
    node: int,
    window: tuple[float, float],
    cfg: TrafficConfig,
    rng: np.random.Generator,
    phase: float,
    node_ids: Sequence[int],
    first_id: int = 0,
) -> list[Bundle]:
    t_a, t_b = window
    if not t_a < t_b:
        raise ValueError(f"empty window [{t_a}, {t_b})")
    times = emission_times(phase, cfg.inter_arrival, t_a, t_b)
    if not times:
        return []
    others = [n for n in node_ids if n != node]
    cum = np.cumsum(cfg.priorities)
    u = rng.random(len(times))
    prio = np.minimum(np.searchsorted(cum, u, side="right"), 2)
    dest = rng.integers(0, len(others), size=len(times))
    return [
        Bundle(
            id=first_id + k,
            source=node,
            destination=others[dest[k]],
            size=cfg.bundle_size,
            priority=Priority(int(prio[k])),
            creation_time=t,
            ttl=cfg.ttl,
        )
        for k, t in enumerate(times)
    ]


class TrafficGenerator:
    """Per-episode traffic source: fixed per-node phases, one rng stream."""

    def __init__(self, node_ids: Sequence[int], cfg: TrafficConfig, rng: np.random.Generator):
        self.node_ids = list(node_ids)
        self.cfg = cfg
        self.rng = rng
        self.phases = {n: float(rng.uniform(0.0, cfg.inter_arrival)) for n in self.node_ids}
        self.next_id = 0

    def generate_for_window(self, node: int, t_a: float, t_b: float) -> list[Bundle]:
        bundles = generate_for_window(
            node, (t_a, t_b), self.cfg, self.rng, self.phases[node], self.node_ids, self.next_id
        )
        self.next_id += len(bundles)
        return bundles
