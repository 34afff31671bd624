"""Centralised buffer-management environment over the DTN engine.

Observations are reported in physical units: a 50-vector
``[O_C, R_1..R_24, D_A, U_1..U_24]`` for the default 24-node scenario.
Actions are integers 1..6: double rates, halve rates, drop low, drop low
and medium, drop everything, do nothing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dtn.bundle import Priority
from .dtn.engine import Engine, StepMetrics
from .errors import ContractViolation
from .orbits import ConstellationSpec, ContactPlan, generate_contact_plan
from .traffic import TrafficConfig, TrafficGenerator

N_ACTIONS = 6
ACTION_NAMES = {
    1: "double-rate",
    2: "halve-rate",
    3: "drop-low",
    4: "drop-low-medium",
    5: "drop-all",
    6: "no-op",
}
_DROPS = {
    3: {Priority.LOW},
    4: {Priority.LOW, Priority.MEDIUM},
    5: {Priority.LOW, Priority.MEDIUM, Priority.HIGH},
}


@dataclass(frozen=True)
class EnvConfig:
    steps_per_episode: int = 200
    step_duration: float = 40.0
    rate_max: float = 500.0
    rate_min: float = 500.0 / 2**6
    penalty_a: float = 25.0
    penalty_b: float = 0.3
    buffer_capacity: float = 80_000.0

    def __post_init__(self):
        for name in ("steps_per_episode", "step_duration", "rate_max", "rate_min",
                     "penalty_a", "buffer_capacity"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not 0 < self.penalty_b < 1:
            raise ValueError("penalty_b must lie in (0, 1)")
        if self.rate_min > self.rate_max:
            raise ValueError("rate_min exceeds rate_max")

    @property
    def rate_ladder(self) -> tuple[float, ...]:
        """Rates reachable from ``rate_max`` by halving down to ``rate_min``."""
        ladder = [self.rate_max]
        while ladder[-1] / 2 >= self.rate_min:
            ladder.append(ladder[-1] / 2)
        return tuple(ladder)

    @property
    def horizon(self) -> float:
        return self.steps_per_episode * self.step_duration


@dataclass(frozen=True)
class VisibilityConfig:
    dt: float = 10.0
    max_range: float = 6000.0
    grazing_altitude: float = 100.0


@dataclass
class Observation:
    link_occupancy: float
    rates: np.ndarray
    mean_delay: float
    utilizations: np.ndarray

    @property
    def vector(self) -> np.ndarray:
        return np.concatenate(
            [[self.link_occupancy], self.rates, [self.mean_delay], self.utilizations]
        )

    def __len__(self):
        return 2 + len(self.rates) + len(self.utilizations)


def penalty_factor(max_utilization: float, a: float = 25.0, b: float = 0.3) -> float:
    """Logistic discount on the worst buffer: 1/2 at ``b``, falling with ``a``."""
    return 1.0 / (1.0 + math.exp(-a * (b - max_utilization)))


def compute_reward(metrics: StepMetrics, utilizations=None, a: float = 25.0, b: float = 0.3) -> float:
    """``f(max U) * delivered_bits / cost_bits``; zero for an idle step."""
    if utilizations is None:
        utilizations = metrics.utilizations
    if metrics.cost_bits <= 0:
        return 0.0
    max_u = max(utilizations) if len(utilizations) else 0.0
    return penalty_factor(max_u, a, b) * (metrics.delivered_bits / metrics.cost_bits)


def observe(metrics: StepMetrics | None, nodes, buffer_capacity: float | None = None) -> Observation:
    """Assemble the state from the step just completed and the node states.

    ``nodes`` is a sequence of NodeState; utilizations are read from their
    buffers (``buffer_capacity`` overrides each node's own capacity).
    """
    rates = np.array([n.radio_rate for n in nodes], dtype=float)
    if buffer_capacity is None:
        utils = np.array([n.utilization for n in nodes], dtype=float)
    else:
        utils = np.array([n.buffered_bits / buffer_capacity for n in nodes], dtype=float)
    if metrics is None:
        return Observation(0.0, rates, 0.0, utils)
    cap = metrics.total_link_capacity
    occupancy = metrics.cost_bits / cap if cap > 0 else 0.0
    return Observation(float(occupancy), rates, float(metrics.mean_delivery_delay), utils)


@dataclass
class EpisodeTally:
    rewards: list = field(default_factory=list)
    max_utilizations: list = field(default_factory=list)
    actions: list = field(default_factory=lambda: [0] * N_ACTIONS)
    action_dropped_bits: float = 0.0


class DtnEnv:
    """Episode lifecycle around one :class:`Engine`.

    The contact plan is computed once; every episode starts at t = 0 on the
    same geometry with freshly drawn rates and traffic phases.
    """

    n_actions = N_ACTIONS

    def __init__(
        self,
        constellation: ConstellationSpec | None = None,
        traffic: TrafficConfig | None = None,
        config: EnvConfig | None = None,
        visibility: VisibilityConfig | None = None,
        plan: ContactPlan | None = None,
    ):
        self.constellation = constellation or ConstellationSpec()
        self.traffic_config = traffic or TrafficConfig()
        self.config = config or EnvConfig()
        self.visibility = visibility or VisibilityConfig()
        if plan is None:
            v = self.visibility
            plan = generate_contact_plan(
                self.constellation, 0.0, self.config.horizon, v.dt, v.max_range,
                v.grazing_altitude, self.config.rate_max,
            )
        self.plan = plan
        self.node_ids = list(range(self.constellation.num_nodes))
        self.engine: Engine | None = None
        self.steps = 0
        self.done = True
        self.tally = EpisodeTally()
        self.last_observation: Observation | None = None

    @property
    def observation_size(self) -> int:
        return 2 * len(self.node_ids) + 2

    @property
    def nodes(self):
        return [self.engine.nodes[n] for n in self.node_ids]

    def reset(self, seed=None, initial_rate: float | None = None) -> np.ndarray:
        """Start a new episode; ``initial_rate`` pins every node's rate."""
        rate_seq, traffic_seq = np.random.SeedSequence(seed).spawn(2)
        ladder = self.config.rate_ladder
        if initial_rate is None:
            picks = np.random.default_rng(rate_seq).integers(0, len(ladder), size=len(self.node_ids))
            rates = {n: ladder[k] for n, k in zip(self.node_ids, picks)}
        else:
            rates = {n: float(initial_rate) for n in self.node_ids}
        traffic = TrafficGenerator(
            self.node_ids, self.traffic_config, np.random.default_rng(traffic_seq)
        )
        self.engine = Engine(
            self.plan, self.node_ids, self.config.buffer_capacity, rates, traffic, start_time=0.0
        )
        self.steps = 0
        self.done = False
        self.tally = EpisodeTally()
        self.last_observation = observe(None, self.nodes)
        return self.last_observation.vector

    def apply_action(self, action: int) -> float:
        """Apply a global action; returns the bits dropped by it."""
        if self.done:
            raise ContractViolation("episode is not active; call reset()")
        if isinstance(action, bool) or action not in ACTION_NAMES:
            raise ContractViolation(f"invalid action {action!r}; expected an integer in 1..6")
        cfg = self.config
        eng = self.engine
        if action == 1:
            for n in self.node_ids:
                eng.set_rate(n, min(2.0 * eng.rates[n], cfg.rate_max))
        elif action == 2:
            for n in self.node_ids:
                eng.set_rate(n, max(eng.rates[n] / 2.0, cfg.rate_min))
        elif action in _DROPS:
            return eng.drop_priorities(_DROPS[action])
        return 0.0

    def step(self, action: int):
        if self.done:
            raise ContractViolation("step() called on a finished episode; call reset()")
        dropped = self.apply_action(action)
        metrics = self.engine.step_simulation(self.config.step_duration)
        obs = observe(metrics, self.nodes)
        reward = compute_reward(metrics, obs.utilizations, self.config.penalty_a, self.config.penalty_b)
        self.steps += 1
        self.done = self.steps >= self.config.steps_per_episode
        self.last_observation = obs
        t = self.tally
        t.rewards.append(reward)
        t.max_utilizations.append(metrics.max_utilization)
        t.actions[action - 1] += 1
        t.action_dropped_bits += dropped
        info = {"metrics": metrics, "action_dropped_bits": dropped, "step": self.steps}
        return obs.vector, reward, self.done, info
