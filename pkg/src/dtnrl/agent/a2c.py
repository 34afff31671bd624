"""Synchronous advantage actor-critic: rollouts, n-step returns, updates."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .network import PARAM_ORDER, ActorCritic


class NonFiniteLossError(FloatingPointError):
    def __init__(self, message, diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics


@dataclass(frozen=True)
class TrainConfig:
    gamma: float = 0.99
    learning_rate: float = 1e-7
    n_steps: int = 5
    entropy_coefficient: float = 0.01
    value_loss_coefficient: float = 0.5
    gradient_clip_norm: float = 0.5
    rmsprop_decay: float = 0.99
    rmsprop_epsilon: float = 1e-5
    episodes: int = 1000
    n_envs: int = 1
    hidden: tuple = (64, 64)

    def __post_init__(self):
        if not 0 < self.gamma <= 1:
            raise ValueError("gamma must lie in (0, 1]")
        for name in ("learning_rate", "entropy_coefficient", "value_loss_coefficient",
                     "gradient_clip_norm"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if self.n_steps < 1 or self.n_envs < 1 or self.episodes < 0:
            raise ValueError("n_steps and n_envs must be >= 1, episodes >= 0")


@dataclass
class Rollout:
    """Up to ``n_steps`` consecutive transitions of one environment."""

    observations: list = field(default_factory=list)
    actions: list = field(default_factory=list)  # 1-based action ids
    rewards: list = field(default_factory=list)
    dones: list = field(default_factory=list)
    values: list = field(default_factory=list)
    bootstrap_value: float = 0.0

    def __len__(self):
        return len(self.rewards)

    def append(self, obs, action, reward, done, value):
        self.observations.append(np.asarray(obs, dtype=float))
        self.actions.append(int(action))
        self.rewards.append(float(reward))
        self.dones.append(bool(done))
        self.values.append(float(value))


def compute_returns(rollout: Rollout, gamma: float):
    """Discounted n-step returns and advantages ``R_t - V(s_t)``.

    The recursion is seeded with the bootstrap value and restarts after any
    terminal transition.
    """
    n = len(rollout)
    if n == 0:
        raise ValueError("empty rollout")
    returns = np.empty(n)
    running = rollout.bootstrap_value
    for t in range(n - 1, -1, -1):
        if rollout.dones[t]:
            running = 0.0
        running = rollout.rewards[t] + gamma * running
        returns[t] = running
    advantages = returns - np.asarray(rollout.values, dtype=float)
    return returns, advantages


class RMSProp:
    """``ms <- d*ms + (1-d)*g^2;  theta <- theta - lr*g/sqrt(ms + eps)``."""

    def __init__(self, params: dict, learning_rate=1e-7, decay=0.99, epsilon=1e-5):
        self.learning_rate = learning_rate
        self.decay = decay
        self.epsilon = epsilon
        self.mean_square = {k: np.zeros_like(v) for k, v in params.items()}

    def apply(self, params: dict, grads: dict) -> None:
        d = self.decay
        for k in PARAM_ORDER:
            g = grads[k]
            ms = self.mean_square[k]
            ms *= d
            ms += (1.0 - d) * g * g
            params[k] -= self.learning_rate * g / np.sqrt(ms + self.epsilon)


def clip_by_global_norm(grads: dict, max_norm: float):
    norm = float(np.sqrt(sum(float(np.sum(g * g)) for g in grads.values())))
    if max_norm > 0 and norm > max_norm:
        scale = max_norm / norm
        grads = {k: g * scale for k, g in grads.items()}
    return grads, norm


def update(net: ActorCritic, optimizer: RMSProp, rollouts, cfg: TrainConfig) -> dict:
    """One gradient step on the concatenation of ``rollouts`` (in place)."""
    if isinstance(rollouts, Rollout):
        rollouts = [rollouts]
    obs, acts, rets, advs = [], [], [], []
    for r in rollouts:
        R, A = compute_returns(r, cfg.gamma)
        obs.extend(r.observations)
        acts.extend(a - 1 for a in r.actions)
        rets.append(R)
        advs.append(A)
    report, grads = net.loss_and_grads(
        np.stack(obs), np.array(acts), np.concatenate(rets), np.concatenate(advs),
        cfg.value_loss_coefficient, cfg.entropy_coefficient,
    )
    if not np.isfinite(report["loss"]) or not all(np.all(np.isfinite(g)) for g in grads.values()):
        raise NonFiniteLossError(
            f"non-finite loss {report['loss']!r}; update aborted",
            {"report": report, "returns": np.concatenate(rets).tolist(),
             "advantages": np.concatenate(advs).tolist(),
             "grad_norms": {k: float(np.linalg.norm(g)) for k, g in grads.items()}},
        )
    grads, norm = clip_by_global_norm(grads, cfg.gradient_clip_norm)
    optimizer.apply(net.params, grads)
    report["grad_norm"] = norm
    return report
