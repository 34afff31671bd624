"""Shared-trunk actor-critic MLP in numpy with hand-written backprop."""

from __future__ import annotations

import numpy as np

from ..errors import ContractViolation

PARAM_ORDER = ("W1", "b1", "W2", "b2", "Wpi", "bpi", "Wv", "bv")


def orthogonal(shape, gain, rng):
    rows, cols = shape
    a = rng.standard_normal((max(rows, cols), min(rows, cols)))
    q, r = np.linalg.qr(a)
    q *= np.sign(np.diag(r))
    if rows < cols:
        q = q.T
    return gain * q[:rows, :cols]


class ActorCritic:
    """``obs -> tanh(64) -> tanh(64) -> {6 logits, 1 value}``.

    Parameters live in ``self.params`` keyed by :data:`PARAM_ORDER`; weight
    matrices are ``(out, in)``.
    """

    def __init__(self, n_inputs=50, hidden=(64, 64), n_actions=6, seed=0,
                 policy_gain=0.01, value_gain=1.0):
        self.dims = (n_inputs, *hidden, n_actions)
        self.seed = seed
        rng = np.random.default_rng(seed)
        h1, h2 = hidden
        trunk_gain = np.sqrt(2.0)
        self.params = {
            "W1": orthogonal((h1, n_inputs), trunk_gain, rng),
            "b1": np.zeros(h1),
            "W2": orthogonal((h2, h1), trunk_gain, rng),
            "b2": np.zeros(h2),
            "Wpi": orthogonal((n_actions, h2), policy_gain, rng),
            "bpi": np.zeros(n_actions),
            "Wv": orthogonal((1, h2), value_gain, rng),
            "bv": np.zeros(1),
        }

    @property
    def n_inputs(self):
        return self.dims[0]

    @property
    def n_actions(self):
        return self.dims[-1]

    def copy(self) -> "ActorCritic":
        clone = object.__new__(ActorCritic)
        clone.dims = self.dims
        clone.seed = self.seed
        clone.params = {k: v.copy() for k, v in self.params.items()}
        return clone

    def _trunk(self, x):
        p = self.params
        h1 = np.tanh(x @ p["W1"].T + p["b1"])
        h2 = np.tanh(h1 @ p["W2"].T + p["b2"])
        return h1, h2

    def forward(self, obs):
        """Action probabilities and state value for one normalized observation."""
        x = np.asarray(obs, dtype=float)
        if x.shape != (self.n_inputs,):
            raise ContractViolation(f"expected observation of shape ({self.n_inputs},), got {x.shape}")
        if not np.all(np.isfinite(x)):
            raise ContractViolation("observation contains non-finite values")
        probs, _, values = self.forward_batch(x[None, :])
        return probs[0], float(values[0])

    def forward_batch(self, x):
        _, h2 = self._trunk(x)
        p = self.params
        logits = h2 @ p["Wpi"].T + p["bpi"]
        logp = log_softmax(logits)
        values = (h2 @ p["Wv"].T + p["bv"])[:, 0]
        return np.exp(logp), logp, values

    def loss_and_grads(self, obs, actions, returns, advantages,
                       value_coef=0.5, entropy_coef=0.01):
        """A2C loss on a batch and its gradient for every parameter.

        ``actions`` are 0-based indices; ``advantages`` are constants.
        """
        x = np.asarray(obs, dtype=float)
        a = np.asarray(actions, dtype=int)
        R = np.asarray(returns, dtype=float)
        A = np.asarray(advantages, dtype=float)
        B = len(a)
        p = self.params

        h1, h2 = self._trunk(x)
        logits = h2 @ p["Wpi"].T + p["bpi"]
        logp = log_softmax(logits)
        probs = np.exp(logp)
        v = (h2 @ p["Wv"].T + p["bv"])[:, 0]
        entropy = -np.sum(probs * logp, axis=1)

        rows = np.arange(B)
        policy_loss = float(np.mean(-logp[rows, a] * A))
        value_loss = float(np.mean((R - v) ** 2))
        mean_entropy = float(np.mean(entropy))
        total = policy_loss + value_coef * value_loss - entropy_coef * mean_entropy

        onehot = np.zeros_like(probs)
        onehot[rows, a] = 1.0
        d_logits = (probs - onehot) * A[:, None] / B
        d_logits += entropy_coef * probs * (logp + entropy[:, None]) / B
        d_v = value_coef * 2.0 * (v - R) / B

        d_h2 = d_logits @ p["Wpi"] + d_v[:, None] @ p["Wv"]
        d_z2 = d_h2 * (1.0 - h2**2)
        d_h1 = d_z2 @ p["W2"]
        d_z1 = d_h1 * (1.0 - h1**2)
        grads = {
            "W1": d_z1.T @ x,
            "b1": d_z1.sum(axis=0),
            "W2": d_z2.T @ h1,
            "b2": d_z2.sum(axis=0),
            "Wpi": d_logits.T @ h2,
            "bpi": d_logits.sum(axis=0),
            "Wv": d_v[None, :] @ h2,
            "bv": np.array([d_v.sum()]),
        }
        report = {
            "loss": total,
            "policy_loss": policy_loss,
            "value_loss": value_loss,
            "entropy": mean_entropy,
        }
        return report, grads


def log_softmax(logits):
    z = logits - logits.max(axis=-1, keepdims=True)
    return z - np.log(np.exp(z).sum(axis=-1, keepdims=True))


def entropy(probs) -> float:
    probs = np.asarray(probs, dtype=float)
    nz = probs[probs > 0]
    return float(-np.sum(nz * np.log(nz)))
