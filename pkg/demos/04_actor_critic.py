# %% [markdown]
# # Actor-critic network, returns and a gradient check
#
# The network is a 64x64 tanh trunk with a softmax policy head and a scalar
# value head. Backprop is written by hand, so we compare it against finite
# differences.

# %%
import numpy as np

from dtnrl.agent import ActorCritic, RMSProp, Rollout, TrainConfig, compute_returns, update

net = ActorCritic(n_inputs=6, hidden=(8, 8), seed=0, policy_gain=1.0)
rng = np.random.default_rng(0)
roll = Rollout()
for _ in range(5):
    roll.append(rng.standard_normal(6), rng.integers(1, 7), rng.standard_normal(), False, 0.0)
roll.bootstrap_value = 0.5
R, A = compute_returns(roll, 0.99)
print("returns", np.round(R, 4))

# %%
batch = (np.stack(roll.observations), np.array(roll.actions) - 1, R, A)
_, grads = net.loss_and_grads(*batch)
h, W = 1e-5, net.params["W1"]
num = np.zeros_like(W)
for idx in np.ndindex(W.shape):
    old = W[idx]
    W[idx] = old + h
    up = net.loss_and_grads(*batch)[0]["loss"]
    W[idx] = old - h
    down = net.loss_and_grads(*batch)[0]["loss"]
    W[idx] = old
    num[idx] = (up - down) / (2 * h)
err = np.linalg.norm(num - grads["W1"]) / (np.linalg.norm(num) + np.linalg.norm(grads["W1"]))
print(f"W1 relative error {err:.2e}")

# %% [markdown]
# One optimizer step moves the policy towards the advantage-weighted actions.

# %%
cfg = TrainConfig(learning_rate=1e-2)
opt = RMSProp(net.params, cfg.learning_rate)
before = net.forward(roll.observations[0])[0]
print(update(net, opt, roll, cfg))
after = net.forward(roll.observations[0])[0]
print("probs before", np.round(before, 3))
print("probs after ", np.round(after, 3))
