# %% [markdown]
# # The buffer-management environment
#
# Every 40 s the controller picks one of six global actions. The reward is
# the delivered/cost ratio discounted by a logistic penalty on the fullest
# buffer.

# %%
import numpy as np

from dtnrl.env import ACTION_NAMES, DtnEnv, penalty_factor

for u in (0.0, 0.2, 0.3, 0.4, 1.0):
    print(f"f({u:.1f}) = {penalty_factor(u):.6g}")

# %%
env = DtnEnv()
obs = env.reset(seed=1)
print("observation length", obs.shape[0])
print("initial rates", obs[1:25])

# %% [markdown]
# Compare always-no-op against a random controller on the same seed.

# %%
for label, chooser in [("no-op", lambda rng: 6), ("random", lambda rng: int(rng.integers(1, 7)))]:
    rng = np.random.default_rng(0)
    env.reset(seed=1, initial_rate=500.0 if label == "no-op" else None)
    total, done = 0.0, False
    while not done:
        _, r, done, info = env.step(chooser(rng))
        total += r
    print(f"{label:7s} episode reward {total:7.2f}, worst buffer {max(env.tally.max_utilizations):.3f}")

# %%
print(ACTION_NAMES)
