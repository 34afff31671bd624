# %% [markdown]
# # Learning-rate sensitivity (informational)
#
# With a learning rate of 1e-7, RMSProp moves each weight by roughly 1e-7
# per update, so 200 episodes leave the policy almost where it started.
# This script repeats the desk-scale run at 7e-4, a common A2C default, to
# show what the training loop does when it is allowed to move. It is not
# part of the acceptance suite.

# %%
import numpy as np

from dtnrl.harness import evaluate, parse_config, read_csv, train

EPISODES = 200

for lr in (1e-7, 7e-4):
    cfg = parse_config(f"""
run.output_dir = runs/lr_{lr:g}
train.episodes = {EPISODES}
train.learning_rate = {lr!r}
""")
    train(cfg)
    rewards = [r["reward"] for r in read_csv(f"runs/lr_{lr:g}/training.csv")]
    res = evaluate(f"checkpoint:runs/lr_{lr:g}", cfg, episodes=30, out_dir=f"runs/lr_{lr:g}")
    print(f"lr={lr:g}: lead20 {np.mean(rewards[:20]):.2f}  trail20 {np.mean(rewards[-20:]):.2f}  "
          f"greedy eval {res.summary['reward'][0]:.2f}")
