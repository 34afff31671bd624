# %% [markdown]
# # Training, evaluation and comparison
#
# A short run through the harness: train from a config, evaluate the
# selected checkpoint next to the two baselines, then compare. The same
# steps are available from the ``dtnrl`` command line.

# %%
from dtnrl.harness import compare, evaluate, parse_config, train

cfg = parse_config("""
run.seed = 0
run.output_dir = runs/demo
run.checkpoint_interval = 5
train.episodes = 10
""")
result = train(cfg, progress=lambda m: print(f"episode {m.episode:3d} reward {m.reward:7.2f}"))

# %%
csvs = []
for policy in ("checkpoint:runs/demo", "random", "standard"):
    res = evaluate(policy, cfg, episodes=5, out_dir="runs/demo")
    csvs.append(res.csv_path)
    print(f"{res.label:8s} reward {res.summary['reward'][0]:7.2f}")

# %%
print(compare(csvs).table())
