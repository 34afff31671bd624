"""Training driver, evaluation episodes and their CSV records."""

from __future__ import annotations

import csv
import json
import logging
import math
import re
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..agent.a2c import NonFiniteLossError, RMSProp, Rollout, update
from ..agent.checkpoint import load_checkpoint, save_checkpoint
from ..agent.network import ActorCritic
from ..agent.policies import normalize_observation, random_policy, select_action, standard_policy
from ..env import N_ACTIONS, DtnEnv
from .config import RunConfig

log = logging.getLogger(__name__)

TRAIN_STREAM, EVAL_STREAM, SAMPLING_STREAM, RANDOM_POLICY_STREAM = range(4)

EPISODE_FIELDS = [
    "episode", "seed", "reward", "delivery_rate", "delivery_rate_bits", "cost_bits",
    "max_u_mean", "max_u_max", "generated", "delivered", "dropped_overflow",
    "dropped_ttl", "dropped_action", "action_dropped_bits",
    *(f"a{k}" for k in range(1, N_ACTIONS + 1)),
]
TRAIN_FIELDS = EPISODE_FIELDS + ["policy_loss", "value_loss", "entropy"]
EVAL_FIELDS = ["policy"] + EPISODE_FIELDS
TIMING_FIELDS = ["episode", "wall_seconds", "latency_median_ms", "latency_p99_ms"]
SUMMARY_METRICS = ["reward", "delivery_rate", "delivery_rate_bits", "cost_bits",
                   "max_u_mean", "max_u_max", "dropped_action"]


class HarnessError(RuntimeError):
    pass


def episode_seed(seed: int, stream: int, index: int) -> int:
    return int(np.random.SeedSequence([seed, stream, index]).generate_state(1, np.uint32)[0])


def make_env(cfg: RunConfig, plan=None) -> DtnEnv:
    return DtnEnv(cfg.constellation, cfg.traffic, cfg.env, cfg.visibility, plan=plan)


@dataclass
class EpisodeMetrics:
    episode: int
    seed: int
    reward: float
    delivery_rate: float
    delivery_rate_bits: float
    cost_bits: float
    max_u_mean: float
    max_u_max: float
    generated: int
    delivered: int
    dropped_overflow: int
    dropped_ttl: int
    dropped_action: int
    action_dropped_bits: float
    actions: list
    wall_seconds: float = 0.0
    latencies: list = field(default_factory=list)

    @classmethod
    def from_env(cls, env: DtnEnv, episode: int, seed: int, wall_seconds=0.0, latencies=()):
        totals = env.engine.totals
        drops = env.engine.drop_totals()
        t = env.tally
        gen = totals.generated
        return cls(
            episode=episode,
            seed=seed,
            reward=float(sum(t.rewards)),
            delivery_rate=totals.delivered / gen if gen else 0.0,
            delivery_rate_bits=totals.delivered_bits / totals.generated_bits if gen else 0.0,
            cost_bits=totals.cost_bits,
            max_u_mean=float(np.mean(t.max_utilizations)) if t.max_utilizations else 0.0,
            max_u_max=float(np.max(t.max_utilizations)) if t.max_utilizations else 0.0,
            generated=gen,
            delivered=totals.delivered,
            dropped_overflow=drops["overflow"][0],
            dropped_ttl=drops["ttl"][0],
            dropped_action=drops["action"][0],
            action_dropped_bits=t.action_dropped_bits,
            actions=list(t.actions),
            wall_seconds=wall_seconds,
            latencies=list(latencies),
        )

    def row(self) -> dict:
        out = {k: getattr(self, k) for k in EPISODE_FIELDS if not re.fullmatch(r"a\d", k)}
        for k, n in enumerate(self.actions, start=1):
            out[f"a{k}"] = n
        return out

    def timing_row(self) -> dict:
        lat = np.array(self.latencies) * 1e3
        return {
            "episode": self.episode,
            "wall_seconds": self.wall_seconds,
            "latency_median_ms": float(np.median(lat)) if len(lat) else 0.0,
            "latency_p99_ms": float(np.percentile(lat, 99)) if len(lat) else 0.0,
        }


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


class CsvLog:
    """Append-only CSV with a fixed header and repr-formatted floats."""

    def __init__(self, path, fields):
        self.path = Path(path)
        self.fields = fields
        self._fh = open(self.path, "w", newline="", encoding="ascii")
        self._writer = csv.writer(self._fh, lineterminator="\n")
        self._writer.writerow(fields)

    def write(self, row: dict):
        self._writer.writerow([_fmt(row[k]) for k in self.fields])
        self._fh.flush()

    def close(self):
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def read_csv(path) -> list[dict]:
    with open(path, newline="", encoding="ascii") as fh:
        rows = list(csv.DictReader(fh))
    out = []
    for r in rows:
        parsed = {}
        for k, v in r.items():
            try:
                parsed[k] = int(v)
            except ValueError:
                try:
                    parsed[k] = float(v)
                except ValueError:
                    parsed[k] = v
        out.append(parsed)
    return out


def _prepare_output(path: Path):
    try:
        path.mkdir(parents=True, exist_ok=True)
        probe = path / ".write-test"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise HarnessError(f"output directory {path} is not writable: {exc.strerror}") from None


# -- training -----------------------------------------------------------------


@dataclass
class TrainResult:
    net: ActorCritic
    optimizer: RMSProp
    checkpoints: list
    training_csv: Path
    episodes: list


def checkpoint_path(run_dir, episode: int) -> Path:
    return Path(run_dir) / "checkpoints" / f"episode_{episode:05d}.ckpt"


def train(cfg: RunConfig, progress=None) -> TrainResult:
    """Train from scratch; writes checkpoints, ``training.csv`` and ``timing.csv``."""
    out = cfg.output_dir
    _prepare_output(out)
    (out / "checkpoints").mkdir(exist_ok=True)
    (out / "config.effective").write_text(cfg.to_text(), encoding="ascii")

    tcfg = cfg.train
    envs = [make_env(cfg)]
    envs += [make_env(cfg, plan=envs[0].plan) for _ in range(tcfg.n_envs - 1)]
    net = ActorCritic(envs[0].observation_size, tuple(tcfg.hidden), N_ACTIONS, seed=cfg.seed)
    opt = RMSProp(net.params, tcfg.learning_rate, tcfg.rmsprop_decay, tcfg.rmsprop_epsilon)
    sampler = np.random.default_rng(np.random.SeedSequence([cfg.seed, SAMPLING_STREAM]))
    norm = dict(rate_max=cfg.env.rate_max, ttl=cfg.traffic.ttl)

    checkpoints, history = [], []
    train_log = CsvLog(out / "training.csv", TRAIN_FIELDS)
    timing_log = CsvLog(out / "timing.csv", TIMING_FIELDS)
    try:
        ep = 0
        while ep < tcfg.episodes:
            group = list(range(ep, min(ep + tcfg.n_envs, tcfg.episodes)))
            active = envs[: len(group)]
            seeds = [episode_seed(cfg.seed, TRAIN_STREAM, i) for i in group]
            started = time.perf_counter()
            xs = [normalize_observation(e.reset(s), **norm) for e, s in zip(active, seeds)]
            reports = []
            while not all(e.done for e in active):
                rollouts = []
                for k, env in enumerate(active):
                    if env.done:
                        continue
                    roll = Rollout()
                    for _ in range(tcfg.n_steps):
                        probs, value = net.forward(xs[k])
                        a = select_action(probs, "sample", sampler)
                        obs, r, done, _ = env.step(a)
                        roll.append(xs[k], a, r, done, value)
                        xs[k] = normalize_observation(obs, **norm)
                        if done:
                            break
                    roll.bootstrap_value = 0.0 if roll.dones[-1] else net.forward(xs[k])[1]
                    rollouts.append(roll)
                try:
                    reports.append(update(net, opt, rollouts, tcfg))
                except NonFiniteLossError as exc:
                    (out / "diagnostics.json").write_text(json.dumps(exc.diagnostics, indent=2))
                    raise HarnessError(f"{exc} (episode {ep + 1}); see diagnostics.json") from exc
            wall = (time.perf_counter() - started) / len(group)
            for i, env, s in zip(group, active, seeds):
                m = EpisodeMetrics.from_env(env, i + 1, s, wall)
                row = m.row()
                for key in ("policy_loss", "value_loss", "entropy"):
                    row[key] = float(np.mean([r[key] for r in reports]))
                train_log.write(row)
                timing_log.write(m.timing_row())
                history.append(m)
                if (i + 1) % cfg.run.checkpoint_interval == 0:
                    path = checkpoint_path(out, i + 1)
                    save_checkpoint(path, net, opt, i + 1)
                    checkpoints.append(path)
                if progress:
                    progress(m)
                log.info("episode %d reward %.3f delivery %.3f", i + 1, m.reward, m.delivery_rate)
            ep = group[-1] + 1
    finally:
        train_log.close()
        timing_log.close()
    final = out / "checkpoints" / "final.ckpt"
    save_checkpoint(final, net, opt, tcfg.episodes)
    checkpoints.append(final)
    return TrainResult(net, opt, checkpoints, out / "training.csv", history)


def select_checkpoint(run_dir, window: int = 20, index: int | None = None) -> Path:
    """Checkpoint with the best trailing-``window`` mean training reward.

    With ``index`` the periodic checkpoints are instead picked by position
    (negative indices count from the end).
    """
    run_dir = Path(run_dir)
    periodic = sorted((run_dir / "checkpoints").glob("episode_*.ckpt"))
    if not periodic:
        final = run_dir / "checkpoints" / "final.ckpt"
        if final.exists():
            return final
        raise HarnessError(f"no checkpoints under {run_dir}")
    if index is not None:
        return periodic[index]
    rewards = [r["reward"] for r in read_csv(run_dir / "training.csv")]
    best, best_score = None, -math.inf
    for path in periodic:
        e = int(path.stem.split("_")[1])
        tail = rewards[max(0, e - window) : e]
        score = float(np.mean(tail)) if tail else -math.inf
        if score > best_score:
            best, best_score = path, score
    return best


# -- evaluation ---------------------------------------------------------------


class A2CPolicy:
    def __init__(self, net: ActorCritic, rate_max=500.0, ttl=3600.0, mode="greedy", rng=None):
        self.net = net
        self.rate_max = rate_max
        self.ttl = ttl
        self.mode = mode
        self.rng = rng

    def __call__(self, obs) -> int:
        probs, _ = self.net.forward(normalize_observation(obs, self.rate_max, self.ttl))
        return select_action(probs, self.mode, self.rng)


def resolve_policy(spec: str, cfg: RunConfig):
    """Returns ``(label, policy_callable, initial_rate)`` for a policy spec."""
    if spec == "standard":
        return "standard", standard_policy, cfg.env.rate_max
    if spec == "random":
        rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, RANDOM_POLICY_STREAM]))
        return "random", lambda obs: random_policy(rng), None
    if spec.startswith("checkpoint:"):
        path = Path(spec.split(":", 1)[1])
        if path.is_dir():
            path = select_checkpoint(path, cfg.run.selection_window)
        net, _, _ = load_checkpoint(path)
        return "a2c", A2CPolicy(net, cfg.env.rate_max, cfg.traffic.ttl), None
    raise HarnessError(f"unknown policy {spec!r}; use checkpoint:PATH, standard or random")


def run_episode(env: DtnEnv, policy, seed: int, index: int, initial_rate=None) -> EpisodeMetrics:
    started = time.perf_counter()
    obs = env.reset(seed, initial_rate=initial_rate)
    latencies = []
    done = False
    while not done:
        t0 = time.perf_counter()
        a = policy(obs)
        latencies.append(time.perf_counter() - t0)
        obs, _, done, _ = env.step(a)
    return EpisodeMetrics.from_env(env, index, seed, time.perf_counter() - started, latencies)


@dataclass
class EvaluationResult:
    label: str
    episodes: list
    summary: dict
    csv_path: Path | None = None


def summarize(rows: list[dict]) -> dict:
    out = {}
    for k in SUMMARY_METRICS:
        vals = np.array([float(r[k]) for r in rows])
        out[k] = (float(vals.mean()), float(vals.std()))
    return out


def evaluate(policy: str, cfg: RunConfig, episodes: int | None = None, out_dir=None,
             env: DtnEnv | None = None, progress=None) -> EvaluationResult:
    """Run fresh-seeded episodes and write ``evaluation_<label>.csv``."""
    episodes = cfg.run.evaluation_episodes if episodes is None else episodes
    if episodes < 1:
        raise HarnessError("evaluation needs at least one episode")
    label, fn, initial_rate = resolve_policy(policy, cfg)
    env = env or make_env(cfg)
    results = []
    for i in range(episodes):
        m = run_episode(env, fn, episode_seed(cfg.seed, EVAL_STREAM, i), i + 1, initial_rate)
        results.append(m)
        if progress:
            progress(m)
    rows = [dict(policy=label, **m.row()) for m in results]
    summary = summarize(rows)
    csv_path = None
    if out_dir is not None:
        out_dir = Path(out_dir)
        _prepare_output(out_dir)
        csv_path = out_dir / f"evaluation_{label}.csv"
        with CsvLog(csv_path, EVAL_FIELDS) as w:
            for r in rows:
                w.write(r)
        with CsvLog(out_dir / f"evaluation_{label}_summary.csv", ["metric", "mean", "std"]) as w:
            for k, (mu, sd) in summary.items():
                w.write({"metric": k, "mean": mu, "std": sd})
        with CsvLog(out_dir / f"evaluation_{label}_timing.csv", TIMING_FIELDS) as w:
            for m in results:
                w.write(m.timing_row())
    return EvaluationResult(label, results, summary, csv_path)
