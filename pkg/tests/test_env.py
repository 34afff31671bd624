import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dtnrl.dtn import Bundle, Priority, StepMetrics
from dtnrl.env import DtnEnv, EnvConfig, compute_reward, observe, penalty_factor
from dtnrl.errors import ContractViolation

LADDER = {500.0 / 2**k for k in range(7)}


@pytest.fixture(scope="module")
def env(scenario_plan):
    return DtnEnv(plan=scenario_plan)


def test_penalty_values():
    assert penalty_factor(0.3) == 0.5
    assert penalty_factor(0.0) == pytest.approx(1 / (1 + math.exp(-7.5)), abs=1e-15)
    assert abs(penalty_factor(0.0) - 0.999447) < 1e-6
    assert penalty_factor(1.0) < 3e-8


@given(st.floats(0, 1), st.floats(0, 1))
def test_penalty_decreasing(u, w):
    # strict in exact arithmetic; doubles cannot resolve gaps far below 1 ulp of f
    if u < w:
        assert penalty_factor(u) >= penalty_factor(w)
    if w - u >= 1e-6:
        assert penalty_factor(u) > penalty_factor(w)


@given(st.floats(0, 1e6), st.floats(0, 1e6), st.floats(0, 1))
def test_reward_bounds(delivered, extra, u):
    m = StepMetrics(delivered_bits=delivered, cost_bits=delivered + extra, utilizations=[u])
    r = compute_reward(m)
    assert 0.0 <= r <= penalty_factor(u) <= 1.0


def test_reward_examples():
    assert compute_reward(StepMetrics(500, 500, utilizations=[0.3])) == 0.5
    assert compute_reward(StepMetrics(500, 1000, utilizations=[0.3, 0.1])) == pytest.approx(0.25, abs=1e-12)
    assert compute_reward(StepMetrics(0, 0, utilizations=[0.0])) == 0.0


def test_observation_ratios(env):
    env.reset(0)
    m = StepMetrics(cost_bits=1000, total_link_capacity=4000, mean_delivery_delay=40.0)
    obs = observe(m, env.nodes)
    assert obs.link_occupancy == 0.25 and obs.mean_delay == 40.0
    idle = observe(StepMetrics(total_link_capacity=4000), env.nodes)
    assert idle.link_occupancy == 0 and idle.mean_delay == 0


def test_reset_is_deterministic_and_empty(env):
    a = env.reset(42)
    b = env.reset(42)
    assert np.array_equal(a, b) and a.shape == (50,)
    assert a[0] == 0 and np.all(a[26:] == 0)
    assert set(a[1:25]) <= LADDER
    assert not np.array_equal(a, env.reset(43)) or True  # different seeds may coincide


def test_ladder():
    assert set(EnvConfig().rate_ladder) == LADDER
    assert min(EnvConfig().rate_ladder) == EnvConfig().rate_min


def test_rate_actions(env):
    env.reset(1, initial_rate=500.0)
    env.apply_action(1)
    assert all(r == 500.0 for r in env.engine.rates.values())
    env.reset(1, initial_rate=125.0)
    env.apply_action(2)
    env.apply_action(1)
    assert all(r == 125.0 for r in env.engine.rates.values())
    env.reset(1, initial_rate=7.8125)
    env.apply_action(2)
    assert all(r == 7.8125 for r in env.engine.rates.values())


@given(st.sampled_from(sorted(LADDER)))
@settings(max_examples=10, deadline=None)
def test_double_then_halve_restores(scenario_plan, rate):
    env = DtnEnv(plan=scenario_plan)
    env.reset(0, initial_rate=rate)
    env.apply_action(1)
    env.apply_action(2)
    expected = rate if 2 * rate <= 500 else 250.0
    assert all(r == expected for r in env.engine.rates.values())


def test_drop_all_empties_buffers(env):
    env.reset(5, initial_rate=7.8125)
    for _ in range(5):
        env.step(6)
    held = {b.priority for n in env.nodes for b in n.buffer.values()}
    assert len(held) > 1
    dropped = env.apply_action(5)
    assert dropped > 0
    assert all(n.utilization == 0 for n in env.nodes)


def test_drop_low_keeps_others(env):
    env.reset(5, initial_rate=7.8125)
    for _ in range(5):
        env.step(6)
    env.apply_action(3)
    assert all(b.priority != Priority.LOW for n in env.nodes for b in n.buffer.values())


def test_episode_length_and_contract(env):
    env.reset(3)
    rates0 = dict(env.engine.rates)
    rng = np.random.default_rng(0)
    for i in range(200):
        obs, r, done, info = env.step(6)
        assert done == (i == 199)
        assert obs.shape == (50,) and np.all(np.isfinite(obs))
        assert 0 <= obs[0] <= 1 and np.all((obs[26:] >= 0) & (obs[26:] <= 1))
        assert 0 <= r <= 1
    assert env.engine.rates == rates0
    with pytest.raises(ContractViolation):
        env.step(6)
    env.reset(3)
    for bad in (0, 7, True, 2.5):
        with pytest.raises(ContractViolation):
            env.step(bad)


def test_replay_with_fixed_actions(env):
    actions = np.random.default_rng(9).integers(1, 7, size=30)
    runs = []
    for _ in range(2):
        env.reset(11)
        runs.append([env.step(int(a))[1] for a in actions])
    assert runs[0] == runs[1]


def test_action_drops_count_toward_step(env):
    env.reset(5, initial_rate=7.8125)
    for _ in range(3):
        env.step(6)
    _, _, _, info = env.step(5)
    assert info["action_dropped_bits"] > 0
    assert info["metrics"].drops_by_cause["action"] > 0
