import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dtnrl.traffic import TrafficConfig, TrafficGenerator, emission_times, generate_for_window

NODES = list(range(24))


def _enumerate(phase, ia, t_a, t_b):
    return [phase + k * ia for k in range(0, 100000) if t_a <= phase + k * ia < t_b]


@settings(max_examples=300, deadline=None)
@given(st.floats(0, 9, exclude_max=True), st.floats(0, 500), st.floats(0.5, 100))
def test_emission_times_match_enumeration(phase, t_a, width):
    assert emission_times(phase, 9.0, t_a, t_a + width) == _enumerate(phase, 9.0, t_a, t_a + width)


@pytest.mark.parametrize("phase", [0.0, 0.5, 3.9, 4.5, 8.9])
def test_forty_second_window_count(phase):
    got = generate_for_window(0, (0.0, 40.0), TrafficConfig(), np.random.default_rng(0), phase, NODES)
    # arithmetic oracle away from the half-open boundary
    assert len(got) == math.floor((40 - phase % 9) / 9) + 1
    assert len(got) in (4, 5)


def test_short_window_outside_phase_is_empty():
    got = generate_for_window(0, (0.0, 5.0), TrafficConfig(), np.random.default_rng(0), 6.0, NODES)
    assert got == []


def test_bundle_fields():
    cfg = TrafficConfig()
    got = generate_for_window(3, (0.0, 400.0), cfg, np.random.default_rng(1), 2.0, NODES, first_id=100)
    assert [b.id for b in got] == list(range(100, 100 + len(got)))
    for b in got:
        assert b.source == 3 and b.destination != 3 and b.destination in NODES
        assert b.size == 500.0 and b.ttl == 3600.0
        assert (b.creation_time - 2.0) % 9.0 == pytest.approx(0.0, abs=1e-9)


def test_determinism():
    a = TrafficGenerator(NODES, TrafficConfig(), np.random.default_rng(5))
    b = TrafficGenerator(NODES, TrafficConfig(), np.random.default_rng(5))
    ka = [(x.id, x.destination, x.priority, x.creation_time) for x in a.generate_for_window(4, 0, 400)]
    kb = [(x.id, x.destination, x.priority, x.creation_time) for x in b.generate_for_window(4, 0, 400)]
    assert ka == kb


def test_episode_rate_law():
    gen = TrafficGenerator(NODES, TrafficConfig(), np.random.default_rng(9))
    counts = {n: 0 for n in NODES}
    for step in range(200):
        for n in NODES:
            counts[n] += len(gen.generate_for_window(n, step * 40.0, (step + 1) * 40.0))
    assert set(counts.values()) <= {888, 889}


def test_priority_balance_and_no_self_traffic():
    gen = TrafficGenerator(NODES, TrafficConfig(), np.random.default_rng(11))
    bundles = []
    for n in NODES:
        bundles += gen.generate_for_window(n, 0.0, 4000.0)
    n = len(bundles)
    assert n >= 10_000
    sigma = math.sqrt(n * (1 / 3) * (2 / 3))
    for p in range(3):
        assert abs(sum(b.priority == p for b in bundles) - n / 3) <= 3 * sigma
    assert all(b.source != b.destination for b in bundles)


def test_config_validation():
    with pytest.raises(ValueError):
        TrafficConfig(inter_arrival=0)
    with pytest.raises(ValueError):
        TrafficConfig(priorities=(0.5, 0.5, 0.5))
    with pytest.raises(ValueError):
        TrafficConfig(destination_policy="nearest")
