import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dtnrl.orbits import (
    EARTH_RADIUS_KM,
    MU_EARTH,
    ConstellationSpec,
    Contact,
    ContactPlan,
    InvalidSpecError,
    OrbitalElements,
    build_walker_delta,
    contacts_from_positions,
    generate_contact_plan,
    line_of_sight,
    parse_contact_plan,
    propagate,
    read_contact_plan,
    write_contact_plan,
)

A_SCENARIO = 6378.137 + 710.0


def test_walker_delta_default_constellation():
    els = build_walker_delta(ConstellationSpec(3, 8, 710.0, 98.5, 1))
    assert len(els) == 24
    assert all(e.semi_major_axis == pytest.approx(7088.137, abs=1e-9) for e in els)
    assert sorted({e.raan for e in els}) == [0.0, 120.0, 240.0]
    # in-plane spacing 45 deg; plane p shifted by p * 360/24
    plane1 = [e.argument_of_latitude_at_epoch for e in els[8:16]]
    assert plane1 == pytest.approx([15.0 + 45.0 * k for k in range(8)])


def test_walker_delta_degenerate():
    (e,) = build_walker_delta(ConstellationSpec(1, 1, 710.0, 98.5, 0))
    assert e.raan == 0.0 and e.argument_of_latitude_at_epoch == 0.0


@pytest.mark.parametrize("planes,sats", [(0, 8), (3, 0)])
def test_walker_delta_rejects_empty(planes, sats):
    with pytest.raises(InvalidSpecError):
        build_walker_delta(ConstellationSpec(planes, sats))


def test_elements_invariants():
    with pytest.raises(InvalidSpecError):
        OrbitalElements(6000.0, 98.5, 0.0, 0.0)
    e = OrbitalElements(A_SCENARIO, 98.5, 370.0, -45.0)
    assert e.raan == 10.0 and e.argument_of_latitude_at_epoch == 315.0


def test_period_value():
    # direct evaluation of the two-body period
    T = 2 * math.pi * math.sqrt(A_SCENARIO**3 / MU_EARTH)
    assert T == pytest.approx(5939.0, abs=0.5)
    assert OrbitalElements(A_SCENARIO, 98.5, 0, 0).period == pytest.approx(T, rel=1e-12)


def test_full_period_closure():
    e = OrbitalElements(A_SCENARIO, 98.5, 120.0, 33.0)
    for t in (0.0, 123.4, 4000.0):
        assert np.allclose(propagate(e, t), propagate(e, t + e.period), atol=1e-6)


@settings(max_examples=100, deadline=None)
@given(st.floats(0, 1e5), st.floats(0, 360), st.floats(0, 360), st.floats(0, 180))
def test_radius_is_constant(t, raan, u0, inc):
    e = OrbitalElements(A_SCENARIO, inc, raan, u0)
    assert np.linalg.norm(propagate(e, t)) == pytest.approx(A_SCENARIO, rel=1e-12)


def test_inclination_bounds_latitude():
    e = OrbitalElements(A_SCENARIO, 98.5, 0.0, 0.0)
    ts = np.linspace(0, e.period, 2001)
    z = propagate(e, ts)[:, 2]
    assert z.max() == pytest.approx(A_SCENARIO * math.sin(math.radians(98.5)), rel=1e-5)


def _dense_min_distance(p1, p2, n=20001):
    s = np.linspace(0, 1, n)[:, None]
    return np.linalg.norm(p1 + s * (np.asarray(p2) - p1), axis=1).min()


def test_line_of_sight_examples():
    p = np.array([A_SCENARIO, 0.0, 0.0])
    assert line_of_sight(p, p, 100.0)
    assert not line_of_sight(p, -p, 100.0)
    half = math.radians(22.5)
    p1 = A_SCENARIO * np.array([math.cos(half), math.sin(half), 0.0])
    p2 = A_SCENARIO * np.array([math.cos(half), -math.sin(half), 0.0])
    dense = _dense_min_distance(p1, p2)
    assert dense == pytest.approx(A_SCENARIO * math.cos(half), rel=1e-6)
    assert dense >= EARTH_RADIUS_KM + 100.0
    assert line_of_sight(p1, p2, 100.0)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-9000, 9000), min_size=6, max_size=6))
def test_line_of_sight_matches_dense_sampling(xs):
    p1, p2 = np.array(xs[:3]), np.array(xs[3:])
    limit = EARTH_RADIUS_KM + 100.0
    dense = _dense_min_distance(p1, p2)
    if abs(dense - limit) < 1.0:
        return  # sampling resolution
    assert line_of_sight(p1, p2, 100.0) == (dense >= limit)


def test_colocated_pair_gives_full_window():
    times = np.arange(0.0, 101.0, 10.0)
    pos = np.tile(np.array([A_SCENARIO, 0.0, 0.0]), (len(times), 2, 1))
    contacts = contacts_from_positions(times, pos, 6000.0, 100.0)
    assert [(c.from_id, c.to_id, c.start, c.end) for c in contacts] == [
        (0, 1, 0.0, 100.0),
        (1, 0, 0.0, 100.0),
    ]


def _pairs(plan):
    out = {}
    for c in plan:
        out.setdefault((c.from_id, c.to_id), []).append((c.start, c.end))
    return {k: sorted(v) for k, v in out.items()}


def test_scenario_plan_symmetric_and_disjoint(scenario_plan):
    assert len(scenario_plan) > 0
    pairs = _pairs(scenario_plan)
    for (a, b), windows in pairs.items():
        assert windows == pairs[(b, a)]
        for s, e in windows:
            assert 0.0 <= s < e <= 8000.0
        for (s0, e0), (s1, e1) in zip(windows, windows[1:]):
            assert e0 < s1


def test_in_plane_neighbours_always_connected(scenario_plan):
    pairs = _pairs(scenario_plan)
    for p in range(3):
        for s in range(8):
            a, b = 8 * p + s, 8 * p + (s + 1) % 8
            assert pairs[(a, b)] == [(0.0, 8000.0)]


def test_refinement_keeps_windows():
    spec = ConstellationSpec()
    coarse = generate_contact_plan(spec, 0.0, 3000.0, dt=20.0)
    fine = generate_contact_plan(spec, 0.0, 3000.0, dt=10.0)
    fine_pairs = _pairs(fine)
    dt = 20.0
    for pair, windows in _pairs(coarse).items():
        for s, e in windows:
            assert any(fs - dt <= s and e <= fe + dt for fs, fe in fine_pairs.get(pair, ())), (pair, s, e)


def test_refinement_never_loses_long_contacts():
    spec = ConstellationSpec()
    dt = 20.0
    coarse = generate_contact_plan(spec, 0.0, 3000.0, dt=dt)
    fine = _pairs(generate_contact_plan(spec, 0.0, 3000.0, dt=dt / 2))
    for pair, windows in _pairs(coarse).items():
        for s, e in windows:
            if e - s > 2 * dt:
                assert any(fs <= e and s <= fe for fs, fe in fine[pair])


def test_contact_plan_file_round_trip(tmp_path, scenario_plan):
    path = tmp_path / "plan.txt"
    write_contact_plan(scenario_plan, path)
    text = path.read_text(encoding="ascii")
    assert text.splitlines()[0] == "# contactplan v1"
    loaded = read_contact_plan(path, horizon=(0.0, 8000.0))
    assert len(loaded) == len(scenario_plan)
    for a, b in zip(loaded, scenario_plan):
        assert (a.from_id, a.to_id) == (b.from_id, b.to_id)
        assert a.start == pytest.approx(b.start, abs=5e-4)
        assert a.range_km == pytest.approx(b.range_km, abs=5e-4)


def test_parse_hand_written_plan():
    plan = parse_contact_plan(["# contactplan v1", "0 1 0 40 1000.5", "", "1 0 0 40 1000.5"])
    assert len(plan) == 2 and plan.horizon == (0.0, 40.0)
    assert plan.contacts[0].owlt == pytest.approx(1000.5 / 299792.458)
    with pytest.raises(ValueError):
        parse_contact_plan(["0 1 0 40 1"])
    with pytest.raises(ValueError):
        parse_contact_plan(["# contactplan v1", "0 1 40 40 1"])


def test_empty_plan_is_legal():
    spec = ConstellationSpec(1, 2, 710.0, 98.5, 0)  # two satellites on opposite sides
    plan = generate_contact_plan(spec, 0.0, 1000.0, max_range=100.0)
    assert len(plan) == 0 and isinstance(plan, ContactPlan)
