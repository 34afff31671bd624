"""Walker-Delta constellation geometry and inter-satellite contact plans.

Orbits are circular two-body orbits; positions are expressed in an
Earth-centred inertial frame in kilometres. Node ids are assigned in
plane-major order: node ``p * sats_per_plane + s`` is satellite ``s`` of
plane ``p``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

EARTH_RADIUS_KM = 6378.137
MU_EARTH = 398600.4418  # km^3 / s^2
SPEED_OF_LIGHT_KM_S = 299792.458

CONTACT_PLAN_HEADER = "# contactplan v1"


class InvalidSpecError(ValueError):
    """Raised for constellation specs that cannot be built."""


@dataclass(frozen=True)
class OrbitalElements:
    """Circular orbit: eccentricity is fixed at zero."""

    semi_major_axis: float
    inclination: float
    raan: float
    argument_of_latitude_at_epoch: float

    def __post_init__(self):
        if not self.semi_major_axis > EARTH_RADIUS_KM:
            raise InvalidSpecError(
                f"semi_major_axis {self.semi_major_axis} km is inside the Earth"
            )
        object.__setattr__(self, "raan", self.raan % 360.0)
        object.__setattr__(
            self,
            "argument_of_latitude_at_epoch",
            self.argument_of_latitude_at_epoch % 360.0,
        )

    @property
    def mean_motion(self) -> float:
        """Mean motion in rad/s."""
        return math.sqrt(MU_EARTH / self.semi_major_axis**3)

    @property
    def period(self) -> float:
        return 2.0 * math.pi / self.mean_motion


@dataclass(frozen=True)
class ConstellationSpec:
    num_planes: int = 3
    sats_per_plane: int = 8
    altitude: float = 710.0
    inclination: float = 98.5
    phasing_factor: int = 1

    @property
    def num_nodes(self) -> int:
        return self.num_planes * self.sats_per_plane


@dataclass(frozen=True)
class Contact:
    """A directed transmission opportunity ``from_id -> to_id``.

    ``rate`` is the nominal rate recorded in the plan; the simulator always
    transmits at the sender's live radio rate instead.
    """

    from_id: int
    to_id: int
    start: float
    end: float
    range_km: float
    rate: float = 500.0

    @property
    def owlt(self) -> float:
        """One-way light time in seconds."""
        return self.range_km / SPEED_OF_LIGHT_KM_S

    @property
    def duration(self) -> float:
        return self.end - self.start


@dataclass
class ContactPlan:
    contacts: list[Contact] = field(default_factory=list)
    horizon: tuple[float, float] = (0.0, 0.0)

    def __len__(self):
        return len(self.contacts)

    def __iter__(self):
        return iter(self.contacts)

    def between(self, from_id: int, to_id: int) -> list[Contact]:
        return sorted(
            (c for c in self.contacts if c.from_id == from_id and c.to_id == to_id),
            key=lambda c: c.start,
        )

    def node_ids(self) -> set[int]:
        ids = set()
        for c in self.contacts:
            ids.add(c.from_id)
            ids.add(c.to_id)
        return ids


def build_walker_delta(spec: ConstellationSpec) -> list[OrbitalElements]:
    """Element sets for a Walker-Delta ``T/P/F`` pattern, plane-major order."""
    if spec.num_planes < 1 or spec.sats_per_plane < 1:
        raise InvalidSpecError(
            f"need at least one plane and one satellite per plane, got "
            f"{spec.num_planes} x {spec.sats_per_plane}"
        )
    total = spec.num_nodes
    a = EARTH_RADIUS_KM + spec.altitude
    raan_step = 360.0 / spec.num_planes
    in_plane_step = 360.0 / spec.sats_per_plane
    phase_step = spec.phasing_factor * 360.0 / total
    elements = []
    for p in range(spec.num_planes):
        for s in range(spec.sats_per_plane):
            elements.append(
                OrbitalElements(
                    semi_major_axis=a,
                    inclination=spec.inclination,
                    raan=p * raan_step,
                    argument_of_latitude_at_epoch=s * in_plane_step + p * phase_step,
                )
            )
    return elements


def propagate(elements: OrbitalElements, t):
    """ECI position (km) at time ``t`` seconds after epoch.

    ``t`` may be a scalar or an array; the result has shape ``t.shape + (3,)``.
    """
    t = np.asarray(t, dtype=float)
    a = elements.semi_major_axis
    u = np.radians(elements.argument_of_latitude_at_epoch) + elements.mean_motion * t
    raan = math.radians(elements.raan)
    inc = math.radians(elements.inclination)
    cos_u, sin_u = np.cos(u), np.sin(u)
    cos_o, sin_o = math.cos(raan), math.sin(raan)
    cos_i, sin_i = math.cos(inc), math.sin(inc)
    x = a * (cos_o * cos_u - sin_o * cos_i * sin_u)
    y = a * (sin_o * cos_u + cos_o * cos_i * sin_u)
    z = a * (sin_i * sin_u)
    return np.stack([x, y, z], axis=-1)


def segment_min_distance(p1, p2):
    """Smallest distance from the Earth's centre to the segment ``p1``-``p2``.

    Broadcasts over leading axes.
    """
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    d = p2 - p1
    dd = np.sum(d * d, axis=-1)
    with np.errstate(invalid="ignore", divide="ignore"):
        s = np.where(dd > 0.0, -np.sum(p1 * d, axis=-1) / dd, 0.0)
    s = np.clip(s, 0.0, 1.0)
    closest = p1 + s[..., None] * d
    return np.sqrt(np.sum(closest * closest, axis=-1))


def line_of_sight(p1, p2, grazing_altitude: float = 100.0) -> bool:
    """True when the straight link stays above ``grazing_altitude`` everywhere."""
    return bool(segment_min_distance(p1, p2) >= EARTH_RADIUS_KM + grazing_altitude)


def _runs(mask: np.ndarray) -> list[tuple[int, int]]:
    """Inclusive index ranges of the maximal True runs in a boolean vector."""
    if not mask.any():
        return []
    padded = np.concatenate([[False], mask, [False]]).astype(np.int8)
    edges = np.diff(padded)
    starts = np.flatnonzero(edges == 1)
    stops = np.flatnonzero(edges == -1) - 1
    return list(zip(starts.tolist(), stops.tolist()))


def contacts_from_positions(
    times: np.ndarray,
    positions: np.ndarray,
    max_range: float,
    grazing_altitude: float,
    rate: float = 500.0,
) -> list[Contact]:
    """Contacts from sampled positions of shape ``(len(times), n_nodes, 3)``.

    A window spans the first to the last sample of a visible run; runs made
    of a single sample have zero length and are discarded.
    """
    n = positions.shape[1]
    contacts = []
    for i in range(n):
        for j in range(i + 1, n):
            pi, pj = positions[:, i, :], positions[:, j, :]
            dist = np.linalg.norm(pj - pi, axis=-1)
            visible = (dist <= max_range) & (
                segment_min_distance(pi, pj) >= EARTH_RADIUS_KM + grazing_altitude
            )
            for k0, k1 in _runs(visible):
                if k1 == k0:
                    continue
                start, end = float(times[k0]), float(times[k1])
                rng_km = float(dist[k0 : k1 + 1].mean())
                contacts.append(Contact(i, j, start, end, rng_km, rate))
                contacts.append(Contact(j, i, start, end, rng_km, rate))
    contacts.sort(key=lambda c: (c.start, c.from_id, c.to_id))
    return contacts


def sample_times(t0: float, t1: float, dt: float) -> np.ndarray:
    if not t0 < t1:
        raise ValueError(f"empty horizon [{t0}, {t1}]")
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    count = int(math.floor((t1 - t0) / dt + 1e-9)) + 1
    return t0 + dt * np.arange(count)


def generate_contact_plan(
    spec: ConstellationSpec,
    t0: float = 0.0,
    t1: float = 8000.0,
    dt: float = 10.0,
    max_range: float = 6000.0,
    grazing_altitude: float = 100.0,
    rate: float = 500.0,
) -> ContactPlan:
    elements = build_walker_delta(spec)
    times = sample_times(t0, t1, dt)
    positions = np.stack([propagate(e, times) for e in elements], axis=1)
    contacts = contacts_from_positions(times, positions, max_range, grazing_altitude, rate)
    return ContactPlan(contacts, (float(t0), float(t1)))


def write_contact_plan(plan: ContactPlan, path) -> None:
    lines = [CONTACT_PLAN_HEADER]
    for c in plan.contacts:
        lines.append(
            f"{c.from_id} {c.to_id} {c.start:.3f} {c.end:.3f} {c.range_km:.3f}"
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def read_contact_plan(path, horizon: Sequence[float] | None = None, rate: float = 500.0) -> ContactPlan:
    """Load a ``# contactplan v1`` file.

    The horizon defaults to the span of the listed contacts.
    """
    text = Path(path).read_text(encoding="ascii")
    return parse_contact_plan(text.splitlines(), horizon, rate)


def parse_contact_plan(lines: Iterable[str], horizon=None, rate: float = 500.0) -> ContactPlan:
    lines = list(lines)
    if not lines or lines[0].strip() != CONTACT_PLAN_HEADER:
        raise ValueError(f"missing '{CONTACT_PLAN_HEADER}' header")
    contacts = []
    for lineno, line in enumerate(lines[1:], start=2):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if len(fields) != 5:
            raise ValueError(f"line {lineno}: expected 5 fields, got {len(fields)}")
        src, dst = int(fields[0]), int(fields[1])
        start, end, rng_km = (float(f) for f in fields[2:])
        if not start < end:
            raise ValueError(f"line {lineno}: contact start must precede end")
        contacts.append(Contact(src, dst, start, end, rng_km, rate))
    if horizon is None:
        if contacts:
            horizon = (min(c.start for c in contacts), max(c.end for c in contacts))
        else:
            horizon = (0.0, 0.0)
    return ContactPlan(contacts, (float(horizon[0]), float(horizon[1])))
