# %% [markdown]
# # Constellation geometry and the contact plan
#
# A Walker-Delta constellation of 3 planes with 8 satellites each, 710 km up
# at 98.5 degrees. We propagate circular orbits, test line of sight against
# a grazing shell 100 km above the surface, and turn the sampled visibility
# into a list of contact windows.

# %%
import numpy as np

from dtnrl.orbits import (
    ConstellationSpec, build_walker_delta, generate_contact_plan, line_of_sight, propagate,
    write_contact_plan,
)

spec = ConstellationSpec()
elements = build_walker_delta(spec)
print(f"{len(elements)} satellites, period {elements[0].period:.2f} s")

# %% [markdown]
# Positions are ECI kilometres; every satellite stays on its sphere.

# %%
ts = np.linspace(0, elements[0].period, 7)
r = np.linalg.norm(propagate(elements[0], ts), axis=-1)
print("radius over one orbit:", np.round(r, 6))

# %% [markdown]
# Line of sight between an in-plane neighbour and a satellite in the next plane.

# %%
p0 = propagate(elements[0], 0.0)
for j in (1, 4, 8, 12):
    pj = propagate(elements[j], 0.0)
    print(f"sat 0 -> sat {j:2d}: {np.linalg.norm(pj - p0):8.1f} km, visible={line_of_sight(p0, pj)}")

# %% [markdown]
# The contact plan for an 8000 s episode. Contacts between in-plane
# neighbours last the whole horizon; cross-plane ones come and go.

# %%
plan = generate_contact_plan(spec, 0.0, 8000.0)
durations = np.array([c.duration for c in plan.contacts])
print(f"{len(plan)} directed contacts")
print(f"full-horizon contacts: {(durations == 8000).sum()}")
print(f"intermittent durations: {durations[durations < 8000].min():.0f}"
      f"..{durations[durations < 8000].max():.0f} s")
for c in plan.between(0, 8)[:3]:
    print(f"  0 -> 8  [{c.start:6.0f}, {c.end:6.0f}]  range {c.range_km:7.1f} km  owlt {c.owlt * 1e3:.2f} ms")

# %%
write_contact_plan(plan, "contact_plan.txt")
print(open("contact_plan.txt").read().splitlines()[:3])
