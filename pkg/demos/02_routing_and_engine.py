# %% [markdown]
# # Routing and store-and-forward simulation
#
# Contact graph routing finds the earliest delivery time over scheduled
# contacts. The engine then moves bundles hop by hop using one FCFS
# departure line per node.

# %%
from dtnrl.dtn import Bundle, Engine, Priority, cgr_route
from dtnrl.orbits import Contact, ContactPlan

contacts = [
    Contact(0, 1, 0, 100, 1500.0),
    Contact(1, 2, 60, 100, 1500.0),
    Contact(0, 2, 80, 120, 3000.0),
]
contacts += [Contact(c.to_id, c.from_id, c.start, c.end, c.range_km) for c in contacts]
plan = ContactPlan(contacts, (0.0, 200.0))

b = Bundle(0, 0, 2, size=500.0, priority=Priority.HIGH, creation_time=0.0, ttl=3600.0)
route = cgr_route(b, plan, at_node=0, now=0.0)
print("hops:", [(c.from_id, c.to_id, c.start) for c in route.hops])
print(f"best delivery time {route.best_delivery_time:.4f} s")

# %% [markdown]
# A slower radio at the relay makes the direct contact preferable.

# %%
slow = cgr_route(b, plan, 0, 0.0, rates={0: 500.0, 1: 7.8125, 2: 500.0})
print("with a slow relay:", [(c.from_id, c.to_id) for c in slow.hops],
      f"{slow.best_delivery_time:.4f} s")

# %% [markdown]
# Run the bundle through the engine in 40 s steps.

# %%
eng = Engine(plan, range(3))
eng.inject(b)
for k in range(3):
    m = eng.step_simulation(40.0)
    print(f"step {k}: delivered {m.delivered_bits:.0f} bits, cost {m.cost_bits:.0f} bits, "
          f"delay {m.mean_delivery_delay:.3f} s, capacity {m.total_link_capacity:.0f} bits")
print("conservation:", eng.conservation())
