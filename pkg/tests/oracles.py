"""Independent reference computations used by several test modules."""

import math

from dtnrl.orbits import Contact, ContactPlan


def brute_force_delivery(bundle, contacts, at_node, now, rates, horizon_end, excluded=()):
    """Earliest delivery time over every feasible contact sequence, or None."""
    deadline = bundle.creation_time + bundle.ttl
    best = math.inf

    def walk(node, t, used):
        nonlocal best
        if node == bundle.destination:
            best = min(best, t)
            return
        for i, c in enumerate(contacts):
            if i in used or c.from_id != node or c.to_id in excluded:
                continue
            tx = bundle.size / rates[node]
            dep = max(t, c.start)
            if dep + tx > c.end:
                continue
            arr = dep + tx + c.owlt
            if arr >= deadline or arr > horizon_end:
                continue
            walk(c.to_id, arr, used | {i})

    walk(at_node, now, frozenset())
    return None if best == math.inf else best


def discounted_returns(rewards, dones, bootstrap, gamma):
    """Sum_k gamma^k r_{t+k} per position, truncated at the first terminal."""
    n = len(rewards)
    out = []
    for t in range(n):
        total, discount, terminal = 0.0, 1.0, False
        for k in range(t, n):
            total += discount * rewards[k]
            discount *= gamma
            if dones[k]:
                terminal = True
                break
        if not terminal:
            total += discount * bootstrap
        out.append(total)
    return out


def random_plan(rng, n_nodes=5, max_contacts=12, horizon=200.0):
    """Small random plan (stdlib ``random.Random``) and per-node rates."""
    contacts = []
    target = rng.randint(1, max_contacts)
    attempts = 0
    while len(contacts) < target and attempts < 200:
        attempts += 1
        a, b = rng.sample(range(n_nodes), 2)
        s = round(rng.uniform(0, horizon - 1), 3)
        e = round(min(horizon, s + rng.uniform(0.5, 80)), 3)
        if any(c.from_id == a and c.to_id == b and s <= c.end and c.start <= e for c in contacts):
            continue
        contacts.append(Contact(a, b, s, e, rng.uniform(100, 5000)))
    rates = {n: rng.choice([500.0, 250.0, 62.5, 15.625]) for n in range(n_nodes)}
    return ContactPlan(contacts, (0.0, horizon)), rates
