"""Seeded generators of scenarios and allocations shared by the tests."""

import numpy as np

from relaylab.model import (
    BmeBackAllocation,
    BmeDpcAllocation,
    BmeSuccAllocation,
    BoundAllocation,
    ChannelGains,
    DdfAllocation,
    DpcAllocation,
    PowerBudget,
    Scenario,
    SsrdAllocation,
)


def random_scenario(rng, ordered=True):
    """Gains log-uniform on [0.1, 10], powers uniform on [-10, 30] dB."""
    g = 10.0 ** rng.uniform(-1, 1, 5)
    p_db = rng.uniform(-10, 30, 3)
    scn = Scenario(ChannelGains(*g), PowerBudget.from_db(*p_db))
    return scn.oriented()[0] if ordered else scn


def random_scenarios(seed, n, ordered=True):
    rng = np.random.default_rng(seed)
    return [random_scenario(rng, ordered) for _ in range(n)]


def symmetric_scenarios(seed, n):
    """h01 = h02, h13 = h23, P1 = P2 with the same ranges as random_scenario."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        h0, h12, h3 = 10.0 ** rng.uniform(-1, 1, 3)
        p0_db, pr_db = rng.uniform(-10, 30, 2)
        out.append(Scenario(ChannelGains(h0, h0, h12, h3, h3), PowerBudget.from_db(p0_db, pr_db, pr_db)))
    return out


def split(rng, total, parts):
    """Random non-negative split of ``total`` into ``parts`` pieces summing to it."""
    w = rng.dirichlet(np.ones(parts))
    x = list(w[:-1] * total)
    x.append(max(0.0, total - sum(x)))
    return x


def dpc_alloc(rng, b):
    return DpcAllocation(*split(rng, 1.0, 2), *split(rng, b.p0, 2))


def succ_alloc(rng, b):
    return BmeSuccAllocation(*split(rng, 1.0, 2), *split(rng, b.p0, 2), *rng.uniform(0, 1, 4))


def back_alloc(rng, b):
    return BmeBackAllocation(*split(rng, 1.0, 2), *split(rng, b.p0, 2), *rng.uniform(0, 1, 2))


def bmedpc_alloc(rng, b, relay=1):
    return BmeDpcAllocation(*split(rng, 1.0, 2), *split(rng, b.p0, 2), rng.uniform(), relay)


def ddf_alloc(rng, b):
    return DdfAllocation(*split(rng, 1.0, 2), *split(rng, b.p0, 2), *split(rng, b.p1, 2))


def ssrd_alloc(rng, b):
    return SsrdAllocation(*split(rng, 1.0, 4), *split(rng, b.p0, 4), *split(rng, b.p1, 3), *split(rng, b.p2, 3))


def bound_alloc(rng, b):
    return BoundAllocation(*split(rng, 1.0, 4), *split(rng, b.p0, 3), *split(rng, b.p1, 2), *split(rng, b.p2, 2))
