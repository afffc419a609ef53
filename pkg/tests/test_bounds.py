from dataclasses import fields, replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relaylab.bounds import (
    BoundKind,
    cutset_eval,
    cutset_optimize,
    low_snr_linear_bound,
    successive_cutset_optimize,
)
from relaylab.kernel import DomainError
from relaylab.model import BoundAllocation, ChannelGains, OptimizerConfig, PowerBudget, Scenario
from relaylab.optimizer import SearchSpace, Simplex, grid_best
from relaylab.schemes import SchemeId, optimize

from _gen import bound_alloc, random_scenario

ONES = ChannelGains(1, 1, 1, 1, 1)
SYM = PowerBudget(3, 1.5, 1.5)


def test_zero_power_is_zero():
    b = PowerBudget(0, 0, 0)
    assert cutset_eval(ONES, b, BoundAllocation(0.25, 0.25, 0.25, 0.25, 0, 0, 0, 0, 0, 0, 0)).total_bpcu == 0
    assert cutset_optimize(ONES, b).total_bpcu == 0
    assert successive_cutset_optimize(ONES, b).total_bpcu == 0


def test_relays_cut_off_is_zero():
    g = ChannelGains(1, 1, 1, 0, 0)
    a = BoundAllocation(0.25, 0.25, 0.25, 0.25, 1, 1, 1, 1, 0.5, 1, 0.5)
    rep = cutset_eval(g, SYM, a)
    assert rep.total_bpcu == 0 and rep.cut_values["{0,1,2}"] == 0


def test_cut_keys():
    rep = cutset_eval(ONES, SYM, BoundAllocation(0.5, 0.5, 0, 0, 1.5, 1.5, 0, 1.5, 0, 1.5, 0))
    assert set(rep.cut_values) == {"{0}", "{0,1}", "{0,2}", "{0,1,2}"}


def test_successive_states_dominate_dpc_example():
    # fine lattice over the successive states: the bound must cover the DPC rate 1.0
    g, b = ONES, SYM

    def obj(X):
        out = np.empty(len(X))
        for i, (t1, t2, p1, p2) in enumerate(X):
            out[i] = cutset_eval(g, b, BoundAllocation(t1, t2, 0, 0, p1, p2, 0, 1.5, 0, 1.5, 0)).total_bpcu
        return out

    best = grid_best(obj, SearchSpace([Simplex(2, 1.0), Simplex(2, 3.0)]), 41)
    assert best.value >= 1.0 - 1e-12


def test_symmetric_bound_dominates_every_scheme():
    scn = Scenario(ONES, SYM)
    up = cutset_optimize(scn.gains, scn.budget).total_bpcu
    for s in SchemeId:
        assert optimize(s, scn).total_bpcu <= up + 5e-3


def test_high_snr_simultaneous_share_small():
    p0 = 1e8
    rep = cutset_optimize(ONES, PowerBudget(p0, p0, p0))
    assert rep.allocation.t3 + rep.allocation.t4 <= 0.1


@settings(max_examples=15)
@given(st.integers(0, 2**32 - 1))
def test_optimum_dominates_probes(seed):
    rng = np.random.default_rng(seed)
    scn = random_scenario(rng)
    up = cutset_optimize(scn.gains, scn.budget, OptimizerConfig(grid_points_per_dim=4, multistarts=4))
    for _ in range(20):
        a = bound_alloc(rng, scn.budget)
        assert cutset_eval(scn.gains, scn.budget, a).total_bpcu <= up.total_bpcu + 1e-9


def test_successive_below_full():
    rng = np.random.default_rng(9)
    for _ in range(5):
        scn = random_scenario(rng)
        full = cutset_optimize(scn.gains, scn.budget).total_bpcu
        succ = successive_cutset_optimize(scn.gains, scn.budget)
        assert succ.total_bpcu <= full + 1e-9
        a = succ.allocation
        assert a.t3 == a.t4 == a.p0_3 == a.p1_4 == a.p2_4 == 0


def test_successive_bound_reached_by_backward_bme_for_strong_inter_relay_link():
    g = ChannelGains(1, 1, 10, 1, 1)
    b = PowerBudget.from_db(10, 10, 10)
    back = optimize(SchemeId.BME_BACK, Scenario(g, b)).total_bpcu
    assert back >= 0.95 * successive_cutset_optimize(g, b).total_bpcu


@given(st.integers(0, 2**32 - 1), st.floats(0.1, 10))
def test_cutset_scale_invariance(seed, k):
    rng = np.random.default_rng(seed)
    scn = random_scenario(rng)
    a = bound_alloc(rng, scn.budget)
    sa = replace(a, **{f.name: getattr(a, f.name) / k**2 for f in fields(a) if f.name.startswith("p")})
    base = cutset_eval(scn.gains, scn.budget, a).total_bpcu
    scaled = cutset_eval(scn.gains.scaled(k), scn.budget.scaled(1 / k**2), sa).total_bpcu
    assert abs(base - scaled) <= 1e-12 * max(1.0, base)


def test_linear_bound_examples():
    g = ChannelGains(1, 1, 1, 1, 1)
    assert low_snr_linear_bound(g, 0.25, 0.25, 0.01) == pytest.approx(0.0072135, abs=5e-8)
    assert low_snr_linear_bound(g, 0.25, 0.25, 0.0) == 0
    assert low_snr_linear_bound(g, 0.0, 0.0, 5.0) == 0
    with pytest.raises(DomainError):
        low_snr_linear_bound(g, -0.1, 0.2, 1.0)


def test_bound_kind_values():
    assert {k.value for k in BoundKind} == {"full", "successive", "low-snr-linear"}
