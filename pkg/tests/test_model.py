import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from relaylab.model import (
    AllocationError,
    BoundAllocation,
    ChannelGains,
    DdfAllocation,
    DpcAllocation,
    OptimizerConfig,
    PowerBudget,
    RateReport,
    Scenario,
    SsrdAllocation,
    TimeAllocation,
    ValidationError,
    db_to_linear,
    linear_to_db,
    load_scenario,
    parse_scenario,
    validate_scenario,
)

from _gen import bound_alloc, ddf_alloc, dpc_alloc, random_scenario, ssrd_alloc


def test_validate_accepts_well_formed():
    scn = validate_scenario([1, 1, 1, 1, 1], [1, 1, 1])
    assert scn.gains == ChannelGains(1, 1, 1, 1, 1)
    assert scn.budget == PowerBudget(1, 1, 1)


def test_validate_accepts_mappings():
    g = dict(h01=1, h02=2, h12=3, h13=4, h23=5)
    scn = validate_scenario(g, dict(p0=1, p1=2, p2=3))
    assert scn.gains.h23 == 5.0 and scn.budget.p2 == 3.0


def test_negative_gain_named():
    with pytest.raises(ValidationError, match="h01 negative") as e:
        validate_scenario([-1, 1, 1, 1, 1], [1, 1, 1])
    assert e.value.field == "h01"


def test_nan_power_named():
    with pytest.raises(ValidationError, match="p0 not finite") as e:
        validate_scenario([1, 1, 1, 1, 1], [math.nan, 1, 1])
    assert e.value.field == "p0"


def test_infinite_gain_rejected():
    with pytest.raises(ValidationError, match="h23 not finite"):
        ChannelGains(1, 1, 1, 1, math.inf)


def test_missing_mapping_field():
    with pytest.raises(ValidationError, match="h13 missing"):
        validate_scenario(dict(h01=1, h02=1, h12=1, h23=1), [1, 1, 1])


def test_swap_and_orientation():
    scn = Scenario(ChannelGains(0.5, 2, 3, 4, 5), PowerBudget(1, 2, 3))
    assert not scn.relays_ordered
    o, swapped = scn.oriented()
    assert swapped and o.gains == ChannelGains(2, 0.5, 3, 5, 4) and o.budget == PowerBudget(1, 3, 2)
    assert o.oriented() == (o, False)
    assert o.swapped().swapped() == o


@given(st.floats(-100, 100))
def test_db_round_trip(db):
    assert linear_to_db(db_to_linear(db)) == pytest.approx(db, abs=1e-9)


def test_linear_to_db_zero():
    assert linear_to_db(0.0) == -math.inf


def test_time_allocation_sum():
    TimeAllocation(0.25, 0.25, 0.25, 0.25)
    with pytest.raises(AllocationError):
        TimeAllocation(0.5, 0.5, 0.5, 0.0)
    with pytest.raises(AllocationError):
        TimeAllocation(1.5, -0.5, 0.0, 0.0)


def test_allocation_rejects_negative_power():
    with pytest.raises(AllocationError):
        DpcAllocation(0.5, 0.5, -1.0, 2.0)


def test_budget_mismatch_rejected():
    a = DdfAllocation(0.5, 0.5, 1.0, 1.0, 0.5, 0.5)
    a.check_budget(PowerBudget(2.0, 1.0, 7.0))
    with pytest.raises(AllocationError, match="p1"):
        a.check_budget(PowerBudget(2.0, 1.5, 7.0))


@pytest.mark.parametrize("make", [dpc_alloc, ddf_alloc, ssrd_alloc, bound_alloc])
def test_random_allocations_satisfy_invariants(make):
    rng = np.random.default_rng(3)
    for _ in range(200):
        b = random_scenario(rng).budget
        a = make(rng, b)
        a.check_budget(b)
        ts = [getattr(a, n) for n in ("t1", "t2", "t3", "t4") if hasattr(a, n)]
        assert abs(math.fsum(ts) - 1.0) <= 1e-12


def test_ssrd_and_bound_allocation_shapes():
    SsrdAllocation(0.25, 0.25, 0.25, 0.25, *[0.25] * 4, *[1 / 3] * 3, *[1 / 3] * 3).check_budget(PowerBudget(1, 1, 1))
    BoundAllocation(1, 0, 0, 0, 1, 0, 0, 1, 0, 1, 0).check_budget(PowerBudget(1, 1, 1))


def test_rate_report_total_is_min_of_cuts():
    RateReport("x", 0.5, {}, None, {"a": 0.5, "b": 0.7})
    with pytest.raises(ValueError):
        RateReport("x", 0.6, {}, None, {"a": 0.5, "b": 0.7})


def test_rate_report_alloc_params():
    rep = RateReport("dpc", 1.0, {}, DpcAllocation(0.5, 0.5, 1.5, 1.5), {"c": 1.0})
    assert rep.alloc_params() == {"t1": 0.5, "t2": 0.5, "p0_1": 1.5, "p0_2": 1.5}


@pytest.mark.parametrize("kw", [dict(grid_points_per_dim=1), dict(multistarts=0), dict(refine_tol_rate=0),
                                dict(refine_tol_step=-1), dict(grid_points_per_dim=2.5)])
def test_optimizer_config_rejects(kw):
    with pytest.raises(ValueError):
        OptimizerConfig(**kw)


def test_optimizer_config_defaults():
    cfg = OptimizerConfig()
    assert (cfg.grid_points_per_dim, cfg.multistarts, cfg.refine_tol_rate, cfg.refine_tol_step) == (9, 8, 1e-9, 1e-6)
    assert cfg.replace(seed=4).seed == 4


SCENARIO = """
# symmetric test network
h01 = 1
h02 = 1
h12 = 0.5
h13 = 1
h23 = 1
p0 = 3
p1_db = 0
p2 = 1.5   # linear
"""


def test_parse_scenario():
    scn = parse_scenario(SCENARIO)
    assert scn.gains.h12 == 0.5
    assert scn.budget.p0 == 3.0 and scn.budget.p1 == pytest.approx(1.0) and scn.budget.p2 == 1.5


def test_load_scenario(tmp_path):
    f = tmp_path / "s.txt"
    f.write_text(SCENARIO)
    assert load_scenario(f) == parse_scenario(SCENARIO)


@pytest.mark.parametrize("extra, field, msg", [
    ("p0_db = 3\n", "p0", "both linear and in dB"),
    ("h01 = 2\n", "h01", "duplicate"),
    ("h99 = 1\n", "h99", "unknown key"),
])
def test_parse_scenario_errors(extra, field, msg):
    with pytest.raises(ValidationError, match=msg) as e:
        parse_scenario(SCENARIO + extra)
    assert e.value.field == field


def test_parse_scenario_missing_and_bad_number():
    with pytest.raises(ValidationError, match="h23 missing"):
        parse_scenario(SCENARIO.replace("h23 = 1", ""))
    with pytest.raises(ValidationError, match="not a number") as e:
        parse_scenario(SCENARIO.replace("h12 = 0.5", "h12 = half"))
    assert e.value.field == "h12"
    with pytest.raises(ValidationError, match="negative"):
        parse_scenario(SCENARIO.replace("h12 = 0.5", "h12 = -0.5"))
