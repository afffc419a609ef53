import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from relaylab.asymptotics import (
    AsymptoticScenario,
    all_common_ddf_rate,
    high_snr_study,
    low_snr_condition,
    low_snr_study,
)
from relaylab.model import ChannelGains, DdfAllocation, PowerBudget, ValidationError
from relaylab.schemes import ddf_eval

ONES = ChannelGains(1, 1, 1, 1, 1)


@pytest.mark.parametrize("g1, g2, expected", [(0.1, 0.1, True), (1, 1, False), (0, 0, True)])
def test_low_snr_condition_examples(g1, g2, expected):
    assert low_snr_condition(ONES, g1, g2) is expected


def test_low_snr_condition_uses_square_roots():
    # (sqrt(0.2) + sqrt(0.2))^2 = 0.8 <= 1, while (0.2 + 0.2)^2 would also pass; 0.3 separates them
    assert low_snr_condition(ONES, 0.3, 0.3) is False
    assert low_snr_condition(ONES, 0.2, 0.2) is True


def test_empty_grids():
    scn = AsymptoticScenario(ONES, 0.1, 0.1)
    assert low_snr_study(scn) == [] and high_snr_study(scn) == []


def test_scenario_validation():
    with pytest.raises(ValidationError):
        AsymptoticScenario(ONES, -1, 0.1)
    with pytest.raises(ValidationError):
        AsymptoticScenario(ONES, 0.1, 0.1, (0, -10))
    with pytest.raises(ValidationError):
        AsymptoticScenario(ONES, math.nan, 0.1)


def test_condition_flag():
    rows = low_snr_study(AsymptoticScenario(ONES, 1, 1, (-20.0,)))
    assert rows[0].condition_violated
    assert not low_snr_study(AsymptoticScenario(ONES, 0.1, 0.1, (-20.0,)))[0].condition_violated


def test_high_snr_single_point_shape():
    rows = high_snr_study(AsymptoticScenario(ONES, 1, 1, (0.0,)))
    assert len(rows) == 1
    r = rows[0]
    assert 0 < r.ratio <= 1 + 1e-6
    assert r.scheme_rate <= r.bound_rate + 5e-3
    assert r.ratio == pytest.approx(r.scheme_rate / r.bound_rate)


@given(st.floats(0.1, 10), st.floats(0.1, 10), st.floats(0.1, 10), st.floats(-30, 10), st.floats(0, 1),
       st.floats(0, 1))
def test_all_common_fast_path_bit_exact(h0, h13, h23, p0_db, g1, g2):
    g = ChannelGains(h0 * 1.5, h0, 1, h13, h23)
    p0 = 10 ** (p0_db / 10)
    b = PowerBudget(p0, g1 * p0, g2 * p0)
    ref = ddf_eval(g, b, DdfAllocation(0.5, 0.5, 0.0, b.p0, 0.0, b.p1)).total_bpcu
    assert all_common_ddf_rate(g, b) == ref


def test_low_snr_rows_ordered_and_conservative():
    rows = low_snr_study(AsymptoticScenario(ONES, 0.1, 0.1, (-30.0, -20.0)))
    assert [r.p0_db for r in rows] == [-30.0, -20.0]
    for r in rows:
        assert r.bound_rate <= r.linear_bound
        assert r.scheme_rate <= r.bound_rate + 5e-3
        assert r.scheme_allocation.t3 == 0.5


def test_low_snr_relabels_when_needed():
    g = ChannelGains(0.5, 1, 1, 1, 1)
    rows = low_snr_study(AsymptoticScenario(g, 0.05, 0.05, (-20.0,)))
    assert rows[0].relabeled
