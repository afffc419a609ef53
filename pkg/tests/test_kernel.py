import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from relaylab.kernel import DomainError, c_gauss, coherent_snr, power_for_slot_rate, slot_term

snr = st.floats(0, 1e8, allow_nan=False)
frac = st.floats(0, 1)


@pytest.mark.parametrize("x, expected", [(0, 0.0), (1, 0.5), (3, 1.0)])
def test_c_gauss_examples(x, expected):
    assert c_gauss(x) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("bad", [-1.0, math.nan, math.inf])
def test_c_gauss_rejects(bad):
    with pytest.raises(DomainError):
        c_gauss(bad)


def test_c_gauss_vectorised():
    np.testing.assert_allclose(c_gauss(np.array([0.0, 1.0, 3.0])), [0, 0.5, 1.0], atol=1e-15)


@pytest.mark.parametrize("t, s, expected", [(0, 5, 0.0), (1, 3, 1.0), (0.5, 1.5, 0.5), (0.3, 0, 0.0)])
def test_slot_term_examples(t, s, expected):
    assert slot_term(t, s) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("t", [-0.1, 1.1])
def test_slot_term_rejects_t(t):
    with pytest.raises(DomainError):
        slot_term(t, 1.0)


def test_slot_term_rejects_negative_energy():
    with pytest.raises(DomainError):
        slot_term(0.5, -1.0)


@pytest.mark.parametrize("args, expected", [((1, 0.25, 1, 0.25), 1.0), ((3, 0, 3, 0), 0.0), ((2, 1, 0, 5), 4.0)])
def test_coherent_examples(args, expected):
    assert coherent_snr(*args) == pytest.approx(expected, abs=1e-15)


def test_coherent_rejects_negative():
    with pytest.raises(DomainError):
        coherent_snr(1, -1, 1, 1)


@given(snr, snr)
def test_c_gauss_monotone(x, y):
    if x < y and y - x > 1e-12 * max(1.0, y):
        assert c_gauss(x) < c_gauss(y)


@given(frac, snr, frac, snr)
def test_slot_term_midpoint_concave(t1, s1, t2, s2):
    mid = slot_term((t1 + t2) / 2, (s1 + s2) / 2)
    avg = (slot_term(t1, s1) + slot_term(t2, s2)) / 2
    assert mid >= avg - 1e-12 * max(1.0, mid)


@given(st.floats(0, 1e6))
def test_slot_term_continuous_at_zero(s):
    assert slot_term(1e-9, s) < 1e-6


@given(st.floats(0, 100), snr, st.floats(0, 100), snr)
def test_coherent_never_hurts(g1, p1, g2, p2):
    c = coherent_snr(g1, p1, g2, p2)
    assert c >= g1**2 * p1 * (1 - 1e-12) and c >= g2**2 * p2 * (1 - 1e-12)


@given(st.floats(0.01, 1), st.floats(0.01, 100), st.floats(0, 20))
def test_power_for_slot_rate_inverts(t, gsq, rate):
    s = power_for_slot_rate(t, gsq, rate)
    if np.isfinite(s) and s < 1e200:
        assert slot_term(t, gsq * s) == pytest.approx(rate, rel=1e-9, abs=1e-12)


def test_power_for_slot_rate_unreachable():
    with pytest.raises(DomainError):
        power_for_slot_rate(0.0, 1.0, 0.5)
