import math

import numpy as np
import pytest

from pinchsim.arraywg import (
    InfeasibleError,
    _share_for_rate,
    aligned_array,
    maxmin_time_shares,
    noma_array_bcd,
    stage1_min_pathloss,
    stage2_phase_align,
    tdma_array_maxmin,
)
from pinchsim.channel import channel_array
from pinchsim.config import Point3, SystemConfig
from pinchsim.multiuser import cr_noma_two_user

CFG = SystemConfig()


# ---------------------------------------------------------------------------
# Two-stage placement
# ---------------------------------------------------------------------------

def test_stage1_grid_centered_on_user():
    user = Point3(10.0, 2.0, 0.0)
    pl = stage1_min_pathloss(user, CFG, 4)
    xs = np.array(pl.positions)
    assert np.mean(xs) == pytest.approx(10.0)
    assert np.allclose(np.diff(xs), CFG.wavelength / 2.0)
    assert pl.spacing_floor == CFG.wavelength / 2.0


def test_stage1_shifts_into_bounds():
    user = Point3(0.1, 0.0, 0.0)
    pl = stage1_min_pathloss(user, CFG, 8, bounds=(0.0, 100.0))
    assert pl.positions[0] >= 0.0


def test_stage1_infeasible_bounds():
    with pytest.raises(InfeasibleError):
        stage1_min_pathloss(Point3(0.5, 0.0, 0.0), CFG, 4, delta=1.0, bounds=(0.0, 1.0))
    with pytest.raises(ValueError):
        stage1_min_pathloss(Point3(0.5, 0.0, 0.0), CFG, 0)
    with pytest.raises(ValueError):
        stage1_min_pathloss(Point3(0.5, 0.0, 0.0), CFG, 2, delta=-0.1)


def test_stage2_alignment_is_nearly_coherent():
    rng = np.random.default_rng(1)
    for _ in range(20):
        user = Point3(float(rng.uniform(0, 20)), float(rng.uniform(-10, 10)), 0.0)
        n = int(rng.integers(2, 9))
        pl = aligned_array(user, CFG, n)
        assert pl.aligned
        total = abs(channel_array(pl.positions, user, CFG, False))
        mags = sum(abs(channel_array([x], user, CFG, False)) for x in pl.positions)
        assert total >= 0.998 * mags


def test_stage2_respects_spacing_floor():
    user = Point3(12.0, 4.0, 0.0)
    delta = CFG.wavelength / 2.0
    pl = aligned_array(user, CFG, 6, delta)
    assert np.all(np.diff(pl.positions) >= delta - 1e-12)


def test_stage2_improves_on_unaligned_snr():
    user = Point3(12.0, 4.0, 0.0)
    s1 = stage1_min_pathloss(user, CFG, 6)
    s2 = stage2_phase_align(s1, user, CFG)
    assert s2.achieved_snr >= s1.achieved_snr


# ---------------------------------------------------------------------------
# Max-min time shares
# ---------------------------------------------------------------------------

def test_share_for_rate_roundtrip():
    a, rate = 1e5, 3.0
    t = _share_for_rate(a, rate)
    assert t * math.log2(1.0 + a / t) == pytest.approx(rate, rel=1e-10)


def test_time_shares_equalize_rates_and_fill_horizon():
    a = np.array([1e4, 5e5, 2e6])
    t, rate = maxmin_time_shares(a)
    assert sum(t) == pytest.approx(1.0, abs=1e-12)
    per_user = t * np.log2(1.0 + a / t)
    assert np.allclose(per_user, rate, rtol=1e-9)
    # Weaker channels need more airtime.
    assert t[0] > t[1] > t[2]


def test_time_shares_longer_horizon_raises_rate():
    a = np.array([1e4, 5e5])
    t1, r1 = maxmin_time_shares(a, horizon=1.0)
    t2, r2 = maxmin_time_shares(a, horizon=2.0)
    assert sum(t2) == pytest.approx(2.0, abs=1e-12)
    assert r2 > r1


# ---------------------------------------------------------------------------
# TDMA over an array
# ---------------------------------------------------------------------------

def test_tdma_array_history_monotone():
    rng = np.random.default_rng(2)
    for _ in range(5):
        users = [
            Point3(float(rng.uniform(0, 10)), float(rng.uniform(-5, 5)), 0.0)
            for _ in range(3)
        ]
        res = tdma_array_maxmin(users, CFG, 4)
        hist = np.array(res.history)
        assert np.all(np.diff(hist) >= -1e-12)
        assert res.min_rate >= hist[0] - 1e-12


def test_tdma_array_single_user_uses_full_horizon():
    res = tdma_array_maxmin([Point3(5.0, 1.0, 0.0)], CFG, 4)
    assert res.shares.shares == (pytest.approx(1.0),)
    assert res.converged


def test_tdma_array_improves_with_more_pinches():
    users = [Point3(3.0, 1.0, 0.0), Point3(7.0, -2.0, 0.0)]
    r1 = tdma_array_maxmin(users, CFG, 1).min_rate
    r4 = tdma_array_maxmin(users, CFG, 4).min_rate
    assert r4 > r1


# ---------------------------------------------------------------------------
# NOMA over an array
# ---------------------------------------------------------------------------

def test_noma_array_single_pinch_recovers_closed_form():
    p = Point3(2.0, 3.0, 0.0)
    s = Point3(4.0, -1.0, 0.0)
    res = noma_array_bcd(p, s, CFG, 1, 0.5)
    ref = cr_noma_two_user(p, s, 0.5, CFG)
    assert res.secondary_rate == pytest.approx(ref.secondary_rate, rel=1e-9)
    assert res.alpha_p == pytest.approx(ref.alpha_p, rel=1e-9)


def test_noma_array_history_monotone_and_constraints():
    rng = np.random.default_rng(3)
    for _ in range(5):
        p = Point3(float(rng.uniform(0, 5)), float(rng.uniform(-2.5, 2.5)), 0.0)
        s = Point3(float(rng.uniform(0, 5)), float(rng.uniform(-2.5, 2.5)), 0.0)
        res = noma_array_bcd(p, s, CFG, 4, 0.1)
        hist = np.array(res.history)
        assert np.all(np.diff(hist) >= -1e-12)
        assert 0.0 <= res.alpha_p <= 1.0
        assert res.alpha_p + res.alpha_s == pytest.approx(1.0)


def test_noma_array_rate_grows_with_pinches():
    p = Point3(1.0, 2.0, 0.0)
    s = Point3(4.0, -1.0, 0.0)
    rates = [noma_array_bcd(p, s, CFG, n, 0.1).secondary_rate for n in (2, 4, 8)]
    assert all(b >= a - 1e-9 for a, b in zip(rates, rates[1:]))


def test_noma_array_infeasible_power():
    p = Point3(0.0, 2.0, 0.0)
    s = Point3(4.0, -1.0, 0.0)
    with pytest.raises(InfeasibleError):
        noma_array_bcd(p, s, CFG, 2, 1.0, p_max=1e-13)
    with pytest.raises(ValueError):
        noma_array_bcd(p, s, CFG, 2, 0.0)
