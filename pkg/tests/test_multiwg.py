import numpy as np
import pytest

from pinchsim.config import Point3, Region, SystemConfig, WaveguideLayout
from pinchsim.multiwg import (
    _mrt_equal_power,
    mrt_single_user,
    sum_rate,
    two_stage_mrt_wmmse,
    ula_baseline,
    wmmse_bcd,
)

CFG = SystemConfig()


def _scene(seed, m=4, p=4, side=10.0):
    rng = np.random.default_rng(seed)
    users = Region.square(side).sample_users(m, rng)
    layout = WaveguideLayout(count=p, height=CFG.d_v, region_side=side)
    return layout, users


def test_sum_rate_single_user_is_snr_rate():
    h = np.array([[1e-4 + 2e-4j, -3e-4j]])
    v = np.array([[0.5 + 0.1j, 0.2 - 0.3j]])
    total, rates = sum_rate(h, v, CFG.noise_power)
    snr = abs(h[0] @ v[0]) ** 2 / CFG.noise_power
    assert total == pytest.approx(np.log2(1.0 + snr))
    assert rates[0] == pytest.approx(total)


def test_sum_rate_accounts_for_interference():
    h = np.array([[1e-4, 0.0], [0.0, 1e-4]])
    v_clean = np.array([[1.0, 0.0], [0.0, 1.0]])
    v_dirty = np.array([[1.0, 0.0], [1.0, 0.0]])
    clean, _ = sum_rate(h, v_clean, CFG.noise_power)
    dirty, _ = sum_rate(h, v_dirty, CFG.noise_power)
    assert dirty < clean


def test_mrt_equal_power_splits_budget():
    h = np.array([[1e-4, 2e-4j], [3e-4, -1e-4]])
    v = _mrt_equal_power(h, 1.0)
    assert np.linalg.norm(v) ** 2 == pytest.approx(1.0)
    assert np.linalg.norm(v[0]) ** 2 == pytest.approx(0.5)


def test_wmmse_history_monotone():
    layout, users = _scene(0)
    sol = wmmse_bcd(layout, users, CFG)
    hist = np.array(sol.history)
    assert np.all(np.diff(hist) >= -1e-12)
    assert sol.sum_rate == pytest.approx(hist[-1])
    assert np.sum([np.linalg.norm(v) ** 2 for v in sol.beamformers]) <= CFG.p_max * (
        1.0 + 1e-6
    )


def test_wmmse_beats_fixed_position_variant():
    layout, users = _scene(1)
    bcd = wmmse_bcd(layout, users, CFG)
    fixed = two_stage_mrt_wmmse(layout, users, CFG)
    assert bcd.sum_rate >= fixed.sum_rate - 1e-6


def test_single_user_all_methods_agree():
    layout = WaveguideLayout(count=4, height=CFG.d_v, region_side=10.0)
    user = Point3(6.0, 2.0, 0.0)
    mrt = mrt_single_user(layout, user, CFG)
    bcd = wmmse_bcd(layout, [user], CFG)
    assert bcd.sum_rate == pytest.approx(mrt.sum_rate, rel=1e-6)


def test_mrt_single_user_uses_full_power():
    layout = WaveguideLayout(count=3, height=CFG.d_v, region_side=10.0)
    sol = mrt_single_user(layout, Point3(4.0, -1.0, 0.0), CFG)
    assert np.linalg.norm(sol.beamformers) ** 2 == pytest.approx(CFG.p_max)


def test_ula_baseline_runs_and_respects_power():
    _, users = _scene(2)
    sol = ula_baseline(users, 8, CFG)
    assert sol.sum_rate > 0.0
    assert np.sum([np.linalg.norm(v) ** 2 for v in sol.beamformers]) <= CFG.p_max * (
        1.0 + 1e-6
    )


def test_pinching_beats_ula_on_large_region():
    layout, users = _scene(3, m=4, p=4, side=20.0)
    pin = wmmse_bcd(layout, users, CFG)
    ula = ula_baseline(users, 4, CFG)
    assert pin.sum_rate > ula.sum_rate


def test_wmmse_rejects_empty_user_list():
    layout = WaveguideLayout(count=2, height=CFG.d_v, region_side=10.0)
    with pytest.raises(ValueError):
        wmmse_bcd(layout, [], CFG)
    with pytest.raises(ValueError):
        two_stage_mrt_wmmse(layout, [], CFG)
