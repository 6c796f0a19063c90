import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pinchsim.config import BlockageModel, Point3, SystemConfig
from pinchsim.siso import (
    asymptotic_rate_gap,
    expected_rate_gap_blockage,
    expected_rate_gap_los,
    grid_oracle_siso,
    max_region_side,
    monte_carlo_rate_gap,
    optimal_position_siso,
    optimal_x_closed_form,
    siso_snr,
)

CFG = SystemConfig()
LN2 = math.log(2.0)


def test_zero_attenuation_places_at_projection():
    assert optimal_x_closed_form(13.7, 50.0, 0.0, 80.0) == 13.7
    cfg0 = CFG.with_(alpha=0.0)
    user = Point3(13.7, 2.0, 0.0)
    sol = optimal_position_siso(user, cfg0, 80.0)
    assert sol.x_star == 13.7


def test_positive_attenuation_pulls_toward_feed():
    user = Point3(40.0, 3.0, 0.0)
    sol = optimal_position_siso(user, CFG, 80.0)
    assert 0.0 <= sol.x_star < user.x


def test_clamped_to_interval():
    assert optimal_x_closed_form(5.0, 1e9, CFG.alpha, 80.0) == 0.0
    assert optimal_x_closed_form(2.0, 10.0, 0.0, 1.0) == 1.0


def test_user_outside_interval_rejected():
    with pytest.raises(ValueError):
        optimal_position_siso(Point3(90.0, 0.0, 0.0), CFG, 80.0)


@settings(max_examples=60, deadline=None)
@given(
    x=st.floats(0.0, 80.0),
    y=st.floats(-40.0, 40.0),
    d_v=st.sampled_from([5.0, 10.0]),
)
def test_closed_form_matches_grid_oracle(x, y, d_v):
    cfg = CFG.with_(d_v=d_v)
    user = Point3(x, y, 0.0)
    closed = optimal_position_siso(user, cfg, 80.0)
    oracle = grid_oracle_siso(user, cfg, 80.0, step=1e-3)
    assert abs(closed.x_star - oracle.x_star) <= 2e-3
    assert closed.snr >= oracle.snr * (1.0 - 1e-9)


def test_snr_vectorized_matches_scalar():
    user = Point3(10.0, 2.0, 0.0)
    grid = np.array([0.0, 5.0, 10.0])
    vec = siso_snr(grid, user, CFG)
    for g, v in zip(grid, vec):
        assert float(siso_snr(float(g), user, CFG)) == pytest.approx(float(v))


def test_attenuation_flag_in_snr():
    user = Point3(10.0, 2.0, 0.0)
    on = float(siso_snr(10.0, user, CFG, include_attenuation=True))
    off = float(siso_snr(10.0, user, CFG, include_attenuation=False))
    assert off == pytest.approx(on * math.exp(2 * CFG.alpha * 10.0))


def test_expected_rate_gap_los_formula():
    rep = expected_rate_gap_los(CFG, 20.0)
    assert rep.regime == "los"
    expected = CFG.alpha**2 / LN2 * (400.0 / 12.0 + CFG.d_v**2)
    assert rep.gap == pytest.approx(expected)
    with pytest.raises(ValueError):
        expected_rate_gap_los(CFG, 0.0)


def test_max_region_side_is_inverse_of_gap():
    # Bisection oracle: largest D with expected_rate_gap_los(D) <= eps.
    cfg = CFG.with_(d_v=10.0)
    eps = 0.1
    d = max_region_side(cfg, eps)
    lo, hi = 1.0, 1000.0
    for _ in range(200):
        mid = (lo + hi) / 2.0
        if expected_rate_gap_los(cfg, mid).gap <= eps:
            lo = mid
        else:
            hi = mid
    assert d == pytest.approx(lo, abs=1e-6)
    assert expected_rate_gap_los(cfg, d).gap == pytest.approx(eps)


def test_max_region_side_rejects_infeasible_budget():
    cfg = CFG.with_(d_v=1000.0)
    with pytest.raises(ValueError):
        max_region_side(cfg, 1e-6)
    with pytest.raises(ValueError):
        max_region_side(CFG, 0.0)


def test_blockage_gap_approaches_asymptote():
    blockage = BlockageModel(beta=0.1)
    limit = asymptotic_rate_gap(CFG.alpha, 0.1)
    gap_small = expected_rate_gap_blockage(CFG, blockage, 10.0).gap
    gap_large = expected_rate_gap_blockage(CFG, blockage, 1e6).gap
    assert gap_small < gap_large <= limit
    assert gap_large == pytest.approx(limit, rel=1e-4)


def test_asymptotic_gap_validation():
    with pytest.raises(ValueError):
        asymptotic_rate_gap(-0.01, 0.1)
    with pytest.raises(ValueError):
        asymptotic_rate_gap(0.01, 0.0)


def test_monte_carlo_gap_close_to_analysis():
    mc = monte_carlo_rate_gap(CFG, 20.0, trials=200_000, seed=1)
    analytic = expected_rate_gap_los(CFG, 20.0).gap
    assert mc == pytest.approx(analytic, rel=0.1)


def test_monte_carlo_gap_zero_without_attenuation():
    cfg0 = CFG.with_(alpha=0.0)
    assert monte_carlo_rate_gap(cfg0, 20.0, trials=100) == 0.0


def test_monte_carlo_gap_is_seeded():
    a = monte_carlo_rate_gap(CFG, 20.0, trials=1000, seed=3)
    b = monte_carlo_rate_gap(CFG, 20.0, trials=1000, seed=3)
    assert a == b
