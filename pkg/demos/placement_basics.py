"""Where should a single pinch sit?

Walks through the closed-form single-user placement: without in-waveguide
attenuation the pinch goes to the user's projection onto the waveguide, with
attenuation it slides toward the feed, and past a critical distance it stays
at the feed entirely.  Ends with the region-size rule that tells you how big
a service area can get before ignoring attenuation starts to cost real rate.

Run: python3 demos/placement_basics.py
"""

import numpy as np

from pinchsim import (
    Point3,
    SystemConfig,
    expected_rate_gap_los,
    grid_oracle_siso,
    max_region_side,
    monte_carlo_rate_gap,
    optimal_position_siso,
)

cfg = SystemConfig()
D = 80.0

print("== single-user placement ==")
for xbar in (5.0, 30.0, 60.0):
    user = Point3(xbar, 4.0, 0.0)
    sol = optimal_position_siso(user, cfg, D)
    oracle = grid_oracle_siso(user, cfg, D)
    pull = xbar - sol.x_star
    print(
        f"user at x = {xbar:5.1f} m -> pinch at {sol.x_star:7.3f} m "
        f"(pulled {pull:5.3f} m toward the feed), rate {sol.rate:.3f} bps/Hz, "
        f"grid check {oracle.x_star:7.3f} m"
    )

print()
print("== does the pull matter? ==")
# The mean rate lost by pretending alpha = 0 grows with the region size.
for side in (10.0, 40.0, 92.0, 120.0):
    analytic = expected_rate_gap_los(cfg, side).gap
    empirical = monte_carlo_rate_gap(cfg, side, trials=50_000, seed=0)
    print(
        f"D = {side:5.1f} m: mean rate gap {analytic:.5f} bps/Hz "
        f"(Monte Carlo {empirical:.5f})"
    )

eps = 0.1
side = max_region_side(cfg.with_(d_v=10.0), eps)
print()
print(
    f"with d_v = 10 m, keeping the mean gap under {eps} bps/Hz allows regions "
    f"up to D = {side:.2f} m"
)
