"""Two application studies: sensing-constrained rates and hybrid deployments.

The ISAC study serves one user while a separate set of receive waveguides
listens for a target echo; tightening the sensing floor steers the
beamformer (and eventually the pinch positions) toward the target and the
communication rate pays for it.  The cooperation study compares closed-form
SNRs of a conventional base station working with a pinching subsystem at
three levels of integration.

Run: python3 demos/sensing_and_cooperation.py
"""

import numpy as np

from pinchsim import (
    CoopConfig,
    IsacScene,
    Point3,
    SystemConfig,
    coop_best_scheme,
    coop_snr,
    isac_midpoint_baseline,
    isac_sweep,
    sensing_snr,
)
from pinchsim.isac import _tx_channel

cfg = SystemConfig()

print("== rate versus sensing floor ==")
offsets = tuple(np.linspace(-5.0, 5.0, 4))
scene = IsacScene(
    user=Point3(3.0, 2.0, 0.0),
    target=Point3(7.0, -1.0, 0.0),
    tx_offsets=offsets,
    rx_offsets=offsets,
    zeta=0.5,
    sensing_noise=cfg.noise_power,
)
# Reference: the strongest sensing SNR a midpoint placement can deliver.
mid = (scene.user.x + scene.target.x) / 2.0
h_t = _tx_channel([mid] * 4, scene.target, scene, cfg)
w_t = h_t.conj() / np.linalg.norm(h_t) * np.sqrt(cfg.p_max)
s_max = sensing_snr(w_t, [mid] * 4, scene, cfg)
print(f"max sensing SNR from the midpoint: {10 * np.log10(s_max):.1f} dB")

floors = [f * s_max for f in (0.1, 0.5, 0.9)]
for (floor, sol) in isac_sweep(scene, floors, cfg):
    from dataclasses import replace

    base = isac_midpoint_baseline(replace(scene, sensing_floor=floor), cfg)
    print(
        f"floor {floor / s_max:3.0%} of max: optimized {sol.comm_rate:.3f} "
        f"bps/Hz (theta = {sol.theta:.3f}), midpoint baseline "
        f"{base.comm_rate:.3f}"
    )

print()
print("== how much cooperation is worth ==")
coop = CoopConfig(n_b=8, p=4, n=16, l_b=120.0, l_g=15.0, gamma_t=cfg.rho)
for scheme, label in (
    ("BS_only", "base station alone"),
    ("SD", "standalone pinching (power split)"),
    ("SCD", "semi-cooperative (pinch-side CSI)"),
    ("FCD", "fully cooperative (joint CSI)"),
):
    snr = coop_snr(scheme, coop, cfg.eta)
    print(f"  {label:38s} {10 * np.log10(snr):7.2f} dB")
print(f"best scheme: {coop_best_scheme(coop, cfg.eta)}")
