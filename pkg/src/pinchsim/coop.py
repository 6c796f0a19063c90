"""Cooperative base-station plus pinching-antenna deployments.

Closed-form received SNRs of the four deployment modes: base station only,
standalone (SD), semi-cooperative (SCD), and fully cooperative (FCD).  The
base-station link is NLoS with exponent xi_b; the pinching link is LoS with
exponent xi_p.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["CoopConfig", "SCHEMES", "coop_snr", "coop_best_scheme"]

SCHEMES = ("BS_only", "SD", "SCD", "FCD")


@dataclass(frozen=True)
class CoopConfig:
    """Geometry and budget of one cooperative link.

    n_b: base-station antenna count; p: waveguide count; n: pinches per
    waveguide; l_b, l_g: BS-user and pinch-user distances [m]; xi_b, xi_p:
    path-loss exponents; gamma_t: transmit SNR P_max/sigma^2.
    """

    n_b: int
    p: int
    n: int
    l_b: float
    l_g: float
    gamma_t: float
    xi_b: float = 3.5
    xi_p: float = 2.0

    def __post_init__(self):
        if self.n_b < 1 or self.p < 1 or self.n < 1:
            raise ValueError("antenna and waveguide counts must be at least 1")
        if self.l_b <= 0 or self.l_g <= 0:
            raise ValueError("distances must be positive")
        if self.gamma_t <= 0:
            raise ValueError("transmit SNR must be positive")
        if self.xi_b < 2 or self.xi_p < 2:
            raise ValueError("path-loss exponents must be at least 2")


def coop_snr(scheme: str, coop: CoopConfig, eta: float) -> float:
    """Received SNR of the given deployment mode.

    SD and SCD split power in proportion to RF-chain counts (N_B vs P),
    which yields the (N_B + P) denominators; FCD pools all chains with full
    CSI and keeps both terms at full strength.
    """
    if eta <= 0:
        raise ValueError("Friis constant must be positive")
    bs_term = eta * coop.n_b / coop.l_b**coop.xi_b
    pin_base = eta * coop.n / coop.l_g**coop.xi_p
    denom = coop.n_b + coop.p
    if scheme == "BS_only":
        snr = bs_term
    elif scheme == "SD":
        snr = bs_term * coop.n_b / denom + pin_base * coop.p / denom
    elif scheme == "SCD":
        snr = bs_term * coop.n_b / denom + pin_base * coop.p**2 / denom
    elif scheme == "FCD":
        snr = bs_term + pin_base * coop.p
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    return snr * coop.gamma_t


def coop_best_scheme(coop: CoopConfig, eta: float) -> str:
    """Deployment mode with the highest received SNR; ties resolve toward
    deeper cooperation (FCD > SCD > SD > BS_only)."""
    values = {s: coop_snr(s, coop, eta) for s in SCHEMES}
    order = ("FCD", "SCD", "SD", "BS_only")
    best = max(values.values())
    for s in order:
        if values[s] == best:
            return s
    raise AssertionError("unreachable")
