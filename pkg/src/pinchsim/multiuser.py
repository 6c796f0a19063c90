"""Multiuser service from a single pinch on a single waveguide.

Covers the max-min TDMA placement/power closed form and the two-user
CR-NOMA joint position / power-split design, each with an independent
brute-force oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import rate_from_snr
from .config import Point3, SystemConfig

__all__ = [
    "InfeasibleError",
    "TdmaAllocation",
    "NomaSolution",
    "tdma_maxmin_closed_form",
    "tdma_maxmin_grid_oracle",
    "tdma_dynamic_sum_rate",
    "cr_noma_two_user",
    "noma_grid_oracle",
]


class InfeasibleError(RuntimeError):
    """Raised when a QoS-constrained problem has no feasible solution."""


@dataclass(frozen=True)
class TdmaAllocation:
    x_star: float
    powers: tuple
    snrs: tuple
    min_rate: float


@dataclass(frozen=True)
class NomaSolution:
    x_star: float
    alpha_p: float
    alpha_s: float
    secondary_rate: float
    primary_rate: float


# ---------------------------------------------------------------------------
# TDMA max-min fairness, one shared pinch position
# ---------------------------------------------------------------------------

def tdma_maxmin_closed_form(
    users: list[Point3], cfg: SystemConfig, p_max: float | None = None
) -> TdmaAllocation:
    """Max-min optimal shared placement and per-user powers.

    The optimal position is the arithmetic mean of the users' x-coordinates
    (independent of their distances to the waveguide); powers are allocated
    proportionally to each user's total path loss, which equalizes all SNRs.
    """
    if not users:
        raise ValueError("need at least one user")
    p_max = cfg.p_max if p_max is None else p_max
    xs = np.array([u.x for u in users])
    taus = np.array([(np.mean(xs) - u.x) ** 2 + u.y**2 + cfg.d_v**2 for u in users])
    x_star = float(np.mean(xs))
    powers = taus / taus.sum() * p_max
    snrs = powers * cfg.eta / (taus * cfg.noise_power)
    return TdmaAllocation(
        x_star=x_star,
        powers=tuple(float(p) for p in powers),
        snrs=tuple(float(s) for s in snrs),
        min_rate=rate_from_snr(float(snrs.min())),
    )


def tdma_maxmin_grid_oracle(
    users: list[Point3], cfg: SystemConfig, p_max: float | None = None, step: float = 1e-3
) -> TdmaAllocation:
    """Brute-force check: sweep the shared position on a grid; at each grid
    point the equal-SNR power split is optimal, so the min rate reduces to
    the common rate log2(1 + P*eta / (sigma^2 * sum tau_m))."""
    p_max = cfg.p_max if p_max is None else p_max
    xs = np.array([u.x for u in users])
    Cs = np.array([u.y**2 + cfg.d_v**2 for u in users])
    lo, hi = float(xs.min()), float(xs.max())
    grid = np.arange(lo, hi + step / 2, step) if hi > lo else np.array([lo])
    tau_sum = ((grid[:, None] - xs[None, :]) ** 2 + Cs[None, :]).sum(axis=1)
    i = int(np.argmin(tau_sum))
    x_star = float(grid[i])
    taus = (x_star - xs) ** 2 + Cs
    powers = taus / taus.sum() * p_max
    snrs = powers * cfg.eta / (taus * cfg.noise_power)
    return TdmaAllocation(
        x_star=x_star,
        powers=tuple(float(p) for p in powers),
        snrs=tuple(float(s) for s in snrs),
        min_rate=rate_from_snr(float(snrs.min())),
    )


def tdma_dynamic_sum_rate(users: list[Point3], cfg: SystemConfig) -> float:
    """Sum rate of TDMA with equal time shares and the pinch repositioned to
    each scheduled user's own optimum (alpha-aware closed form)."""
    from .siso import optimal_position_siso

    M = len(users)
    D = max(u.x for u in users) + 1.0
    total = 0.0
    for u in users:
        placement = optimal_position_siso(u, cfg, D)
        total += placement.rate / M
    return total


# ---------------------------------------------------------------------------
# Two-user CR-NOMA: joint position and power split
# ---------------------------------------------------------------------------

def _min_alpha_p(tau_p, tau_s, pe, g, s2p, s2s):
    """Smallest power fraction for the primary satisfying both the primary
    QoS and the secondary SIC constraint at the given path losses."""
    gp = g * (pe + tau_p * s2p) / ((1.0 + g) * pe)
    gs = g * (pe + tau_s * s2s) / ((1.0 + g) * pe)
    return np.maximum(gp, gs)


def _noma_candidates(xp, xs, Cp, Cs, pe, g, s2p, s2s):
    """Candidate positions covering every KKT point of the reduced 1-D
    problem: the secondary projection, stationary points of the
    primary-binding branch, branch-switch points, and the boundary-active
    points used by the case analysis."""
    cands = [xs, xp]
    # Stationary points of (pe - g*s2p*tau_p(x)) / tau_s(x): cubic in x.
    tau_p = np.poly1d([1.0, -2.0 * xp, xp * xp + Cp])
    tau_s = np.poly1d([1.0, -2.0 * xs, xs * xs + Cs])
    numer = -g * s2p * tau_p.deriv() * tau_s - (pe - g * s2p * tau_p) * tau_s.deriv()
    for r in np.roots(numer):
        if abs(r.imag) < 1e-9:
            cands.append(float(r.real))
    # Branch switch: s2p * tau_p(x) = s2s * tau_s(x).
    for r in np.roots(s2p * tau_p - s2s * tau_s):
        if abs(getattr(r, "imag", 0.0)) < 1e-9:
            cands.append(float(np.real(r)))
    # Boundary-active candidates of the closed-form case analysis.
    a_star = max(
        (pe * g + Cp * s2p * g) / (pe + pe * g),
        (pe * g + Cs * s2s * g) / (pe + pe * g),
    )
    for x0, C0, s20 in ((xp, Cp, s2p), (xs, Cs, s2s)):
        beta_sq = ((1.0 + g) * a_star - g) * pe / (g * s20) - C0
        if beta_sq >= 0.0:
            b = math.sqrt(beta_sq)
            cands.extend([x0 - b, x0 + b])
    return cands


def cr_noma_two_user(
    primary: Point3,
    secondary: Point3,
    gamma_p: float,
    cfg: SystemConfig,
    sigma_p2: float | None = None,
    sigma_s2: float | None = None,
    p_max: float | None = None,
) -> NomaSolution:
    """Globally optimal pinch position and power split maximizing the
    secondary rate under the primary QoS and SIC constraints.

    Case structure: infeasible when P*eta falls below the QoS threshold of
    either user at its own projection; exactly at the threshold all power
    goes to the primary; otherwise the secondary rate is maximized by
    enumerating every stationary / boundary candidate of the reduced 1-D
    problem (the minimal feasible primary fraction is unique per position).
    """
    if gamma_p <= 0:
        raise ValueError("primary SINR threshold must be positive")
    p_max = cfg.p_max if p_max is None else p_max
    s2p = cfg.noise_power if sigma_p2 is None else sigma_p2
    s2s = cfg.noise_power if sigma_s2 is None else sigma_s2
    pe = p_max * cfg.eta
    g = gamma_p
    xp, xs = primary.x, secondary.x
    Cp = primary.y**2 + cfg.d_v**2
    Cs = secondary.y**2 + cfg.d_v**2

    thr_p, thr_s = g * Cp * s2p, g * Cs * s2s
    thr = max(thr_p, thr_s)
    if pe < thr:
        raise InfeasibleError(
            "primary QoS unreachable even with all power at the best position"
        )
    if pe == thr:
        x0 = xp if thr_p >= thr_s else xs
        tau_p0 = (x0 - xp) ** 2 + Cp
        return NomaSolution(
            x_star=x0,
            alpha_p=1.0,
            alpha_s=0.0,
            secondary_rate=0.0,
            primary_rate=rate_from_snr(pe / (tau_p0 * s2p)),
        )

    best = None
    for x in _noma_candidates(xp, xs, Cp, Cs, pe, g, s2p, s2s):
        tau_p = (x - xp) ** 2 + Cp
        tau_s = (x - xs) ** 2 + Cs
        a = float(_min_alpha_p(tau_p, tau_s, pe, g, s2p, s2s))
        if a > 1.0:
            continue
        val = (1.0 - a) * pe / (tau_s * s2s)
        key = (val, -x)
        if best is None or key > best[0]:
            best = (key, x, a, val)
    if best is None:
        # The power split cannot protect the primary anywhere along the
        # waveguide (users too far apart for the SIC constraint).
        raise InfeasibleError("no position satisfies both QoS constraints")
    _, x_star, alpha_p, snr_s = best
    alpha_s = 1.0 - alpha_p
    tau_p = (x_star - xp) ** 2 + Cp
    sinr_p = alpha_p * pe / (alpha_s * pe + tau_p * s2p)
    return NomaSolution(
        x_star=float(x_star),
        alpha_p=float(alpha_p),
        alpha_s=float(alpha_s),
        secondary_rate=rate_from_snr(snr_s),
        primary_rate=rate_from_snr(sinr_p),
    )


def noma_grid_oracle(
    primary: Point3,
    secondary: Point3,
    gamma_p: float,
    cfg: SystemConfig,
    sigma_p2: float | None = None,
    sigma_s2: float | None = None,
    p_max: float | None = None,
    x_step: float = 1e-3,
    alpha_step: float = 1e-4,
) -> NomaSolution:
    """Exhaustive feasible maximization over the discretized (x, alpha_p)
    box.  For each grid position only the smallest feasible grid alpha_p can
    win (the objective is decreasing in alpha_p), which makes the scan
    equivalent to the full 2-D enumeration."""
    if x_step <= 0 or alpha_step <= 0:
        raise ValueError("grid resolutions must be positive")
    p_max = cfg.p_max if p_max is None else p_max
    s2p = cfg.noise_power if sigma_p2 is None else sigma_p2
    s2s = cfg.noise_power if sigma_s2 is None else sigma_s2
    pe = p_max * cfg.eta
    g = gamma_p
    xp, xs = primary.x, secondary.x
    Cp = primary.y**2 + cfg.d_v**2
    Cs = secondary.y**2 + cfg.d_v**2

    lo, hi = min(xp, xs), max(xp, xs)
    grid = np.arange(lo, hi + x_step / 2, x_step) if hi > lo else np.array([lo])
    tau_p = (grid - xp) ** 2 + Cp
    tau_s = (grid - xs) ** 2 + Cs
    a_min = _min_alpha_p(tau_p, tau_s, pe, g, s2p, s2s)
    a_grid = np.ceil(a_min / alpha_step - 1e-12) * alpha_step
    ok = a_grid <= 1.0
    if not np.any(ok):
        raise InfeasibleError("no feasible grid point")
    val = np.where(ok, (1.0 - a_grid) * pe / (tau_s * s2s), -np.inf)
    i = int(np.argmax(val))
    alpha_p = float(a_grid[i])
    sinr_p = alpha_p * pe / ((1.0 - alpha_p) * pe + tau_p[i] * s2p)
    return NomaSolution(
        x_star=float(grid[i]),
        alpha_p=alpha_p,
        alpha_s=1.0 - alpha_p,
        secondary_rate=rate_from_snr(float(val[i])),
        primary_rate=rate_from_snr(float(sinr_p)),
    )
