"""Single-user, single-pinch placement and the attenuation rate-gap analysis.

The placement problem maximizes rho*eta / ((x - xbar)^2 + C) / exp(2*alpha*x)
over the pinch position x in [0, D], with C = ybar^2 + d_v^2.  It admits a
closed-form maximizer; a 1-D grid search is kept alongside as an independent
oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import rate_from_snr
from .config import BlockageModel, Point3, Region, SystemConfig

__all__ = [
    "SisoPlacement",
    "RateGapReport",
    "optimal_x_closed_form",
    "optimal_position_siso",
    "siso_snr",
    "grid_oracle_siso",
    "expected_rate_gap_los",
    "max_region_side",
    "expected_rate_gap_blockage",
    "asymptotic_rate_gap",
    "monte_carlo_rate_gap",
]

LN2 = math.log(2.0)


@dataclass(frozen=True)
class SisoPlacement:
    x_star: float
    snr: float
    rate: float


@dataclass(frozen=True)
class RateGapReport:
    gap: float
    regime: str  # "los", "blockage" or "asymptotic"


def siso_snr(x, user: Point3, cfg: SystemConfig, include_attenuation=True):
    """Received SNR for pinch position(s) x, vectorized over x."""
    x = np.asarray(x, dtype=float)
    path = (x - user.x) ** 2 + user.y**2 + cfg.d_v**2
    if include_attenuation:
        path = path * np.exp(2.0 * cfg.alpha * x)
    return cfg.rho * cfg.eta / path


def optimal_x_closed_form(xbar: float, C: float, alpha: float, D: float) -> float:
    """Closed-form maximizer of 1 / (((x - xbar)^2 + C) * exp(2*alpha*x)) on
    [0, D].

    For alpha = 0 the optimum is xbar.  Otherwise the objective has at most
    one interior local maximum, at xbar + (-1 + sqrt(1 - 4 alpha^2 C)) /
    (2 alpha); the global optimum is that point or the feed at x = 0,
    whichever scores higher (the feed wins whenever attenuation dominates,
    and always when 4 alpha^2 C >= 1, where no stationary point exists).
    """
    if alpha == 0.0:
        return min(max(xbar, 0.0), D)
    disc = 1.0 - 4.0 * alpha * alpha * C

    def value(x):
        return math.exp(-2.0 * alpha * x) / ((x - xbar) ** 2 + C)

    if disc < 0.0:
        return 0.0
    x_plus = min(max(xbar + (-1.0 + math.sqrt(disc)) / (2.0 * alpha), 0.0), D)
    return x_plus if value(x_plus) >= value(0.0) else 0.0


def optimal_position_siso(user: Point3, cfg: SystemConfig, D: float) -> SisoPlacement:
    """Closed-form SNR-optimal pinch position, clamped to [0, D]."""
    if not 0.0 <= user.x <= D:
        raise ValueError("user x-coordinate must lie in [0, D]")
    C = user.y**2 + cfg.d_v**2
    x_star = optimal_x_closed_form(user.x, C, cfg.alpha, D)
    snr = float(siso_snr(x_star, user, cfg))
    return SisoPlacement(x_star=x_star, snr=snr, rate=rate_from_snr(snr))


def grid_oracle_siso(
    user: Point3, cfg: SystemConfig, D: float, step: float = 1e-3
) -> SisoPlacement:
    """Independent brute-force check: maximize the SNR on a uniform grid."""
    grid = np.arange(0.0, D + step / 2, step)
    snrs = siso_snr(grid, user, cfg)
    i = int(np.argmax(snrs))
    return SisoPlacement(
        x_star=float(grid[i]), snr=float(snrs[i]), rate=rate_from_snr(float(snrs[i]))
    )


def expected_rate_gap_los(cfg: SystemConfig, D: float) -> RateGapReport:
    """Mean rate lost by placing the pinch as if alpha were zero, user uniform
    over a D x D square under pure LoS: (alpha^2/ln 2)(D^2/12 + d_v^2)."""
    if D <= 0:
        raise ValueError("region side must be positive")
    gap = cfg.alpha**2 / LN2 * (D * D / 12.0 + cfg.d_v**2)
    return RateGapReport(gap=gap, regime="los")


def max_region_side(cfg: SystemConfig, epsilon: float) -> float:
    """Largest square side D keeping the LoS placement rate gap below epsilon:
    sqrt(12 (eps ln2 / alpha^2 - d_v^2))."""
    if epsilon <= 0:
        raise ValueError("rate-loss budget must be positive")
    if cfg.alpha <= 0:
        raise ValueError("region-size rule needs a positive attenuation coefficient")
    inner = epsilon * LN2 / cfg.alpha**2 - cfg.d_v**2
    if inner < 0:
        raise ValueError(
            "no admissible region: the waveguide height alone exceeds the budget"
        )
    return math.sqrt(12.0 * inner)


def expected_rate_gap_blockage(
    cfg: SystemConfig, blockage: BlockageModel, D: float
) -> RateGapReport:
    """Mean placement rate gap in a probabilistic blockage environment with
    density beta, user uniform over a D x D square."""
    if D <= 0:
        raise ValueError("region side must be positive")
    b = blockage.beta
    root = math.sqrt(b * (1.0 + b * cfg.d_v**2))
    gap = (
        cfg.alpha**2
        / (b * LN2)
        * (
            1.0
            - 2.0
            / (D * root)
            * math.atan(math.sqrt(b) * (D / 2.0) / math.sqrt(1.0 + b * cfg.d_v**2))
        )
    )
    return RateGapReport(gap=gap, regime="blockage")


def asymptotic_rate_gap(alpha: float, beta: float) -> float:
    """Large-region limit of the blockage rate gap: alpha^2 / (beta ln 2)."""
    if alpha < 0:
        raise ValueError("attenuation coefficient must be non-negative")
    if beta <= 0:
        raise ValueError("blockage density must be positive")
    return alpha**2 / (beta * LN2)


def monte_carlo_rate_gap(
    cfg: SystemConfig, D: float, trials: int, seed: int = 0
) -> float:
    """Empirical mean of the placement rate gap: rate at the closed-form
    optimum minus rate at the alpha-ignoring placement x = xbar, both under
    the attenuated channel, user uniform over the D x D square."""
    rng = np.random.default_rng(seed)
    xs = rng.uniform(0.0, D, trials)
    ys = rng.uniform(-D / 2.0, D / 2.0, trials)
    a = cfg.alpha
    C = ys**2 + cfg.d_v**2
    # Vectorized closed form (alpha > 0 path).
    if a == 0.0:
        return 0.0

    def snr(x):
        return cfg.rho * cfg.eta / (((x - xs) ** 2 + C) * np.exp(2.0 * a * x))

    disc = 1.0 - 4.0 * a * a * C
    x_plus = np.clip(
        xs + (-1.0 + np.sqrt(np.clip(disc, 0.0, None))) / (2.0 * a), 0.0, D
    )
    # Global optimum is the interior stationary point or the feed.
    x_star = np.where((disc >= 0.0) & (snr(x_plus) >= snr(0.0)), x_plus, 0.0)

    delta = np.log2(1.0 + snr(x_star)) - np.log2(1.0 + snr(xs))
    return float(np.mean(delta))
