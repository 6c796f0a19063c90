"""Arrays of pinches on a single waveguide.

Two-stage placement (path-loss grid, then per-pinch phase alignment),
max-min TDMA with optimal time shares, and the two-user NOMA block
coordinate descent with safeguarded position updates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .channel import channel_array, rate_from_snr
from .config import Point3, SystemConfig
from .multiuser import InfeasibleError, cr_noma_two_user

__all__ = [
    "ArrayPlacement",
    "TimeShares",
    "TdmaArrayResult",
    "NomaArrayResult",
    "stage1_min_pathloss",
    "stage2_phase_align",
    "tdma_array_maxmin",
    "noma_array_bcd",
]

TWO_PI = 2.0 * math.pi
LN2 = math.log(2.0)


@dataclass(frozen=True)
class ArrayPlacement:
    positions: tuple
    spacing_floor: float
    achieved_snr: float
    aligned: bool = False
    degraded: bool = False


@dataclass(frozen=True)
class TimeShares:
    shares: tuple
    horizon: float


@dataclass(frozen=True)
class TdmaArrayResult:
    placement: ArrayPlacement
    shares: TimeShares
    min_rate: float
    converged: bool
    history: tuple = field(default=())


@dataclass(frozen=True)
class NomaArrayResult:
    placement: ArrayPlacement
    alpha_p: float
    alpha_s: float
    secondary_rate: float
    converged: bool
    history: tuple = field(default=())


def _array_snr(positions, user, cfg, p_max, include_attenuation=False):
    """Received SNR with the power budget split evenly across the pinches."""
    n = len(positions)
    h = channel_array(positions, user, cfg, include_attenuation)
    return p_max / n * abs(h) ** 2 / cfg.noise_power


def _grid_positions(center, n, delta, bounds):
    """Delta-spaced grid of n positions centered at `center`, shifted (not
    squeezed) to fit in bounds."""
    lo, hi = bounds
    span = (n - 1) * delta
    if span > hi - lo:
        raise InfeasibleError("spacing floor does not fit in the position bounds")
    start = center - span / 2.0
    start = min(max(start, lo), hi - span)
    return start + delta * np.arange(n)


def stage1_min_pathloss(
    user: Point3,
    cfg: SystemConfig,
    n: int,
    delta: float | None = None,
    bounds: tuple = (0.0, float("inf")),
    p_max: float | None = None,
) -> ArrayPlacement:
    """Path-loss-optimal array: a delta-spaced grid centered at the user's
    x-coordinate.  The per-pinch path loss is unimodal and even about xbar,
    so among spacing-feasible sets the tightly packed, centered grid
    maximizes the summed amplitudes."""
    if n < 1:
        raise ValueError("need at least one pinch")
    delta = cfg.wavelength / 2.0 if delta is None else delta
    if delta <= 0:
        raise ValueError("spacing floor must be positive")
    p_max = cfg.p_max if p_max is None else p_max
    positions = _grid_positions(user.x, n, delta, bounds)
    snr = _array_snr(positions, user, cfg, p_max)
    return ArrayPlacement(
        positions=tuple(float(x) for x in positions),
        spacing_floor=delta,
        achieved_snr=float(snr),
    )


def _total_phase(x, xbar, C, cfg):
    """In-waveguide plus free-space phase of a pinch at x toward the user."""
    return (
        TWO_PI * np.sqrt((x - xbar) ** 2 + C) / cfg.wavelength
        + TWO_PI * x / cfg.guided_wavelength
    )


def _phase_root(target, guess, xbar, C, cfg):
    """Solve _total_phase(x) = target near the guess.  The phase is strictly
    increasing in x (slope at least 2*pi*(n_eff - 1)/lambda), so a short
    bracket expansion around the guess always captures the root."""
    f = lambda x: _total_phase(x, xbar, C, cfg) - target
    step = cfg.guided_wavelength
    lo, hi = guess - step, guess + step
    while f(lo) > 0.0:
        lo -= step
    while f(hi) < 0.0:
        hi += step
    return brentq(f, lo, hi, xtol=1e-15)


def stage2_phase_align(
    placement: ArrayPlacement,
    user: Point3,
    cfg: SystemConfig,
    x_max: float = float("inf"),
    p_max: float | None = None,
) -> ArrayPlacement:
    """Perturb pinches 2..N so every per-pinch phase matches pinch 1 modulo
    2*pi, making the array sum fully coherent.

    For each pinch the 2*pi branch with the smallest shift is taken; if the
    shifted position would break the spacing floor against its left
    neighbor, the search widens to the next branch upward.  If no aligned
    position fits below x_max the stage-1 placement is returned with the
    degraded flag set.
    """
    p_max = cfg.p_max if p_max is None else p_max
    xs = list(placement.positions)
    if len(xs) == 1:
        return ArrayPlacement(
            positions=placement.positions,
            spacing_floor=placement.spacing_floor,
            achieved_snr=placement.achieved_snr,
            aligned=True,
        )
    xbar, C = user.x, user.y**2 + cfg.d_v**2
    psi = _total_phase(xs[0], xbar, C, cfg)
    delta = placement.spacing_floor
    out = [xs[0]]
    for x0 in xs[1:]:
        floor = out[-1] + delta
        k_near = round((_total_phase(x0, xbar, C, cfg) - psi) / TWO_PI)
        k_low = math.ceil((_total_phase(floor, xbar, C, cfg) - psi) / TWO_PI - 1e-12)
        best = None
        for k in (k_near - 1, k_near, k_near + 1, k_low):
            if k < k_low:
                continue
            x = _phase_root(psi + TWO_PI * k, x0, xbar, C, cfg)
            if x < floor - 1e-12:
                continue
            if best is None or abs(x - x0) < abs(best - x0):
                best = x
        if best is None or best > x_max:
            return ArrayPlacement(
                positions=placement.positions,
                spacing_floor=placement.spacing_floor,
                achieved_snr=placement.achieved_snr,
                aligned=False,
                degraded=True,
            )
        out.append(best)
    snr = _array_snr(out, user, cfg, p_max)
    return ArrayPlacement(
        positions=tuple(out),
        spacing_floor=delta,
        achieved_snr=float(snr),
        aligned=True,
    )


def aligned_array(
    center_user: Point3,
    cfg: SystemConfig,
    n: int,
    delta: float | None = None,
    bounds: tuple = (0.0, float("inf")),
    p_max: float | None = None,
) -> ArrayPlacement:
    """Convenience: stage-1 grid at the user followed by phase alignment."""
    s1 = stage1_min_pathloss(center_user, cfg, n, delta, bounds, p_max)
    return stage2_phase_align(s1, center_user, cfg, x_max=bounds[1], p_max=p_max)


# ---------------------------------------------------------------------------
# Max-min TDMA over an array: time shares + position refinement
# ---------------------------------------------------------------------------

def _share_for_rate(a: float, rate: float) -> float:
    """Smallest t with t*log2(1 + a/t) = rate, by safeguarded Newton.

    The left side increases from 0 to a/ln2, so the root exists iff
    rate < a/ln2; returns inf otherwise.
    """
    if rate <= 0.0:
        return 0.0
    if rate >= a / LN2:
        return math.inf
    g = lambda t: t * math.log2(1.0 + a / t) - rate
    # Bracket by doubling, then Newton with bisection fallback.
    hi = max(rate / math.log2(1.0 + a), 1e-12)
    while g(hi) < 0.0:
        hi *= 2.0
    lo = 0.0
    t = hi
    for _ in range(100):
        gt = g(t)
        if abs(gt) < 1e-15 * max(rate, 1.0):
            break
        if gt > 0.0:
            hi = t
        else:
            lo = t
        dg = math.log2(1.0 + a / t) - a / ((t + a) * LN2)
        t_new = t - gt / dg if dg > 0.0 else (lo + hi) / 2.0
        t = t_new if lo < t_new < hi else (lo + hi) / 2.0
    return t


def maxmin_time_shares(a: np.ndarray, horizon: float = 1.0) -> tuple:
    """Optimal time shares equalizing all user rates under sum(t) <= T.

    Bisection on the common rate level; per-user minimal shares from
    _share_for_rate; leftover time is spread proportionally so the shares
    sum to the horizon exactly.
    """
    a = np.asarray(a, dtype=float)
    if np.any(a <= 0.0):
        raise ValueError("per-user SNR coefficients must be positive")
    m = a.size
    lo = float(min(horizon / m * math.log2(1.0 + ai * m / horizon) for ai in a))
    hi = float(a.min() / LN2) * (1.0 - 1e-15)

    def feasible(rate):
        total = 0.0
        for ai in a:
            total += _share_for_rate(float(ai), rate)
            if total > horizon:
                return False
        return True

    for _ in range(200):
        mid = (lo + hi) / 2.0
        if feasible(mid):
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-14 * max(lo, 1.0):
            break
    rate = lo
    t = np.array([_share_for_rate(float(ai), rate) for ai in a])
    t *= horizon / t.sum()
    rates = t * np.log2(1.0 + a / t)
    return t, float(rates.min())


def _tdma_objective(positions, users, cfg, p_max, horizon):
    a = np.array([_array_snr(positions, u, cfg, p_max) for u in users])
    _, rate = maxmin_time_shares(a, horizon)
    return rate


def _refine_positions(positions, objective, delta, bounds, max_iter=15):
    """Safeguarded first-order refinement: finite-difference ascent with
    trust-region halving, accepting only steps that improve the true
    objective and keep the spacing floor."""
    x = np.asarray(positions, dtype=float)
    best = objective(x)
    trust = delta / 4.0
    fd = 1e-7
    history = [best]
    for _ in range(max_iter):
        grad = np.zeros_like(x)
        for i in range(x.size):
            xp = x.copy()
            xp[i] += fd
            grad[i] = (objective(xp) - best) / fd
        norm = np.linalg.norm(grad)
        if norm == 0.0:
            break
        improved = False
        step = trust
        while step > 1e-9:
            cand = x + step * grad / norm
            ok = (
                cand[0] >= bounds[0]
                and cand[-1] <= bounds[1]
                and np.all(np.diff(cand) >= delta - 1e-12)
            )
            if ok:
                val = objective(cand)
                if val > best:
                    x, best = cand, val
                    improved = True
                    break
            step /= 2.0
        history.append(best)
        if not improved:
            trust /= 2.0
            if trust < 1e-9:
                break
    return x, best, history


def tdma_array_maxmin(
    users: list[Point3],
    cfg: SystemConfig,
    n: int,
    delta: float | None = None,
    horizon: float = 1.0,
    p_max: float | None = None,
    bounds: tuple | None = None,
    max_outer: int = 15,
) -> TdmaArrayResult:
    """Max-min rate TDMA with one shared pinch array.

    Alternates a safeguarded position step with the exact time-share
    bisection; the minimum rate never decreases.  Multi-start over arrays
    aligned to each user and to the mean user position.
    """
    if not users:
        raise ValueError("need at least one user")
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    delta = cfg.wavelength / 2.0 if delta is None else delta
    p_max = cfg.p_max if p_max is None else p_max
    if bounds is None:
        bounds = (0.0, max(u.x for u in users) + n * delta + 1.0)

    def objective(pos):
        return _tdma_objective(pos, users, cfg, p_max, horizon)

    centers = [u for u in users]
    if len(users) > 1:
        mean_x = float(np.mean([u.x for u in users]))
        mean_y = float(np.mean([u.y for u in users]))
        centers.append(Point3(mean_x, mean_y, 0.0))
    starts = [aligned_array(c, cfg, n, delta, bounds, p_max) for c in centers]

    if len(users) == 1:
        placement = starts[0]
        a = np.array([_array_snr(placement.positions, users[0], cfg, p_max)])
        t, rate = maxmin_time_shares(a, horizon)
        return TdmaArrayResult(
            placement=placement,
            shares=TimeShares(shares=(float(t[0]),), horizon=horizon),
            min_rate=rate,
            converged=True,
            history=(rate,),
        )

    best = None
    for start in starts:
        pos, val, hist = _refine_positions(
            start.positions, objective, delta, bounds, max_iter=max_outer
        )
        if best is None or val > best[1]:
            best = (pos, val, hist)
    pos, val, hist = best
    a = np.array([_array_snr(pos, u, cfg, p_max) for u in users])
    t, rate = maxmin_time_shares(a, horizon)
    snr = p_max / n * max(abs(channel_array(pos, u, cfg, False)) ** 2 for u in users)
    placement = ArrayPlacement(
        positions=tuple(float(x) for x in pos),
        spacing_floor=delta,
        achieved_snr=float(snr / cfg.noise_power),
        aligned=False,
    )
    converged = len(hist) < 2 or (hist[-1] - hist[-2]) <= 1e-6 * max(hist[-1], 1e-30)
    return TdmaArrayResult(
        placement=placement,
        shares=TimeShares(shares=tuple(float(x) for x in t), horizon=horizon),
        min_rate=rate,
        converged=converged,
        history=tuple(hist),
    )


# ---------------------------------------------------------------------------
# Two-user NOMA over an array: BCD between power split and positions
# ---------------------------------------------------------------------------

def _noma_power_step(positions, primary, secondary, gamma_p, cfg, s2p, s2s, p_max):
    """Closed-form minimal primary power fraction at fixed positions, or None
    when even the full budget cannot meet the QoS there."""
    n = len(positions)
    g = gamma_p
    alphas = []
    for user, s2 in ((primary, s2p), (secondary, s2s)):
        h2 = abs(channel_array(positions, user, cfg, False)) ** 2
        alphas.append(g / (1.0 + g) + g * n * s2 / ((1.0 + g) * p_max * h2))
    alpha_p = max(alphas)
    return None if alpha_p > 1.0 else alpha_p


def _noma_rate(positions, primary, secondary, gamma_p, cfg, s2p, s2s, p_max):
    alpha_p = _noma_power_step(
        positions, primary, secondary, gamma_p, cfg, s2p, s2s, p_max
    )
    if alpha_p is None:
        return -math.inf, None
    n = len(positions)
    h2s = abs(channel_array(positions, secondary, cfg, False)) ** 2
    snr_s = (1.0 - alpha_p) * p_max * h2s / (n * s2s)
    return rate_from_snr(snr_s), alpha_p


def noma_array_bcd(
    primary: Point3,
    secondary: Point3,
    cfg: SystemConfig,
    n: int,
    gamma_p: float,
    delta: float | None = None,
    sigma_p2: float | None = None,
    sigma_s2: float | None = None,
    p_max: float | None = None,
    bounds: tuple | None = None,
    max_outer: int = 15,
) -> NomaArrayResult:
    """Two-user NOMA with a shared pinch array: closed-form power split
    alternated with a safeguarded position step on the secondary rate.

    Multi-start over arrays aligned at the secondary, the primary, and the
    single-pinch joint optimum, so n = 1 recovers the closed-form solver.
    """
    if gamma_p <= 0:
        raise ValueError("primary SINR threshold must be positive")
    delta = cfg.wavelength / 2.0 if delta is None else delta
    p_max = cfg.p_max if p_max is None else p_max
    s2p = cfg.noise_power if sigma_p2 is None else sigma_p2
    s2s = cfg.noise_power if sigma_s2 is None else sigma_s2
    if bounds is None:
        bounds = (0.0, max(primary.x, secondary.x) + n * delta + 1.0)

    centers = [(secondary, secondary), (primary, secondary)]
    try:
        joint = cr_noma_two_user(
            primary, secondary, gamma_p, cfg, s2p, s2s, p_max
        )
        centers.append((Point3(joint.x_star, secondary.y, 0.0), secondary))
    except InfeasibleError:
        pass

    def objective(pos):
        return _noma_rate(pos, primary, secondary, gamma_p, cfg, s2p, s2s, p_max)[0]

    best = None
    for center, align_to in centers:
        s1 = stage1_min_pathloss(center, cfg, n, delta, bounds, p_max)
        start = stage2_phase_align(s1, align_to, cfg, x_max=bounds[1], p_max=p_max)
        if objective(start.positions) == -math.inf:
            continue
        pos, val, hist = _refine_positions(
            start.positions, objective, delta, bounds, max_iter=max_outer
        )
        if best is None or val > best[1]:
            best = (pos, val, hist)
    if best is None:
        raise InfeasibleError("primary QoS unreachable at every tried placement")
    pos, val, hist = best
    rate, alpha_p = _noma_rate(pos, primary, secondary, gamma_p, cfg, s2p, s2s, p_max)
    snr = p_max / n * abs(channel_array(pos, secondary, cfg, False)) ** 2 / s2s
    placement = ArrayPlacement(
        positions=tuple(float(x) for x in pos),
        spacing_floor=delta,
        achieved_snr=float(snr),
    )
    converged = len(hist) < 2 or (hist[-1] - hist[-2]) <= 1e-6 * max(hist[-1], 1e-30)
    return NomaArrayResult(
        placement=placement,
        alpha_p=float(alpha_p),
        alpha_s=float(1.0 - alpha_p),
        secondary_rate=float(rate),
        converged=converged,
        history=tuple(hist),
    )
