"""Multi-waveguide MU-MISO: joint beamforming and per-waveguide placement.

One active pinch per waveguide; the P effective per-waveguide gains form the
user channels.  Sum-rate maximization runs as WMMSE block coordinate descent
with a per-waveguide position line search; a two-stage assignment heuristic
and a fixed half-wavelength ULA provide the comparison points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import Point3, SystemConfig, WaveguideLayout
from .siso import optimal_x_closed_form

__all__ = [
    "BeamformingSolution",
    "WmmseState",
    "wmmse_bcd",
    "two_stage_mrt_wmmse",
    "mrt_single_user",
    "ula_baseline",
    "sum_rate",
]

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class BeamformingSolution:
    positions: tuple
    beamformers: np.ndarray  # (M, P) rows are per-user beamformers
    sum_rate: float
    per_user_rates: tuple
    converged: bool = True
    history: tuple = field(default=())


@dataclass(frozen=True)
class WmmseState:
    receivers: np.ndarray
    weights: np.ndarray
    mse: np.ndarray


def _gain_grid(xs, user: Point3, y_offset: float, cfg: SystemConfig, att: bool):
    """Per-position effective gain of one waveguide toward one user,
    vectorized over candidate pinch positions xs."""
    xs = np.asarray(xs, dtype=float)
    d = np.sqrt((xs - user.x) ** 2 + (y_offset - user.y) ** 2 + cfg.d_v**2)
    g = (
        math.sqrt(cfg.eta)
        / d
        * np.exp(-1j * (TWO_PI * d / cfg.wavelength + TWO_PI * xs / cfg.guided_wavelength))
    )
    if att:
        g = g * np.exp(-cfg.alpha * xs)
    return g


def _channel_matrix(layout, positions, users, cfg, att):
    """(M, P) matrix of effective gains, one column per waveguide."""
    offsets = layout.y_offsets()
    h = np.empty((len(users), layout.count), dtype=complex)
    for p, (xp, yp) in enumerate(zip(positions, offsets)):
        for m, u in enumerate(users):
            h[m, p] = _gain_grid(np.array([xp]), u, float(yp), cfg, att)[0]
    return h


def sum_rate(h: np.ndarray, v: np.ndarray, noise_power: float) -> tuple:
    """Sum rate and per-user rates of the MU-MISO downlink with channels h
    (M, P) and beamformers v (M, P)."""
    # Received amplitude of stream k at user m is h_m^T v_k (rows of h and v
    # are plain vectors; no conjugation in the physical mixing).
    inner = h @ v.T
    power = np.abs(inner) ** 2
    sig = np.diag(power)
    interference = power.sum(axis=1) - sig
    sinr = sig / (interference + noise_power)
    rates = np.log2(1.0 + sinr)
    return float(rates.sum()), rates


def _mrt_equal_power(h: np.ndarray, p_max: float) -> np.ndarray:
    m = h.shape[0]
    v = h.conj() / np.linalg.norm(h, axis=1, keepdims=True)
    return v * math.sqrt(p_max / m)


def _wmmse_state(h, v, noise_power):
    inner = h @ v.T
    total = (np.abs(inner) ** 2).sum(axis=1) + noise_power
    u = np.diag(inner) / total
    e = 1.0 - np.abs(np.diag(inner)) ** 2 / total
    return WmmseState(receivers=u, weights=1.0 / e, mse=e)


def _beamformer_step(h, state, p_max):
    """Quadratic subproblem: v_k = (A + mu I)^{-1} b_k with the power
    multiplier mu found by bisection on the total-power constraint."""
    m, p = h.shape
    wu2 = state.weights * np.abs(state.receivers) ** 2
    A = (h.conj().T * wu2) @ h  # sum_m w_m |u_m|^2 conj(h_m) h_m^T
    B = (state.weights * state.receivers)[:, None] * h.conj()  # rows b_k

    def solve(mu):
        return np.linalg.solve(A + mu * np.eye(p), B.T).T

    try:
        v = solve(0.0)
        if (np.abs(v) ** 2).sum() <= p_max * (1.0 + 1e-12):
            return v
    except np.linalg.LinAlgError:
        # Rank-deficient A (fewer users than waveguides): the power
        # constraint is necessarily active, handled by the bisection below.
        pass
    lo, hi = 0.0, 1.0
    while (np.abs(solve(hi)) ** 2).sum() > p_max:
        hi *= 2.0
    for _ in range(100):
        mid = (lo + hi) / 2.0
        if (np.abs(solve(mid)) ** 2).sum() > p_max:
            lo = mid
        else:
            hi = mid
    return solve(hi)


def _beamformer_only_wmmse(h, cfg, p_max, max_cycles=100, tol=1e-7, v0=None):
    """Pure WMMSE over beamformers for a fixed channel matrix."""
    v = _mrt_equal_power(h, p_max) if v0 is None else v0
    best, _ = sum_rate(h, v, cfg.noise_power)
    history = [best]
    for _ in range(max_cycles):
        state = _wmmse_state(h, v, cfg.noise_power)
        v = _beamformer_step(h, state, p_max)
        cur, _ = sum_rate(h, v, cfg.noise_power)
        history.append(cur)
        if cur - best <= tol * max(abs(best), 1e-12):
            best = max(best, cur)
            break
        best = cur
    return v, history


def _position_step(layout, positions, users, v, cfg, att, x_max, coarse, fine):
    """Per-waveguide 1-D search of the sum rate: coarse grid over [0, x_max]
    plus local refinement, always keeping the incumbent as a candidate."""
    positions = list(positions)
    offsets = layout.y_offsets()
    m = len(users)
    for p in range(layout.count):
        grid = np.arange(0.0, x_max + coarse / 2, coarse)
        # Partial sums over the other waveguides: t[m, k].
        t = np.zeros((m, m), dtype=complex)
        for q in range(layout.count):
            if q == p:
                continue
            hq = np.array(
                [_gain_grid([positions[q]], u, float(offsets[q]), cfg, att)[0] for u in users]
            )
            t += hq[:, None] * v[:, q][None, :]

        def rates_on(xs):
            hp = np.stack(
                [_gain_grid(xs, u, float(offsets[p]), cfg, att) for u in users]
            )  # (M, X)
            inner = t[:, :, None] + hp[:, None, :] * v[:, p][None, :, None]
            power = np.abs(inner) ** 2  # (M, M, X)
            sig = power[np.arange(m), np.arange(m), :]
            interference = power.sum(axis=1) - sig
            return np.log2(1.0 + sig / (interference + cfg.noise_power)).sum(axis=0)

        cand = np.append(grid, positions[p])
        vals = rates_on(cand)
        x_best = float(cand[int(np.argmax(vals))])
        local = np.arange(
            max(0.0, x_best - coarse), min(x_max, x_best + coarse) + fine / 2, fine
        )
        local = np.append(local, [x_best, positions[p]])
        vals = rates_on(local)
        positions[p] = float(local[int(np.argmax(vals))])
    return positions


def _assign_positions(layout, users):
    """Stage-1 heuristic: pair waveguides with users by minimizing total
    |y_p - y_m| (rectangular assignment), then put each pinch at its
    assigned user's x-coordinate.  Unassigned waveguides fall back to their
    nearest user in y."""
    offsets = layout.y_offsets()
    cost = np.abs(offsets[:, None] - np.array([u.y for u in users])[None, :])
    try:
        from scipy.optimize import linear_sum_assignment

        rows, cols = linear_sum_assignment(cost)
        assigned = dict(zip(rows.tolist(), cols.tolist()))
    except Exception:
        assigned = {}
    positions = []
    for p in range(layout.count):
        m = assigned.get(p, int(np.argmin(cost[p])))
        positions.append(float(users[m].x))
    return positions


def wmmse_bcd(
    layout: WaveguideLayout,
    users: list[Point3],
    cfg: SystemConfig,
    p_max: float | None = None,
    include_attenuation: bool = False,
    x_max: float | None = None,
    max_cycles: int = 30,
    tol: float = 1e-5,
    coarse_step: float | None = None,
    fine_step: float = 1e-3,
    optimize_positions: bool = True,
) -> BeamformingSolution:
    """Sum-rate maximization by WMMSE block coordinate descent.

    Each cycle runs closed-form receiver and weight updates, the quadratic
    beamformer subproblem (power multiplier by bisection), and a
    per-waveguide position line search that always retains the incumbent,
    so the sum rate never decreases across cycles.
    """
    if not users:
        raise ValueError("need at least one user")
    p_max = cfg.p_max if p_max is None else p_max
    x_max = layout.region_side if x_max is None else x_max
    coarse = cfg.wavelength / 4.0 if coarse_step is None else coarse_step
    att = include_attenuation

    positions = _assign_positions(layout, users)
    h = _channel_matrix(layout, positions, users, cfg, att)
    v = _mrt_equal_power(h, p_max)
    best, _ = sum_rate(h, v, cfg.noise_power)
    history = [best]
    converged = False
    for _ in range(max_cycles):
        state = _wmmse_state(h, v, cfg.noise_power)
        v = _beamformer_step(h, state, p_max)
        if optimize_positions:
            positions = _position_step(
                layout, positions, users, v, cfg, att, x_max, coarse, fine_step
            )
            h = _channel_matrix(layout, positions, users, cfg, att)
        cur, _ = sum_rate(h, v, cfg.noise_power)
        history.append(cur)
        if cur - best <= tol * max(abs(best), 1e-12):
            best = max(best, cur)
            converged = True
            break
        best = cur
    # Final polish: beamformer-only WMMSE to convergence at fixed positions.
    v2, tail = _beamformer_only_wmmse(h, cfg, p_max, v0=v)
    if tail[-1] >= history[-1]:
        v = v2
        history.extend(tail[1:])
    total, rates = sum_rate(h, v, cfg.noise_power)
    return BeamformingSolution(
        positions=tuple(positions),
        beamformers=v,
        sum_rate=total,
        per_user_rates=tuple(float(r) for r in rates),
        converged=converged,
        history=tuple(history),
    )


def two_stage_mrt_wmmse(
    layout: WaveguideLayout,
    users: list[Point3],
    cfg: SystemConfig,
    p_max: float | None = None,
    include_attenuation: bool = False,
) -> BeamformingSolution:
    """Low-complexity variant: freeze positions with the assignment
    heuristic, then run WMMSE over beamformers only."""
    if not users:
        raise ValueError("need at least one user")
    p_max = cfg.p_max if p_max is None else p_max
    positions = _assign_positions(layout, users)
    h = _channel_matrix(layout, positions, users, cfg, include_attenuation)
    v, history = _beamformer_only_wmmse(h, cfg, p_max)
    total, rates = sum_rate(h, v, cfg.noise_power)
    return BeamformingSolution(
        positions=tuple(positions),
        beamformers=v,
        sum_rate=total,
        per_user_rates=tuple(float(r) for r in rates),
        history=tuple(history),
    )


def mrt_single_user(
    layout: WaveguideLayout,
    user: Point3,
    cfg: SystemConfig,
    p_max: float | None = None,
    include_attenuation: bool = False,
    x_max: float | None = None,
) -> BeamformingSolution:
    """Single-user reduction: per-waveguide closed-form placement plus the
    conjugate-channel (maximum ratio) beamformer at full power."""
    p_max = cfg.p_max if p_max is None else p_max
    x_max = layout.region_side if x_max is None else x_max
    alpha = cfg.alpha if include_attenuation else 0.0
    offsets = layout.y_offsets()
    positions = [
        optimal_x_closed_form(user.x, (float(yp) - user.y) ** 2 + cfg.d_v**2, alpha, x_max)
        for yp in offsets
    ]
    h = _channel_matrix(layout, positions, [user], cfg, include_attenuation)
    v = h.conj() / np.linalg.norm(h) * math.sqrt(p_max)
    total, rates = sum_rate(h, v, cfg.noise_power)
    return BeamformingSolution(
        positions=tuple(positions),
        beamformers=v,
        sum_rate=total,
        per_user_rates=tuple(float(r) for r in rates),
    )


def ula_baseline(
    users: list[Point3],
    n_antennas: int,
    cfg: SystemConfig,
    p_max: float | None = None,
) -> BeamformingSolution:
    """Fixed half-wavelength ULA centered at the origin at height d_v,
    free-space channels, WMMSE over beamformers only."""
    if n_antennas < 1:
        raise ValueError("need at least one antenna")
    p_max = cfg.p_max if p_max is None else p_max
    ys = (np.arange(n_antennas) - (n_antennas - 1) / 2.0) * cfg.wavelength / 2.0
    h = np.empty((len(users), n_antennas), dtype=complex)
    for m, u in enumerate(users):
        d = np.sqrt(u.x**2 + (ys - u.y) ** 2 + cfg.d_v**2)
        h[m] = math.sqrt(cfg.eta) / d * np.exp(-1j * TWO_PI * d / cfg.wavelength)
    v, history = _beamformer_only_wmmse(h, cfg, p_max)
    total, rates = sum_rate(h, v, cfg.noise_power)
    return BeamformingSolution(
        positions=tuple(float(y) for y in ys),
        beamformers=v,
        sum_rate=total,
        per_user_rates=tuple(float(r) for r in rates),
        history=tuple(history),
    )
