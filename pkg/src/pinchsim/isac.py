"""Integrated sensing and communication with pinch arrays.

P transmit waveguides serve one user while Q receive waveguides capture the
target reflection.  The design maximizes the communication rate subject to a
sensing SNR floor; the beamformer lives in the two-dimensional span of the
conjugate user and target channels, which makes the floor a one-parameter
bisection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import Point3, SystemConfig
from .multiuser import InfeasibleError
from .multiwg import _gain_grid

__all__ = [
    "IsacScene",
    "IsacSolution",
    "isac_receive_placement",
    "sensing_snr",
    "comm_rate",
    "isac_midpoint_baseline",
    "isac_optimize",
    "isac_sweep",
]


@dataclass(frozen=True)
class IsacScene:
    user: Point3
    target: Point3
    tx_offsets: tuple
    rx_offsets: tuple
    zeta: float = 0.5
    sensing_noise: float = 1e-10
    sensing_floor: float = 0.0

    def __post_init__(self):
        if self.zeta <= 0:
            raise ValueError("reflection coefficient must be positive")
        if self.sensing_floor < 0:
            raise ValueError("sensing floor must be non-negative")
        if self.sensing_noise <= 0:
            raise ValueError("sensing noise power must be positive")
        if self.user.z != 0.0 or self.target.z != 0.0:
            raise ValueError("user and target must lie on the ground plane")
        if not self.tx_offsets or not self.rx_offsets:
            raise ValueError("need at least one transmit and one receive waveguide")


@dataclass(frozen=True)
class IsacSolution:
    beamformer: np.ndarray
    tx_positions: tuple
    comm_rate: float
    sensing: float
    theta: float


def isac_receive_placement(scene: IsacScene) -> list[float]:
    """Receive pinches sit at the target's x on every receive waveguide."""
    return [scene.target.x] * len(scene.rx_offsets)


def _rx_gain_factor(scene: IsacScene, cfg: SystemConfig) -> float:
    """Aggregate matched-combining gain of the receive side."""
    return sum(
        cfg.eta * scene.zeta**2 / ((y - scene.target.y) ** 2 + cfg.d_v**2)
        for y in scene.rx_offsets
    )


def _tx_channel(positions, point: Point3, scene: IsacScene, cfg: SystemConfig):
    return np.array(
        [
            _gain_grid([x], point, float(y), cfg, False)[0]
            for x, y in zip(positions, scene.tx_offsets)
        ]
    )


def sensing_snr(w, tx_positions, scene: IsacScene, cfg: SystemConfig) -> float:
    """Post-combining sensing SNR for beamformer w and transmit positions."""
    h_t = _tx_channel(tx_positions, scene.target, scene, cfg)
    q = len(scene.rx_offsets)
    return float(
        _rx_gain_factor(scene, cfg)
        * abs(h_t @ np.asarray(w)) ** 2
        / (q * scene.sensing_noise)
    )


def comm_rate(w, tx_positions, scene: IsacScene, cfg: SystemConfig) -> float:
    h_u = _tx_channel(tx_positions, scene.user, scene, cfg)
    return float(np.log2(1.0 + abs(h_u @ np.asarray(w)) ** 2 / cfg.noise_power))


def _theta_quantities(nu, nt, c, theta):
    """Signal amplitudes of the family w ~ (1-theta) conj(h_u) + theta conj(h_t)
    from the three channel scalars nu = |h_u|^2, nt = |h_t|^2, c = h_u . conj(h_t)."""
    amp_u = (1.0 - theta) * nu + theta * c
    amp_t = (1.0 - theta) * np.conj(c) + theta * nt
    norm2 = (
        (1.0 - theta) ** 2 * nu
        + theta**2 * nt
        + 2.0 * theta * (1.0 - theta) * np.real(c)
    )
    return amp_u, amp_t, norm2


def _family_solve(nu, nt, c, kappa, floor, p_max, noise_power):
    """Smallest theta meeting the sensing floor and the resulting rate,
    vectorized over candidate channels.

    kappa converts |h_t . w|^2 into the sensing SNR.  Entries that cannot
    reach the floor even at theta = 1 get rate -inf.
    """
    nu = np.asarray(nu, dtype=float)
    shape = nu.shape

    def gamma_s(theta):
        _, amp_t, norm2 = _theta_quantities(nu, nt, c, theta)
        return kappa * p_max * np.abs(amp_t) ** 2 / np.maximum(norm2, 1e-300)

    theta = np.zeros(shape)
    need = gamma_s(theta) < floor
    feasible = ~need | (gamma_s(np.ones(shape)) >= floor)
    lo = np.zeros(shape)
    hi = np.ones(shape)
    for _ in range(60):
        mid = (lo + hi) / 2.0
        ok = gamma_s(mid) >= floor
        hi = np.where(need & ok, mid, hi)
        lo = np.where(need & ~ok, mid, lo)
    theta = np.where(need, hi, 0.0)
    amp_u, _, norm2 = _theta_quantities(nu, nt, c, theta)
    snr = p_max * np.abs(amp_u) ** 2 / (np.maximum(norm2, 1e-300) * noise_power)
    rate = np.where(feasible, np.log2(1.0 + snr), -np.inf)
    return theta, rate


def _channel_scalars(positions, scene, cfg):
    h_u = _tx_channel(positions, scene.user, scene, cfg)
    h_t = _tx_channel(positions, scene.target, scene, cfg)
    nu = float(np.vdot(h_u, h_u).real)
    nt = float(np.vdot(h_t, h_t).real)
    c = complex(h_u @ h_t.conj())
    return h_u, h_t, nu, nt, c


def _build_solution(positions, scene, cfg, p_max, floor):
    h_u, h_t, nu, nt, c = _channel_scalars(positions, scene, cfg)
    q = len(scene.rx_offsets)
    kappa = _rx_gain_factor(scene, cfg) / (q * scene.sensing_noise)
    theta, rate = _family_solve(
        np.array([nu]), np.array([nt]), np.array([c]), kappa, floor, p_max, cfg.noise_power
    )
    if not np.isfinite(rate[0]):
        return None
    th = float(theta[0])
    w = (1.0 - th) * h_u.conj() + th * h_t.conj()
    w = w / np.linalg.norm(w) * math.sqrt(p_max)
    return IsacSolution(
        beamformer=w,
        tx_positions=tuple(float(x) for x in positions),
        comm_rate=float(rate[0]),
        sensing=sensing_snr(w, positions, scene, cfg),
        theta=th,
    )


def isac_midpoint_baseline(
    scene: IsacScene, cfg: SystemConfig, p_max: float | None = None
) -> IsacSolution:
    """Baseline: every transmit pinch at the user-target midpoint, beamformer
    from the two-channel family with the smallest sensing-feasible mix."""
    p_max = cfg.p_max if p_max is None else p_max
    mid = (scene.user.x + scene.target.x) / 2.0
    sol = _build_solution(
        [mid] * len(scene.tx_offsets), scene, cfg, p_max, scene.sensing_floor
    )
    if sol is None:
        raise InfeasibleError("sensing floor unreachable from the midpoint placement")
    return sol


def isac_optimize(
    scene: IsacScene,
    cfg: SystemConfig,
    p_max: float | None = None,
    x_max: float | None = None,
    coarse_step: float | None = None,
    fine_step: float = 1e-3,
    max_sweeps: int = 4,
    extra_starts: tuple = (),
) -> IsacSolution:
    """Joint transmit placement and beamforming under the sensing floor.

    Per-waveguide 1-D search (coarse grid plus local refinement, incumbent
    always kept) alternated with the family bisection; multi-start over the
    midpoint, the user's x, the target's x, and any warm starts, so the
    result never falls below the midpoint baseline.
    """
    p_max = cfg.p_max if p_max is None else p_max
    x_max = max(scene.user.x, scene.target.x) + 1.0 if x_max is None else x_max
    coarse = cfg.wavelength / 2.0 if coarse_step is None else coarse_step
    floor = scene.sensing_floor
    n_tx = len(scene.tx_offsets)
    q = len(scene.rx_offsets)
    kappa = _rx_gain_factor(scene, cfg) / (q * scene.sensing_noise)

    def rate_of(positions):
        sol = _build_solution(positions, scene, cfg, p_max, floor)
        return -math.inf if sol is None else sol.comm_rate

    def sweep_positions(positions):
        positions = list(positions)
        best = rate_of(positions)
        for p in range(n_tx):
            others = [i for i in range(n_tx) if i != p]
            hu_o = np.array(
                [
                    _gain_grid([positions[i]], scene.user, float(scene.tx_offsets[i]), cfg, False)[0]
                    for i in others
                ]
            )
            ht_o = np.array(
                [
                    _gain_grid([positions[i]], scene.target, float(scene.tx_offsets[i]), cfg, False)[0]
                    for i in others
                ]
            )
            nu_o = float(np.vdot(hu_o, hu_o).real) if others else 0.0
            nt_o = float(np.vdot(ht_o, ht_o).real) if others else 0.0
            c_o = complex(hu_o @ ht_o.conj()) if others else 0.0

            def rates_on(xs):
                hu = _gain_grid(xs, scene.user, float(scene.tx_offsets[p]), cfg, False)
                ht = _gain_grid(xs, scene.target, float(scene.tx_offsets[p]), cfg, False)
                nu = nu_o + np.abs(hu) ** 2
                nt = nt_o + np.abs(ht) ** 2
                c = c_o + hu * ht.conj()
                _, rates = _family_solve(nu, nt, c, kappa, floor, p_max, cfg.noise_power)
                return rates

            grid = np.append(np.arange(0.0, x_max + coarse / 2, coarse), positions[p])
            vals = rates_on(grid)
            x_best = float(grid[int(np.argmax(vals))])
            local = np.arange(
                max(0.0, x_best - coarse), min(x_max, x_best + coarse) + fine_step / 2, fine_step
            )
            local = np.append(local, [x_best, positions[p]])
            vals = rates_on(local)
            i = int(np.argmax(vals))
            if vals[i] > best:
                positions[p] = float(local[i])
                best = float(vals[i])
        return positions, best

    mid = (scene.user.x + scene.target.x) / 2.0
    starts = [
        [mid] * n_tx,
        [scene.user.x] * n_tx,
        [scene.target.x] * n_tx,
    ] + [list(s) for s in extra_starts]

    best_sol = None
    for start in starts:
        positions = start
        prev = rate_of(positions)
        for _ in range(max_sweeps):
            positions, val = sweep_positions(positions)
            if val <= prev + 1e-9:
                prev = max(prev, val)
                break
            prev = val
        sol = _build_solution(positions, scene, cfg, p_max, floor)
        if sol is not None and (best_sol is None or sol.comm_rate > best_sol.comm_rate):
            best_sol = sol
    if best_sol is None:
        raise InfeasibleError("sensing floor unreachable at every tried placement")
    return best_sol


def isac_sweep(
    scene: IsacScene,
    floors,
    cfg: SystemConfig,
    p_max: float | None = None,
) -> list[tuple]:
    """Rate-versus-sensing-floor tradeoff.

    Floors are processed in descending order with warm starts, so each
    solution remains a candidate at every smaller floor and the returned
    rates are non-increasing in the floor.
    """
    from dataclasses import replace

    order = np.argsort(floors)[::-1]
    results: dict[int, tuple] = {}
    warm: tuple = ()
    for i in order:
        sc = replace(scene, sensing_floor=float(floors[i]))
        sol = isac_optimize(sc, cfg, p_max, extra_starts=warm)
        warm = warm + (sol.tx_positions,)
        results[int(i)] = (float(floors[i]), sol)
    return [results[i] for i in range(len(floors))]
