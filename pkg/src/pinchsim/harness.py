"""Seeded experiment harness: Monte Carlo runners, figure reproduction,
oracle suite, and CSV export.

Every record stream is deterministic given (spec, seed): each trial draws
from np.random.default_rng([seed, trial]) and consumes its sweep points in
order, so partitioning trials across workers cannot change the output.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass, field, replace

import numpy as np

from .config import Point3, Region, SystemConfig, WaveguideLayout, dbm_to_watt
from .multiuser import (
    InfeasibleError,
    cr_noma_two_user,
    noma_grid_oracle,
    tdma_maxmin_closed_form,
    tdma_maxmin_grid_oracle,
)
from .siso import grid_oracle_siso, optimal_position_siso, siso_snr

__all__ = [
    "ExperimentSpec",
    "ExperimentRecord",
    "OracleReport",
    "FIGURES",
    "run_experiment",
    "records_to_csv",
    "write_csv",
    "write_columns",
    "reproduce",
    "run_oracles",
]

CSV_HEADER = "experiment,trial,sweep,scheme,metric,value"


@dataclass(frozen=True)
class ExperimentSpec:
    experiment: str
    sweep: tuple
    trials: int
    seed: int
    overrides: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("need at least one trial")
        if not self.sweep:
            raise ValueError("sweep grid must be non-empty")
        if list(self.sweep) != sorted(self.sweep):
            raise ValueError("sweep grid must be sorted")


@dataclass(frozen=True)
class ExperimentRecord:
    experiment: str
    trial: int
    sweep: float
    scheme: str
    metric: str
    value: float

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValueError("metric value must be finite")


def _config_from(spec: ExperimentSpec) -> SystemConfig:
    try:
        return SystemConfig(**spec.overrides)
    except TypeError as exc:
        raise ValueError(f"invalid config override: {exc}") from exc


_RUNNERS = {}


def _runner(name):
    def deco(fn):
        _RUNNERS[name] = fn
        return fn

    return deco


# ---------------------------------------------------------------------------
# Figure experiments
# ---------------------------------------------------------------------------

@_runner("siso_rate")
def _run_siso_rate(spec, cfg):
    """Single-user rate over a D_y x D_x rectangle versus the region length.

    Schemes: closed-form placement aware of the in-waveguide decay, the
    decay-agnostic placement at the user's projection (both rated under the
    attenuated channel), and an antenna fixed at the region center.
    """
    d_y = float(spec.params.get("d_y", 10.0))
    records = []
    for trial in range(spec.trials):
        rng = np.random.default_rng([spec.seed, trial])
        for d_x in spec.sweep:
            x = float(rng.uniform(0.0, d_x))
            y = float(rng.uniform(-d_y / 2.0, d_y / 2.0))
            user = Point3(x, y, 0.0)
            aware = optimal_position_siso(user, cfg, float(d_x))
            agnostic = math.log2(1.0 + float(siso_snr(x, user, cfg)))
            center = float(d_x) / 2.0
            fixed = math.log2(1.0 + float(siso_snr(center, user, cfg)))
            for scheme, value in (
                ("pinch_decay_aware", aware.rate),
                ("pinch_decay_agnostic", agnostic),
                ("fixed_center", fixed),
            ):
                records.append(
                    ExperimentRecord(spec.experiment, trial, float(d_x), scheme, "rate", value)
                )
    return records


@_runner("noma_vs_tdma")
def _run_noma_vs_tdma(spec, cfg):
    """Two-user sum rate, NOMA against per-slot-repositioned TDMA, versus
    the transmit power in dBm over a D x D square.

    The user farther from the waveguide is the primary (QoS-protected)
    user; the decay-free model is used on both sides for a like-for-like
    comparison.
    """
    d = float(spec.params.get("d", 20.0))
    gamma_p = float(spec.params.get("gamma_p", 1.0))
    records = []
    for trial in range(spec.trials):
        rng = np.random.default_rng([spec.seed, trial])
        xs = rng.uniform(0.0, d, 2)
        ys = rng.uniform(-d / 2.0, d / 2.0, 2)
        users = [Point3(float(xi), float(yi), 0.0) for xi, yi in zip(xs, ys)]
        users.sort(key=lambda u: u.y**2)
        secondary, primary = users
        c_p = primary.y**2 + cfg.d_v**2
        c_s = secondary.y**2 + cfg.d_v**2
        for p_dbm in spec.sweep:
            p_max = dbm_to_watt(float(p_dbm))
            rho = p_max / cfg.noise_power
            tdma = 0.5 * (
                math.log2(1.0 + rho * cfg.eta / c_p)
                + math.log2(1.0 + rho * cfg.eta / c_s)
            )
            sol = cr_noma_two_user(primary, secondary, gamma_p, cfg, p_max=p_max)
            noma = sol.primary_rate + sol.secondary_rate
            records.append(
                ExperimentRecord(spec.experiment, trial, float(p_dbm), "noma", "sum_rate", noma)
            )
            records.append(
                ExperimentRecord(spec.experiment, trial, float(p_dbm), "tdma", "sum_rate", tdma)
            )
    return records


@_runner("rate_vs_n")
def _run_rate_vs_n(spec, cfg):
    """Secondary-user NOMA rate versus the pinch count on one waveguide,
    with the same user draw shared across all array sizes per trial."""
    from .arraywg import noma_array_bcd

    d = float(spec.params.get("d", 5.0))
    gamma_p = float(spec.params.get("gamma_p", 0.1))
    records = []
    for trial in range(spec.trials):
        rng = np.random.default_rng([spec.seed, trial])
        xs = rng.uniform(0.0, d, 2)
        ys = rng.uniform(-d / 2.0, d / 2.0, 2)
        users = [Point3(float(xi), float(yi), 0.0) for xi, yi in zip(xs, ys)]
        users.sort(key=lambda u: u.y**2)
        secondary, primary = users
        for n in spec.sweep:
            res = noma_array_bcd(primary, secondary, cfg, int(n), gamma_p)
            records.append(
                ExperimentRecord(
                    spec.experiment, trial, float(n), "noma_array", "secondary_rate",
                    res.secondary_rate,
                )
            )
    return records


@_runner("sumrate_vs_power")
def _run_sumrate_vs_power(spec, cfg):
    """M = P = 8 sum rate versus transmit power for pinch waveguides and the
    fixed half-wavelength array, at two region sizes."""
    from .multiwg import ula_baseline, wmmse_bcd

    m = int(spec.params.get("users", 8))
    p = int(spec.params.get("waveguides", 8))
    sides = tuple(spec.params.get("sides", (5.0, 20.0)))
    records = []
    for trial in range(spec.trials):
        rng = np.random.default_rng([spec.seed, trial])
        draws = {
            d: Region.square(d).sample_users(m, rng) for d in sides
        }
        for p_dbm in spec.sweep:
            run_cfg = cfg.with_(p_max=dbm_to_watt(float(p_dbm)))
            for d in sides:
                layout = WaveguideLayout(count=p, height=cfg.d_v, region_side=d)
                users = draws[d]
                pin = wmmse_bcd(layout, users, run_cfg)
                ula = ula_baseline(users, p, run_cfg)
                tag = f"D{d:g}"
                records.append(
                    ExperimentRecord(
                        spec.experiment, trial, float(p_dbm), f"pinch_{tag}", "sum_rate",
                        pin.sum_rate,
                    )
                )
                records.append(
                    ExperimentRecord(
                        spec.experiment, trial, float(p_dbm), f"ula_{tag}", "sum_rate",
                        ula.sum_rate,
                    )
                )
    return records


@_runner("isac_tradeoff")
def _run_isac_tradeoff(spec, cfg):
    """Communication rate versus the sensing floor, expressed as a fraction
    of the midpoint placement's maximum sensing SNR (so every sweep point
    stays feasible for both schemes)."""
    from .isac import IsacScene, isac_midpoint_baseline, isac_sweep, sensing_snr
    from .multiwg import _gain_grid

    d = float(spec.params.get("d", 10.0))
    p = int(spec.params.get("tx_waveguides", 4))
    q = int(spec.params.get("rx_waveguides", 4))
    zeta = float(spec.params.get("zeta", 0.5))
    offsets = tuple(np.linspace(-d / 2.0, d / 2.0, p)) if p > 1 else (0.0,)
    rx_offsets = tuple(np.linspace(-d / 2.0, d / 2.0, q)) if q > 1 else (0.0,)
    records = []
    for trial in range(spec.trials):
        rng = np.random.default_rng([spec.seed, trial])
        user = Point3(float(rng.uniform(0, d)), float(rng.uniform(-d / 2, d / 2)), 0.0)
        target = Point3(float(rng.uniform(0, d)), float(rng.uniform(-d / 2, d / 2)), 0.0)
        scene = IsacScene(
            user=user, target=target, tx_offsets=offsets, rx_offsets=rx_offsets,
            zeta=zeta, sensing_noise=cfg.noise_power,
        )
        mid = (user.x + target.x) / 2.0
        h_t = np.array(
            [_gain_grid([mid], target, float(y), cfg, False)[0] for y in offsets]
        )
        w_max = h_t.conj() / np.linalg.norm(h_t) * math.sqrt(cfg.p_max)
        s_max = sensing_snr(w_max, [mid] * p, scene, cfg)
        floors = [float(f) * s_max for f in spec.sweep]
        optimized = isac_sweep(scene, floors, cfg)
        for frac, (floor, sol) in zip(spec.sweep, optimized):
            base = isac_midpoint_baseline(replace(scene, sensing_floor=floor), cfg)
            records.append(
                ExperimentRecord(spec.experiment, trial, float(frac), "optimized", "rate",
                                 sol.comm_rate)
            )
            records.append(
                ExperimentRecord(spec.experiment, trial, float(frac), "midpoint", "rate",
                                 base.comm_rate)
            )
    return records


FIGURES = {
    "siso_rate": ExperimentSpec(
        "siso_rate", tuple(float(d) for d in range(10, 81, 10)), trials=10000, seed=0
    ),
    "noma_vs_tdma": ExperimentSpec(
        "noma_vs_tdma", tuple(float(p) for p in range(20, 41, 2)), trials=10000, seed=0
    ),
    "rate_vs_n": ExperimentSpec("rate_vs_n", (2.0, 4.0, 6.0, 8.0), trials=20, seed=0),
    "sumrate_vs_power": ExperimentSpec(
        "sumrate_vs_power", (20.0, 25.0, 30.0, 35.0, 40.0), trials=4, seed=0
    ),
    "isac_tradeoff": ExperimentSpec(
        "isac_tradeoff", (0.1, 0.3, 0.5, 0.7, 0.9), trials=10, seed=0
    ),
}


def run_experiment(spec: ExperimentSpec) -> list[ExperimentRecord]:
    if spec.experiment not in _RUNNERS:
        raise ValueError(f"unknown experiment {spec.experiment!r}")
    cfg = _config_from(spec)
    return _RUNNERS[spec.experiment](spec, cfg)


# ---------------------------------------------------------------------------
# CSV export
# ---------------------------------------------------------------------------

def records_to_csv(records) -> str:
    lines = [CSV_HEADER]
    for r in records:
        lines.append(
            f"{r.experiment},{r.trial},{format(r.sweep, '.17g')},{r.scheme},"
            f"{r.metric},{format(r.value, '.17g')}"
        )
    return "\n".join(lines) + "\n"


def write_csv(records, path) -> str:
    with open(path, "w") as fh:
        fh.write(records_to_csv(records))
    return str(path)


def write_columns(records, path) -> str:
    """Gnuplot-friendly layout: one row per sweep value, one column per
    (scheme, metric) holding the across-trial mean."""
    keys = sorted({(r.scheme, r.metric) for r in records})
    sweeps = sorted({r.sweep for r in records})
    sums: dict = {}
    counts: dict = {}
    for r in records:
        k = (r.sweep, r.scheme, r.metric)
        sums[k] = sums.get(k, 0.0) + r.value
        counts[k] = counts.get(k, 0) + 1
    lines = ["# sweep " + " ".join(f"{s}:{m}" for s, m in keys)]
    for s in sweeps:
        row = [format(s, ".17g")]
        for scheme, metric in keys:
            k = (s, scheme, metric)
            row.append(format(sums[k] / counts[k], ".17g") if k in counts else "nan")
        lines.append(" ".join(row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    return str(path)


def reproduce(figure: str, out_dir=".", seed=None, trials=None) -> str:
    """Run the pre-baked experiment behind one of the report figures and
    write its CSV plus a columns file; returns the CSV path."""
    import os

    if figure not in FIGURES:
        raise ValueError(f"unknown figure {figure!r}")
    spec = FIGURES[figure]
    if seed is not None:
        spec = replace(spec, seed=int(seed))
    if trials is not None:
        spec = replace(spec, trials=int(trials))
    records = run_experiment(spec)
    csv_path = os.path.join(str(out_dir), f"{figure}.csv")
    write_csv(records, csv_path)
    write_columns(records, os.path.join(str(out_dir), f"{figure}_columns.dat"))
    return csv_path


# ---------------------------------------------------------------------------
# Oracle suite
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OracleCheck:
    name: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class OracleReport:
    checks: tuple

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def _check(name, passed, detail):
    return OracleCheck(name=name, passed=bool(passed), detail=detail)


def _oracles_siso(cfg, rng):
    worst_dx, worst_snr = 0.0, 0.0
    for _ in range(50):
        d = 80.0
        user = Point3(float(rng.uniform(0, d)), float(rng.uniform(-d / 2, d / 2)), 0.0)
        closed = optimal_position_siso(user, cfg, d)
        oracle = grid_oracle_siso(user, cfg, d, step=1e-3)
        worst_dx = max(worst_dx, abs(closed.x_star - oracle.x_star))
        worst_snr = max(worst_snr, abs(closed.snr - oracle.snr) / oracle.snr)
    yield _check(
        "siso_closed_form_vs_grid",
        worst_dx <= 2e-3 and worst_snr <= 1e-6,
        f"max |dx|={worst_dx:.2e}, max rel SNR err={worst_snr:.2e}",
    )


def _oracles_multiuser(cfg, rng):
    worst = 0.0
    for _ in range(20):
        users = [
            Point3(float(rng.uniform(0, 20)), float(rng.uniform(-10, 10)), 0.0)
            for _ in range(int(rng.integers(2, 6)))
        ]
        a = tdma_maxmin_closed_form(users, cfg)
        b = tdma_maxmin_grid_oracle(users, cfg)
        worst = max(worst, abs(a.min_rate - b.min_rate))
    yield _check("tdma_closed_form_vs_grid", worst <= 1e-6, f"max |drate|={worst:.2e}")

    bad = 0
    worst = 0.0
    for _ in range(20):
        p = Point3(float(rng.uniform(0, 20)), float(rng.uniform(-10, 10)), 0.0)
        s = Point3(float(rng.uniform(0, 20)), float(rng.uniform(-10, 10)), 0.0)
        try:
            sol = cr_noma_two_user(p, s, 1.0, cfg)
            orc = noma_grid_oracle(p, s, 1.0, cfg)
        except InfeasibleError:
            continue
        gap = orc.secondary_rate - sol.secondary_rate
        worst = max(worst, gap)
        if gap > 1e-4:
            bad += 1
    yield _check(
        "noma_closed_form_vs_2d_grid", bad == 0, f"max oracle advantage={worst:.2e}"
    )


def _oracles_array(cfg, rng):
    from .arraywg import aligned_array, maxmin_time_shares, stage1_min_pathloss
    from .channel import channel_array

    # Stage-1 center-offset oracle.
    worst = 0.0
    for _ in range(5):
        user = Point3(float(rng.uniform(2, 10)), float(rng.uniform(-5, 5)), 0.0)
        delta = cfg.wavelength / 2.0
        placement = stage1_min_pathloss(user, cfg, 4, delta)
        base = np.array(placement.positions) - user.x

        def amp_sum(center):
            return sum(
                1.0 / math.sqrt((center + o) ** 2 + user.y**2 + cfg.d_v**2)
                for o in (np.arange(4) - 1.5) * delta
            )

        ours = amp_sum(float(np.mean(base)))
        grid = np.linspace(-2.0, 2.0, 4001)
        best = max(amp_sum(float(c)) for c in grid)
        worst = max(worst, best - ours)
    yield _check("stage1_center_offset_oracle", worst <= 1e-9, f"max gap={worst:.2e}")

    # Phase alignment coherence.
    worst = 1.0
    for _ in range(20):
        user = Point3(float(rng.uniform(0, 20)), float(rng.uniform(-10, 10)), 0.0)
        n = int(rng.integers(2, 9))
        pl = aligned_array(user, cfg, n)
        h = abs(channel_array(pl.positions, user, cfg, False))
        mags = sum(abs(channel_array([x], user, cfg, False)) for x in pl.positions)
        worst = min(worst, h / mags)
    yield _check("stage2_alignment_coherence", worst >= 0.998, f"min coherence={worst:.6f}")

    # Time-share bisection against a fine rate-level grid.
    a = np.array([rng.uniform(1e4, 1e6) for _ in range(3)])
    t, rate = maxmin_time_shares(a)
    levels = np.arange(max(rate - 1e-4, 0.0), rate + 1e-4, 1e-8)
    from .arraywg import _share_for_rate

    feas = [lv for lv in levels if sum(_share_for_rate(float(ai), float(lv)) for ai in a) <= 1.0]
    gap = abs(rate - max(feas)) if feas else math.inf
    yield _check("time_share_bisection_vs_level_grid", gap <= 1e-7, f"|gap|={gap:.2e}")


def _oracles_multiwg(cfg, rng):
    from .multiwg import _gain_grid, mrt_single_user

    layout = WaveguideLayout(count=4, height=cfg.d_v, region_side=10.0)
    worst = 0.0
    for _ in range(5):
        user = Point3(float(rng.uniform(0, 10)), float(rng.uniform(-5, 5)), 0.0)
        sol = mrt_single_user(layout, user, cfg)
        # Per-waveguide grid search of the channel magnitude.
        grid = np.arange(0.0, 10.0, 1e-3)
        snr = 0.0
        for y in layout.y_offsets():
            gains = np.abs(_gain_grid(grid, user, float(y), cfg, False)) ** 2
            snr += float(gains.max())
        snr *= cfg.p_max / cfg.noise_power
        ours = 2.0 ** sol.sum_rate - 1.0
        worst = max(worst, abs(ours - snr) / snr)
    yield _check("mrt_single_user_vs_grid", worst <= 1e-6, f"max rel err={worst:.2e}")


def _oracles_applications(cfg, rng):
    from .coop import SCHEMES, CoopConfig, coop_snr

    ok = True
    for _ in range(1000):
        coop = CoopConfig(
            n_b=int(rng.integers(1, 65)),
            p=int(rng.integers(1, 17)),
            n=int(rng.integers(1, 17)),
            l_b=float(rng.uniform(10, 500)),
            l_g=float(rng.uniform(1, 50)),
            gamma_t=float(rng.uniform(1e3, 1e12)),
            xi_b=float(rng.uniform(2, 5)),
            xi_p=float(rng.uniform(2, 4)),
        )
        sd = coop_snr("SD", coop, cfg.eta)
        scd = coop_snr("SCD", coop, cfg.eta)
        fcd = coop_snr("FCD", coop, cfg.eta)
        if not (fcd >= scd >= sd):
            ok = False
            break
    yield _check("coop_snr_ordering", ok, "FCD >= SCD >= SD over 1000 draws")

    # ISAC family bisection against a dense theta grid on one instance.
    from .isac import IsacScene, _build_solution, _channel_scalars, _rx_gain_factor

    scene = IsacScene(
        user=Point3(2.0, -2.0, 0.0), target=Point3(8.0, 3.0, 0.0),
        tx_offsets=(-5.0, 0.0, 5.0), rx_offsets=(-5.0, 0.0, 5.0),
        zeta=0.5, sensing_noise=cfg.noise_power,
    )
    positions = [5.0, 5.0, 5.0]
    h_u, h_t, nu, nt, c = _channel_scalars(positions, scene, cfg)
    kappa = _rx_gain_factor(scene, cfg) / (3 * scene.sensing_noise)
    floor = 0.5 * kappa * cfg.p_max * nt
    sol = _build_solution(positions, replace(scene, sensing_floor=floor), cfg, cfg.p_max, floor)
    best = -math.inf
    from .isac import _theta_quantities

    for th in np.linspace(0.0, 1.0, 20001):
        amp_u, amp_t, norm2 = _theta_quantities(nu, nt, c, th)
        if kappa * cfg.p_max * abs(amp_t) ** 2 / norm2 >= floor:
            best = max(best, math.log2(1.0 + cfg.p_max * abs(amp_u) ** 2 / (norm2 * cfg.noise_power)))
    gap = best - sol.comm_rate
    yield _check("isac_theta_bisection_vs_grid", gap <= 1e-6, f"grid advantage={gap:.2e}")


_ORACLE_SCOPES = {
    "siso-placement": _oracles_siso,
    "multiuser": _oracles_multiuser,
    "array-waveguide": _oracles_array,
    "multi-waveguide": _oracles_multiwg,
    "applications": _oracles_applications,
}


def run_oracles(scope: str | None = None, seed: int = 0) -> OracleReport:
    """Execute the derived-value oracle checks; empty scope runs them all."""
    cfg = SystemConfig()
    if scope is None or scope == "":
        scopes = list(_ORACLE_SCOPES)
    elif scope in _ORACLE_SCOPES:
        scopes = [scope]
    else:
        raise ValueError(f"unknown oracle scope {scope!r}")
    checks = []
    for name in scopes:
        tag = zlib.crc32(name.encode())
        rng = np.random.default_rng([seed, tag])
        checks.extend(_ORACLE_SCOPES[name](cfg, rng))
    return OracleReport(checks=tuple(checks))
