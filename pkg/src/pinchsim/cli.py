"""Command-line front end.

Subcommands mirror the library capabilities: single-user placement, TDMA
and two-user NOMA designs, pinch arrays, multi-waveguide beamforming, ISAC,
cooperative deployments, figure reproduction, and the oracle suite.

Configuration comes from an optional TOML file plus PINCHSIM_* environment
overrides; results go to stdout as key=value lines or to a CSV via --out.
Failures exit nonzero with a single machine-readable `error=` line.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .config import Point3, Region, SystemConfig, WaveguideLayout, load_config
from .multiuser import InfeasibleError

__all__ = ["main", "build_parser"]


def _parse_point(text: str) -> Point3:
    parts = [float(v) for v in text.split(",")]
    if len(parts) != 2:
        raise ValueError(f"expected 'x,y', got {text!r}")
    return Point3(parts[0], parts[1], 0.0)


def _parse_users(text: str) -> list[Point3]:
    return [_parse_point(chunk) for chunk in text.split(";") if chunk.strip()]


def _emit(out, pairs):
    lines = [f"{k}={v}" for k, v in pairs]
    text = "\n".join(lines) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _fmt(x) -> str:
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def _common_flags() -> argparse.ArgumentParser:
    # Shared flags live on a parent parser so they work before or after the
    # subcommand name; SUPPRESS keeps the subparser from clobbering a value
    # given at the top level.
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS, help="TOML configuration file")
    common.add_argument(
        "--seed", type=int, default=argparse.SUPPRESS, help="base RNG seed"
    )
    common.add_argument(
        "--trials", type=int, default=argparse.SUPPRESS, help="Monte Carlo trials"
    )
    common.add_argument(
        "--out", default=argparse.SUPPRESS, help="output path (CSV or key=value)"
    )
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = argparse.ArgumentParser(
        prog="pinchsim",
        description="Simulators and optimizers for waveguide-fed pinch antennas",
        parents=[common],
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_parser(name, **kwargs):
        return sub.add_parser(name, parents=[common], **kwargs)

    p = add_parser("place-siso", help="closed-form single-user placement")
    p.add_argument("--user", required=True, help="user position 'x,y'")
    p.add_argument("--region", type=float, default=80.0, help="waveguide length [m]")

    p = add_parser("tdma", help="max-min TDMA placement and powers")
    p.add_argument("--users", required=True, help="positions 'x,y;x,y;...'")

    p = add_parser("noma2", help="two-user NOMA position and power split")
    p.add_argument("--primary", required=True, help="primary user 'x,y'")
    p.add_argument("--secondary", required=True, help="secondary user 'x,y'")
    p.add_argument("--gamma", type=float, default=1.0, help="primary SINR threshold")

    p = add_parser("array", help="pinch array on one waveguide (max-min TDMA)")
    p.add_argument("--users", required=True, help="positions 'x,y;x,y;...'")
    p.add_argument("--n", type=int, default=4, help="number of pinches")
    p.add_argument("--delta", type=float, default=None, help="spacing floor [m]")

    p = add_parser("mimo", help="multi-waveguide sum rate vs the fixed array")
    p.add_argument("--users", type=int, default=8, help="user count")
    p.add_argument("--waveguides", type=int, default=8, help="waveguide count")
    p.add_argument("--region", type=float, default=20.0, help="square side [m]")

    p = add_parser("isac", help="rate-optimal placement under a sensing floor")
    p.add_argument("--user", required=True, help="user position 'x,y'")
    p.add_argument("--target", required=True, help="target position 'x,y'")
    p.add_argument("--floor", type=float, default=0.0, help="sensing SNR floor")
    p.add_argument("--waveguides", type=int, default=4)
    p.add_argument("--region", type=float, default=10.0, help="square side [m]")
    p.add_argument("--zeta", type=float, default=0.5, help="reflection amplitude")

    p = add_parser("coop", help="cooperative deployment SNRs")
    p.add_argument("--nb", type=int, required=True, help="base-station antennas")
    p.add_argument("--p", type=int, required=True, help="waveguides")
    p.add_argument("--n", type=int, required=True, help="pinches per waveguide")
    p.add_argument("--lb", type=float, required=True, help="BS-user distance [m]")
    p.add_argument("--lg", type=float, required=True, help="pinch-user distance [m]")
    p.add_argument("--gamma-t", type=float, required=True, help="transmit SNR")

    p = add_parser("reproduce", help="rerun a pre-baked figure experiment")
    p.add_argument(
        "figure",
        choices=["siso_rate", "noma_vs_tdma", "rate_vs_n", "sumrate_vs_power", "isac_tradeoff"],
    )
    p.add_argument("--out-dir", default=".", help="directory for the CSV files")

    p = add_parser("oracles", help="run the derived-value oracle checks")
    p.add_argument("--scope", default=None, help="restrict to one module scope")

    return parser


def _load_cfg(args) -> SystemConfig:
    return load_config(args.config)


def _cmd_place_siso(args, cfg):
    from .siso import optimal_position_siso

    user = _parse_point(args.user)
    sol = optimal_position_siso(user, cfg, args.region)
    _emit(args.out, [("x_star", _fmt(sol.x_star)), ("snr", _fmt(sol.snr)), ("rate", _fmt(sol.rate))])


def _cmd_tdma(args, cfg):
    from .multiuser import tdma_maxmin_closed_form

    users = _parse_users(args.users)
    sol = tdma_maxmin_closed_form(users, cfg)
    pairs = [("x_star", _fmt(sol.x_star)), ("min_rate", _fmt(sol.min_rate))]
    pairs += [(f"power_{i}", _fmt(p)) for i, p in enumerate(sol.powers)]
    _emit(args.out, pairs)


def _cmd_noma2(args, cfg):
    from .multiuser import cr_noma_two_user

    sol = cr_noma_two_user(
        _parse_point(args.primary), _parse_point(args.secondary), args.gamma, cfg
    )
    _emit(
        args.out,
        [
            ("x_star", _fmt(sol.x_star)),
            ("alpha_p", _fmt(sol.alpha_p)),
            ("alpha_s", _fmt(sol.alpha_s)),
            ("secondary_rate", _fmt(sol.secondary_rate)),
            ("primary_rate", _fmt(sol.primary_rate)),
        ],
    )


def _cmd_array(args, cfg):
    from .arraywg import tdma_array_maxmin

    users = _parse_users(args.users)
    res = tdma_array_maxmin(users, cfg, args.n, args.delta)
    pairs = [("min_rate", _fmt(res.min_rate)), ("converged", str(res.converged))]
    pairs += [(f"x_{i}", _fmt(x)) for i, x in enumerate(res.placement.positions)]
    pairs += [(f"t_{i}", _fmt(t)) for i, t in enumerate(res.shares.shares)]
    _emit(args.out, pairs)


def _cmd_mimo(args, cfg):
    from .multiwg import ula_baseline, wmmse_bcd

    rng = np.random.default_rng([args.seed, 0])
    users = Region.square(args.region).sample_users(args.users, rng)
    layout = WaveguideLayout(count=args.waveguides, height=cfg.d_v, region_side=args.region)
    pin = wmmse_bcd(layout, users, cfg)
    ula = ula_baseline(users, args.waveguides, cfg)
    _emit(
        args.out,
        [
            ("pinch_sum_rate", _fmt(pin.sum_rate)),
            ("ula_sum_rate", _fmt(ula.sum_rate)),
            ("converged", str(pin.converged)),
        ],
    )


def _cmd_isac(args, cfg):
    from .isac import IsacScene, isac_optimize

    d = args.region
    p = args.waveguides
    offsets = tuple(np.linspace(-d / 2.0, d / 2.0, p)) if p > 1 else (0.0,)
    scene = IsacScene(
        user=_parse_point(args.user),
        target=_parse_point(args.target),
        tx_offsets=offsets,
        rx_offsets=offsets,
        zeta=args.zeta,
        sensing_noise=cfg.noise_power,
        sensing_floor=args.floor,
    )
    sol = isac_optimize(scene, cfg)
    pairs = [("comm_rate", _fmt(sol.comm_rate)), ("sensing_snr", _fmt(sol.sensing))]
    pairs += [(f"x_{i}", _fmt(x)) for i, x in enumerate(sol.tx_positions)]
    _emit(args.out, pairs)


def _cmd_coop(args, cfg):
    from .coop import SCHEMES, CoopConfig, coop_best_scheme, coop_snr

    coop = CoopConfig(
        n_b=args.nb, p=args.p, n=args.n, l_b=args.lb, l_g=args.lg, gamma_t=args.gamma_t
    )
    pairs = [(s, _fmt(coop_snr(s, coop, cfg.eta))) for s in SCHEMES]
    pairs.append(("best", coop_best_scheme(coop, cfg.eta)))
    _emit(args.out, pairs)


def _cmd_reproduce(args, cfg):
    from .harness import reproduce

    path = reproduce(args.figure, out_dir=args.out_dir, seed=args.seed, trials=args.trials)
    if args.out:
        # --out overrides the default CSV location.
        import shutil

        shutil.copyfile(path, args.out)
        path = args.out
    sys.stdout.write(f"csv={path}\n")


def _cmd_oracles(args, cfg):
    from .harness import run_oracles

    report = run_oracles(args.scope, seed=args.seed)
    for c in report.checks:
        sys.stdout.write(f"{'PASS' if c.passed else 'FAIL'} {c.name}: {c.detail}\n")
    if not report.passed:
        raise InfeasibleError("oracle suite reported failures")


_COMMANDS = {
    "place-siso": _cmd_place_siso,
    "tdma": _cmd_tdma,
    "noma2": _cmd_noma2,
    "array": _cmd_array,
    "mimo": _cmd_mimo,
    "isac": _cmd_isac,
    "coop": _cmd_coop,
    "reproduce": _cmd_reproduce,
    "oracles": _cmd_oracles,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    # Shared flags use SUPPRESS so a value set before the subcommand is not
    # clobbered by the subparser; fill in the defaults here instead.
    for name, default in (("config", None), ("seed", 0), ("trials", None), ("out", None)):
        if not hasattr(args, name):
            setattr(args, name, default)
    try:
        cfg = _load_cfg(args)
        _COMMANDS[args.command](args, cfg)
    except (InfeasibleError, ValueError, FileNotFoundError) as exc:
        sys.stderr.write("error=" + json.dumps({"message": str(exc)}) + "\n")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
