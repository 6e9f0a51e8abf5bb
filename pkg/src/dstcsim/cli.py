"""Command-line front end.

Subcommands:
  simulate     one BER operating point -> CSV
  sweep        schemes x delays x P/N0 grid -> CSV
  snr-surface  closed-form SNR grid -> CSV
  plot         CSV -> SVG

Flags mirror configuration keys one-to-one; a key=value config file can
seed any run and flags override it. Exit codes: 0 ok, 2 bad configuration,
3 I/O failure.
"""

import argparse
import sys

import numpy as np

from .analysis import SnrSurface, snr_surface
from .harness import (
    BerPoint,
    ConfigError,
    SimConfig,
    build_config,
    format_ber_csv,
    read_config_file,
    run_point,
    run_sweep,
)


def _add_common_flags(sub):
    sub.add_argument("--config", help="key=value configuration file")
    sub.add_argument("--scheme", choices=("proposed", "conventional", "coherent"))
    sub.add_argument("--n", type=int, help="subcarriers per sub-block")
    sub.add_argument("--cp", type=int, help="cyclic prefix length")
    sub.add_argument("--constellation", help="bpsk | qpsk | qam16")
    sub.add_argument("--beta", type=float, help="pulse roll-off (default 0.9)")
    sub.add_argument("--tau", type=float, help="fractional delay in Ts units")
    sub.add_argument("--delay-int", dest="delay_int", type=int,
                     help="whole-symbol delay d")
    sub.add_argument("--doppler", type=float, help="normalized Doppler fD*Ts")
    sub.add_argument("--snr-db", dest="snr_db",
                     help="comma-separated P/N0 grid in dB")
    sub.add_argument("--split", help="P0/P,Pr/P (default 0.5,0.25)")
    sub.add_argument("--seed", type=int, help="master seed")
    sub.add_argument("--min-errors", dest="min_errors", type=int)
    sub.add_argument("--max-bits", dest="max_bits", type=int)
    sub.add_argument("--workers", type=int)
    sub.add_argument("--noiseless", action="store_const", const=True,
                     help="zero-noise override")
    sub.add_argument("--block-lag", dest="block_lag", type=float,
                     help="fading advance per block in symbols")


def _config_from_args(args) -> SimConfig:
    file_values = read_config_file(args.config) if args.config else {}
    keys = ("scheme", "n", "cp", "constellation", "beta", "tau", "delay_int",
            "doppler", "snr_db", "split", "seed", "min_errors", "max_bits",
            "workers", "noiseless", "block_lag")
    overrides = {k: getattr(args, k, None) for k in keys}
    return build_config(file_values, overrides)


def _cmd_simulate(args) -> int:
    cfg = _config_from_args(args)
    if len(cfg.snr_db) != 1:
        raise ConfigError("simulate runs one point; pass a single --snr-db value")
    point = run_point(cfg, tau=cfg.tau, snr_db=cfg.snr_db[0])
    _write_text(args.out, format_ber_csv([point]))
    return 0


def _cmd_sweep(args) -> int:
    cfg = _config_from_args(args)
    schemes = args.schemes.split(",") if args.schemes else [cfg.scheme]
    taus = ([float(t) for t in args.taus.split(",")]
            if args.taus else [cfg.tau])
    points = run_sweep(cfg, schemes=schemes, taus=taus)
    _write_text(args.out, format_ber_csv(points))
    return 0


def _cmd_snr_surface(args) -> int:
    if args.tau_count < 2:
        raise ConfigError("tau-count must be >= 2")
    surface = snr_surface(
        n_subcarriers=args.n, p_over_n0_db=args.snr_db,
        split=tuple(float(x) for x in args.split.split(",")),
        beta=args.beta, g1_sq=args.g1_sq, g2_sq=args.g2_sq,
        tau_count=args.tau_count, cp_len=args.cp,
    )
    _write_text(args.out, surface.format_csv())
    return 0


def _cmd_plot(args) -> int:
    from .plots import emit_plot

    try:
        with open(args.csv) as fh:
            header = fh.readline().strip()
    except OSError as exc:
        raise ConfigError(f"cannot read {args.csv}: {exc}") from exc
    if header.startswith("n,tau_over_Ts"):
        data = _load_surface_csv(args.csv)
    elif header.startswith("scheme,"):
        data = _load_ber_csv(args.csv)
    else:
        raise ConfigError(f"unrecognized CSV header: {header!r}")
    emit_plot(data, args.out)
    return 0


def _load_ber_csv(path):
    points = []
    with open(path) as fh:
        next(fh)
        for line in fh:
            if not line.strip():
                continue
            scheme, tau, snr, bits, errs, ber, ci = line.strip().split(",")
            points.append(BerPoint(
                scheme=scheme, tau=float(tau), p_over_n0_db=float(snr),
                payload_bits=int(bits), bit_errors=int(errs),
                ber=float(ber), ci95=float(ci),
            ))
    if not points:
        raise ConfigError(f"no data rows in {path}")
    return points


def _load_surface_csv(path):
    rows = np.loadtxt(path, delimiter=",", skiprows=1)
    if rows.size == 0:
        raise ConfigError(f"no data rows in {path}")
    rows = np.atleast_2d(rows)
    taus = np.unique(rows[:, 1])
    n = int(rows[:, 0].max()) + 1
    gamma = rows[:, 2].reshape(len(taus), n)
    return SnrSurface(
        taus=taus, n_subcarriers=n, gamma_db=gamma,
        p_over_n0_db=float("nan"), split=(0.5, 0.25), beta=0.9,
        g1_sq=1.0, g2_sq=1.0,
    )


def _write_text(path, text) -> None:
    if path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", newline="") as fh:
        fh.write(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dstcsim",
        description="Two-relay differential space-time coding simulator",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    sim = subs.add_parser("simulate", help="estimate BER at one point")
    _add_common_flags(sim)
    sim.add_argument("--out", default="point.csv")
    sim.set_defaults(func=_cmd_simulate)

    sweep = subs.add_parser("sweep", help="BER over schemes x taus x P/N0")
    _add_common_flags(sweep)
    sweep.add_argument("--schemes", help="comma list (coherent runs at tau=0)")
    sweep.add_argument("--taus", help="comma list of fractional delays")
    sweep.add_argument("--out", default="ber.csv")
    sweep.set_defaults(func=_cmd_sweep)

    surf = subs.add_parser("snr-surface", help="closed-form SNR grid")
    surf.add_argument("--n", type=int, default=64)
    surf.add_argument("--cp", type=int, default=1)
    surf.add_argument("--beta", type=float, default=0.9)
    surf.add_argument("--snr-db", dest="snr_db", type=float, default=25.0)
    surf.add_argument("--split", default="0.5,0.25")
    surf.add_argument("--g1-sq", dest="g1_sq", type=float, default=1.0)
    surf.add_argument("--g2-sq", dest="g2_sq", type=float, default=1.0)
    surf.add_argument("--tau-count", dest="tau_count", type=int, default=33)
    surf.add_argument("--out", default="surface.csv")
    surf.set_defaults(func=_cmd_snr_surface)

    plot = subs.add_parser("plot", help="render a CSV to SVG")
    plot.add_argument("csv")
    plot.add_argument("--out", default="plot.svg")
    plot.set_defaults(func=_cmd_plot)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
