"""Command-line entry point: ``relaysim run | pep | complexity``."""
from __future__ import annotations

import argparse
import csv
import logging
import sys

import numpy as np

from .analysis import DEFAULT_W, ComplexityModel, mmd_op_count, qn_op_count
from .errors import ConfigurationError, UsageError
from .experiment import (
    emit_csv,
    emit_pep_csv,
    emit_plot_data,
    load_config,
    run_campaign,
    run_pep_campaign,
)


def parse_int_range(text: str) -> list[int]:
    """``"1..4"`` -> [1, 2, 3, 4]; ``"3,5,10"`` -> [3, 5, 10]."""
    out: list[int] = []
    for part in text.split(","):
        if ".." in part:
            lo, hi = part.split("..")
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out


def parse_float_grid(text: str) -> list[float]:
    """``"0:12:2"`` (inclusive) or a comma list."""
    if ":" in text:
        parts = [float(p) for p in text.split(":")]
        start, stop = parts[0], parts[1]
        step = parts[2] if len(parts) > 2 else 1.0
        return [float(x) for x in np.round(np.arange(start, stop + step / 2, step), 9)]
    return [float(p) for p in text.split(",")]


def _cmd_run(args) -> None:
    config = load_config(args.config)
    if args.packets is not None:
        config = config.replace(packets=args.packets)
    records = run_campaign(config, workers=args.workers)
    emit_csv(records, args.out)
    if args.plot_data:
        emit_plot_data(records, args.plot_data)


def _cmd_pep(args) -> None:
    records = run_pep_campaign(
        parse_int_range(args.n), parse_float_grid(args.snr), slots=args.slots,
        criteria=args.criteria.split(","), M=args.m, J=args.j,
        constellation=args.constellation, seed=args.seed, workers=args.workers,
    )
    if args.out:
        emit_pep_csv(records, args.out)
    else:
        emit_pep_csv(records, sys.stdout)
    if args.plot_data:
        emit_plot_data(records, args.plot_data)


def _cmd_complexity(args) -> None:
    W = args.w if args.w is not None else DEFAULT_W[args.constellation]
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.writer(fh)
    w.writerow(["m", "n", "w", "x", "mmd_add", "mmd_mul", "qn_add", "qn_mul"])
    for n in parse_int_range(args.n):
        for m in parse_int_range(args.m):
            X, add, mul = mmd_op_count(ComplexityModel(n, m, W))
            w.writerow([m, n, W, X, add, mul, *qn_op_count(n, m)])
    if args.out:
        fh.close()


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="relaysim", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="BER campaign from a config file")
    run.add_argument("--config", required=True)
    run.add_argument("--out", required=True, help="output CSV")
    run.add_argument("--workers", type=int, default=1)
    run.add_argument("--packets", type=int, help="override the packet budget")
    run.add_argument("--plot-data", metavar="DIR", help="write one .dat file per curve")
    run.set_defaults(func=_cmd_run)

    pep = sub.add_parser("pep", help="mean worst-case PEP of MMD/QN Max-Link")
    pep.add_argument("--n", default="3,5,10", help="relay counts, e.g. 3,5,10")
    pep.add_argument("--snr", default="0:12:2", help="SNR grid in dB, start:stop:step or list")
    pep.add_argument("--slots", type=int, default=10_000)
    pep.add_argument("--criteria", default="mmd,qn")
    pep.add_argument("--m", type=int, default=2)
    pep.add_argument("--j", type=int, default=4)
    pep.add_argument("--constellation", default="bpsk", choices=["bpsk", "qpsk"])
    pep.add_argument("--seed", type=int, default=1)
    pep.add_argument("--workers", type=int, default=1)
    pep.add_argument("--out")
    pep.add_argument("--plot-data", metavar="DIR")
    pep.set_defaults(func=_cmd_pep)

    cx = sub.add_parser("complexity", help="MMD vs QN operation counts")
    cx.add_argument("--m", default="1..4", help="antenna counts, e.g. 1..4")
    cx.add_argument("--n", default="3")
    cx.add_argument("--w", type=int, help="distinct symbol distances (default per constellation)")
    cx.add_argument("--constellation", default="bpsk", choices=["bpsk", "qpsk"])
    cx.add_argument("--out")
    cx.set_defaults(func=_cmd_complexity)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except (ConfigurationError, UsageError) as exc:
        print(f"relaysim: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
