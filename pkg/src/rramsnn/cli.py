"""Command-line entry point.

Subcommands mirror the experiment suite: `train`, `sweep-lr`,
`sweep-levels`, `sweep-n`, `single-device`, `device-gen` and
`crossbar-plan`. Experiment parameters come from a TOML config file
(`--config`), with `--seed` overriding the master seed.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import device as dev
from .crossbar import Arrangement, best_arrangement, max_read_error
from .harness import (
    ExperimentConfig,
    load_config,
    run_training,
    single_device_experiment,
    sweep_learning_rate,
    sweep_levels,
    sweep_n,
)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="TOML experiment config")
    p.add_argument("--seed", type=int, help="master seed override")
    p.add_argument("--out", type=Path, required=True, help="output directory")


def _resolve_config(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    return cfg


def _floats(text: str):
    return [float(x) for x in text.split(",") if x.strip()]


def _ints(text: str):
    return [int(x) for x in text.split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rramsnn")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train one configuration")
    _add_common(p)

    p = sub.add_parser("sweep-lr", help="learning-rate (a+, a-) surface")
    _add_common(p)
    p.add_argument("--a-plus", default="0.02,0.35", help="comma list")
    p.add_argument("--a-minus", default="0.02,0.35", help="comma list")

    p = sub.add_parser("sweep-levels", help="conductance-level sweep")
    _add_common(p)
    p.add_argument("--levels", default="2,4,16,64,256,1024", help="comma list")

    p = sub.add_parser("sweep-n", help="multi-device count sweep")
    _add_common(p)
    p.add_argument("--n", default="2,4,16,36,64,100", help="comma list")

    p = sub.add_parser("single-device", help="single-device failure runs")
    _add_common(p)
    p.add_argument("--ics", type=int, default=2, help="initial conditions")

    p = sub.add_parser("device-gen", help="emit a device table CSV")
    p.add_argument("--out", type=Path, required=True, help="output CSV path")
    p.add_argument("--learning-rate", type=float, default=0.5)
    p.add_argument("--noise-sigma", type=float, default=0.0)
    p.add_argument("--iterations", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("crossbar-plan", help="best R x C arrangement")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k-wire", type=float, default=1.0)
    p.add_argument("--out", type=Path, help="write factorization table CSV")
    return ap


def cmd_device_gen(args) -> None:
    pulse = dev.default_pulse()
    mem = dev.default_memristor(learning_rate=args.learning_rate,
                                noise_sigma=args.noise_sigma)
    if args.noise_sigma > 0:
        rng = np.random.default_rng(args.seed)
        scatter = dev.measure_stdp_protocol(mem, pulse, pulse,
                                            args.iterations, rng)
        table = dev.build_table(scatter, mem, pulse, pulse)
    else:
        table = dev.table_from_model(mem, pulse, pulse)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    dev.save_table_csv(table, args.out)
    print(f"wrote {args.out}")


def cmd_crossbar_plan(args) -> None:
    best = best_arrangement(args.n, args.k_wire)
    print(f"n={args.n} best arrangement: {best.rows} x {best.cols} "
          f"(max read error {max_read_error(best)})")
    if args.out:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        with open(args.out, "w", newline="") as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow(["rows", "cols", "max_read_error", "best"])
            for r in range(1, args.n + 1):
                if args.n % r:
                    continue
                c = args.n // r
                a = Arrangement(r, c, args.k_wire)
                w.writerow([r, c, repr(float(max_read_error(a))),
                            int((r, c) == (best.rows, best.cols))])
        print(f"wrote {args.out}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)

    if args.command == "device-gen":
        cmd_device_gen(args)
        return 0
    if args.command == "crossbar-plan":
        cmd_crossbar_plan(args)
        return 0

    cfg = _resolve_config(args)
    if args.command == "train":
        stats = run_training(cfg, out_dir=args.out)
        print(f"mean last-5-epoch CA: {stats.last5_mean():.2f}% "
              f"(peak {stats.peak_ca():.2f}%)")
    elif args.command == "sweep-lr":
        pairs = [(ap_, am) for ap_ in _floats(args.a_plus)
                 for am in _floats(args.a_minus)]
        results = sweep_learning_rate(pairs, cfg, out_dir=args.out)
        for (ap_, am), stats in sorted(results.items()):
            print(f"a+={ap_:g} a-={am:g}: CA {stats.last5_mean():.2f}%")
    elif args.command == "sweep-levels":
        results = sweep_levels(_ints(args.levels), cfg, out_dir=args.out)
        for key in results:
            print(f"levels={key}: mean CE {results[key].ce.mean():.2f}%")
    elif args.command == "sweep-n":
        results = sweep_n(_ints(args.n), cfg, out_dir=args.out)
        for n, stats in results.items():
            print(f"n={n}: mean last-5 CA {stats.last5_mean():.2f}%")
    elif args.command == "single-device":
        results = single_device_experiment(cfg, n_ics=args.ics, out_dir=args.out)
        for ic, stats in results.items():
            print(f"IC-{ic + 1}: mean last-5 CA {stats.last5_mean():.2f}%")
    return 0


if __name__ == "__main__":
    sys.exit(main())
