"""Command-line front end: ``mixphase --experiment fig1_kitaev --out fig1.csv``."""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from .errors import ConfigInvalid, NumericFailure
from .experiments import (
    COLUMN_HELP,
    EXPERIMENTS,
    bundled_config_names,
    bundled_config_text,
    default_config,
    load_config,
    render,
    SweepConfig,
    run,
    with_overrides,
    write_atomic,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_IO = 4


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="mixphase",
        description="Dynamic-phase sweeps, closed form vs numeric cross-checks and witness demos.",
        epilog=COLUMN_HELP + "\nexit codes: 0 ok, 2 invalid config, 3 numeric failure, 4 I/O error.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    p.add_argument("--config", metavar="PATH", help="INI config file (a bundled name such as fig1_kitaev.cfg also works)")
    p.add_argument("--experiment", choices=EXPERIMENTS, help="experiment to run; alone, loads its bundled config")
    p.add_argument("--out", metavar="PATH", help="output file, '-' for stdout (default: config output.path or stdout)")
    p.add_argument("--format", choices=("csv", "json"), help="output format")
    p.add_argument("--n-samples", type=int, metavar="N", help="Brillouin-zone samples per loop")
    p.add_argument("--no-numeric", action="store_true", help="closed forms only")
    p.add_argument("--seed", type=int, metavar="S", help="seed for randomised witness trials")
    p.add_argument("--threads", type=int, metavar="N", help="worker threads (default: all cores)")
    p.add_argument("--list-configs", action="store_true", help="print the bundled config names and exit")
    return p


def _load(args) -> SweepConfig:
    if args.config:
        try:
            with open(args.config) as fh:
                text = fh.read()
        except FileNotFoundError:
            names = bundled_config_names()
            if args.config not in names and args.config + ".cfg" not in names:
                raise
            text = bundled_config_text(args.config)
        cfg = load_config(text)
        if args.experiment and args.experiment != cfg.experiment:
            cfg = with_overrides(cfg, experiment=args.experiment)
        return cfg
    if args.experiment:
        return default_config(args.experiment)
    raise ConfigInvalid("give --config or --experiment")


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.list_configs:
        print("\n".join(bundled_config_names()))
        return EXIT_OK
    if args.threads is not None and args.threads < 1:
        print("mixphase: --threads must be positive", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = _load(args)
        cfg = with_overrides(
            cfg,
            out_path=args.out,
            out_format=args.format,
            n_samples=args.n_samples,
            enable_numeric=False if args.no_numeric else None,
            seed=args.seed,
            threads=args.threads,
        )
        table = run(cfg)
    except ConfigInvalid as exc:
        print(f"mixphase: invalid config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericFailure as exc:
        print(f"mixphase: numeric failure at {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"mixphase: {exc}", file=sys.stderr)
        return EXIT_IO
    text = render(table, cfg.out_format)
    try:
        if cfg.out_path in (None, "-"):
            sys.stdout.write(text)
        else:
            write_atomic(cfg.out_path, text)
    except OSError as exc:
        print(f"mixphase: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
