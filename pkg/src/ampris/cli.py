"""Command-line front end.

Examples::

    ampris --preset table2 --iters 10000 --out table2.csv
    ampris --config scenario.ini --sweep P_t_dBm=-10:30:5 --metrics rate,ber
    ampris --config scenario.ini --metrics rate,ee,ptot --format json
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

from . import __version__
from .config import ConfigError, SystemConfig, parse_config
from .sweep import METRICS, PRESETS, SWEEP_VARIABLES, SweepSpec, emit, evaluate_point, run_preset, run_sweep

log = logging.getLogger("ampris")


def parse_values(text: str) -> list:
    """'a,b,c' or an inclusive range 'start:stop:step'."""
    if ":" in text:
        parts = [float(p) for p in text.split(":")]
        if len(parts) != 3 or parts[2] == 0:
            raise ValueError(f"range must be start:stop:step with non-zero step, got {text!r}")
        start, stop, step = parts
        n = int(round((stop - start) / step))
        if n < 0:
            raise ValueError(f"empty range {text!r}")
        return [start + i * step for i in range(n + 1)]
    return [float(v) for v in text.split(",") if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ampris", description=__doc__.split("\n")[0],
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--config", metavar="PATH", help="sectioned key=value scenario file")
    what = p.add_mutually_exclusive_group()
    what.add_argument("--preset", choices=sorted(PRESETS), help="figure/table reproduction preset")
    what.add_argument("--sweep", metavar="VAR=VALUES",
                      help=f"sweep one of {sorted(SWEEP_VARIABLES)} over 'a,b,c' or 'start:stop:step'")
    p.add_argument("--metrics", default="rate,ee,ptot",
                   help=f"comma list from {','.join(METRICS)} (sweeps and single runs)")
    p.add_argument("--iters", type=int, metavar="K", help="override n_iterations")
    p.add_argument("--seed", type=int, metavar="S", help="override the config seed")
    p.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--threads", type=int, default=min(8, os.cpu_count() or 1), help="worker threads")
    p.add_argument("-v", "--verbose", action="store_true", help="log one line per sweep point")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        config = parse_config(args.config) if args.config else SystemConfig()
        overrides = {}
        if args.iters is not None:
            overrides["n_iterations"] = args.iters
        if args.seed is not None:
            overrides["seed"] = args.seed
        config = config.replace(**overrides)
        threads = max(1, args.threads)
        metrics = tuple(m.strip() for m in args.metrics.split(",") if m.strip())

        if args.preset:
            table = run_preset(args.preset, config, threads=threads)
        elif args.sweep:
            var, sep, values = args.sweep.partition("=")
            if not sep:
                raise ValueError(f"--sweep expects VAR=VALUES, got {args.sweep!r}")
            spec = SweepSpec(var.strip(), tuple(parse_values(values)), metrics, config)
            table = run_sweep(spec, threads=threads)
        else:
            bad = [m for m in metrics if m not in METRICS]
            if bad or not metrics:
                raise ValueError(f"unknown metrics {bad}; choose from {METRICS}")
            table = evaluate_point(config, metrics, threads=threads)

        text = emit(table, args.format, args.out)
        if args.out is None:
            sys.stdout.write(text)
    except ConfigError as exc:
        print(f"ampris: config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:
        print(f"ampris: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
