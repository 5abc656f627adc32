"""Command-line interface: train, sweep, summarize, plot.

Exit codes: 0 success, 1 configuration error, 2 runtime/numerical error.
"""

import argparse
import sys

from ..errors import ConfigError, NumericalError


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems are configuration errors
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ivrl",
                     description="Uncertainty-weighted RL experiment runner")
    sub = parser.add_subparsers(dest="command", required=True)

    train = sub.add_parser("train", help="run a seeded experiment grid")
    train.add_argument("--config", required=True)
    train.add_argument("--out", required=True)
    train.add_argument("--env-seed", type=int, default=None)
    train.add_argument("--net-seed", type=int, default=None)
    train.add_argument("--workers", type=int, default=1)

    sweep = sub.add_parser("sweep", help="cross-product hyperparameter sweep")
    sweep.add_argument("--config", required=True)
    sweep.add_argument("--grid", required=True)
    sweep.add_argument("--out", required=True)
    sweep.add_argument("--workers", type=int, default=1)

    summ = sub.add_parser("summarize",
                          help="episodes-to-solve percentiles for a run dir")
    summ.add_argument("--dir", required=True)
    summ.add_argument("--threshold", type=float, required=True)
    summ.add_argument("--window", type=int, default=100)

    plot = sub.add_parser("plot", help="render return/variance curves")
    plot.add_argument("--dir", required=True)
    plot.add_argument("--out", required=True)
    return parser


def _dispatch(args) -> int:
    if args.command == "train":
        from .config import load_config
        from .runner import run_experiment

        config = load_config(args.config)
        paths = run_experiment(config, args.out, workers=args.workers,
                               env_seed=args.env_seed, net_seed=args.net_seed)
        print(f"wrote {len(paths)} metrics file(s) to {args.out}")
        return 0
    if args.command == "sweep":
        import yaml

        from .config import parse_config
        from .sweep import load_grid, run_sweep

        with open(args.config) as fh:
            base_raw = yaml.safe_load(fh)
        parse_config(base_raw)  # validate the base before expanding
        grid = load_grid(args.grid)
        dirs = run_sweep(base_raw, grid, args.out, workers=args.workers)
        print(f"ran {len(dirs)} grid point(s) under {args.out}")
        return 0
    if args.command == "summarize":
        from .summary import summarize

        print(summarize(args.dir, args.threshold, args.window).format())
        return 0
    if args.command == "plot":
        from .plotting import plot_metrics

        out = plot_metrics(args.dir, args.out)
        print(f"wrote {out}")
        return 0
    raise ConfigError(f"unknown command {args.command!r}")


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return _dispatch(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (NumericalError, Exception) as exc:  # noqa: BLE001
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
