"""``exportcast <ingest|train|evaluate|forecast> --config PATH``"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import pipeline
from .config import ConfigError, load_config
from .ingest import IngestError, country_code

EXIT_ERROR = 1
EXIT_INPUT = 2


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="exportcast",
                                description="Quarterly export forecasting with an MLP.")
    p.add_argument("command", choices=["ingest", "train", "evaluate", "forecast"])
    p.add_argument("--config", required=True, help="JSON run configuration")
    p.add_argument("--seed", type=int, help="override the configured seed")
    p.add_argument("--jobs", type=int, default=1, help="countries processed in parallel")
    p.add_argument("--country", action="append", metavar="CODE",
                   help="restrict to this country (repeatable)")
    p.add_argument("--kfold", type=int, nargs="?", const=0, metavar="K",
                   help="evaluate: add K-fold rows (K defaults to the config's k)")
    return p


def _resolve(args):
    cfg = load_config(args.config)
    overrides = {"seed": args.seed}
    if args.country:
        overrides["countries"] = tuple(country_code(c) for c in args.country)
    if os.environ.get("EXPORTCAST_OUT"):
        overrides["output_dir"] = os.environ["EXPORTCAST_OUT"]
    return cfg.with_overrides(**overrides)


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        cfg = _resolve(args)
    except FileNotFoundError as exc:
        print(f"exportcast: error: config not found: {exc.filename}", file=sys.stderr)
        return EXIT_INPUT
    except (ConfigError, IngestError, json.JSONDecodeError) as exc:
        print(f"exportcast: error: {args.config}: {exc}", file=sys.stderr)
        return EXIT_INPUT

    jobs = max(1, args.jobs)
    try:
        if args.command == "ingest":
            series = pipeline.run_ingest(cfg)
            for s in series:
                print(f"{s.country}: {len(s.values)} points")
            sizes = {len(s.values) for s in series}
            size = sizes.pop() if len(sizes) == 1 else "mixed"
            print(f"{size} points × {len(series)} countries")
        elif args.command == "train":
            for code in pipeline.run_train(cfg, jobs):
                print(f"{code}: trained {cfg.epochs} epochs")
        elif args.command == "evaluate":
            k = None if args.kfold is None else (args.kfold or cfg.k)
            results, mean_rs = pipeline.run_evaluate(cfg, jobs, k)
            for (metric_rows, _, _), code in zip(results, cfg.countries):
                test = next(m for _, split, m in metric_rows if split == "test")
                line = f"{code}: test mse={test.mse:.6g} mae={test.mae:.6g}"
                if mean_rs[code] is not None:
                    line += f" kfold mean r={mean_rs[code]:.4f}"
                print(line)
        else:
            table = pipeline.run_forecast(cfg, jobs)
            print(f"forecast {table.start} .. {table.stamps()[-1]} "
                  f"for {len(table.countries)} countries")
    except FileNotFoundError as exc:
        print(f"exportcast: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (pipeline.PipelineError, IngestError, ValueError, RuntimeError, OSError) as exc:
        print(f"exportcast: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return 0


if __name__ == "__main__":
    sys.exit(main())
