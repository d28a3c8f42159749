"""Command-line entry point: run a configured Monte-Carlo scenario to CSV outputs."""

from __future__ import annotations

import argparse
import sys

from .config import parse_config
from .errors import SensingError
from .harness import export, run_scenario, scenario_doppler_map, summarize


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="refcal",
        description="Reference-path-aided calibration and sensing simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario config and write result files")
    run.add_argument("config", help="path to the scenario INI file")
    run.add_argument("--out", required=True, help="output directory for CSVs and manifest")
    run.add_argument("--trials", type=int, default=None, help="override run.num_trials")
    run.add_argument("--seed", type=int, default=None, help="override run.seed")
    run.add_argument("--snr-db", default=None,
                     help="override run.snr_db_list (comma-separated dB values)")
    run.add_argument("--no-noise", action="store_true", help="disable additive noise")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = parse_config(args.config)
        if args.trials is not None:
            config["run"]["num_trials"] = args.trials
        if args.seed is not None:
            config["run"]["seed"] = args.seed
        if args.snr_db is not None:
            config["run"]["snr_db_list"] = [float(v) for v in args.snr_db.split(",")]
        if args.no_noise:
            config["run"]["no_noise"] = True
        config.validate()

        records = run_scenario(config, progress=sys.stderr)
        summary = summarize(records)
        doppler = scenario_doppler_map(config) if config["pipeline"]["export_doppler_map"] else None
        written = export(records, summary, args.out, config, doppler=doppler)
    except (SensingError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    print(f"wrote {len(written)} files to {args.out}", file=sys.stderr)
    for name, stats in summary.metrics.items():
        if stats["count"]:
            print(f"{name}: mean={stats['mean']:.4g} p50={stats['p50']:.4g} "
                  f"p95={stats['p95']:.4g} max={stats['max']:.4g} (n={int(stats['count'])})",
                  file=sys.stderr)
    if summary.num_failed:
        print(f"failed trials: {summary.num_failed}/{summary.num_trials}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
