"""Command line: ``sambandit {simulate,sweep,geneprobe,plot}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .config import ExperimentConfig, load_config
from .errors import SamBanditError
from .experiments import run
from .plots import emit_plots


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sambandit",
                                     description="Sparse contextual bandits with missing covariates")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)
    for mode in ("simulate", "sweep", "geneprobe"):
        p = sub.add_parser(mode, help=f"run the {mode} experiment")
        p.add_argument("--config", help="YAML experiment file; defaults apply when omitted")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--out", help="output directory (overrides output_dir)")
        p.add_argument("--trials", type=int, help="override the number of trials")
        if mode == "geneprobe":
            p.add_argument("--raw-counts", action="store_true",
                           help="apply log(1+x) to the dataset on load")
            p.add_argument("--dataset", help="expression TSV (overrides the config)")
    p = sub.add_parser("plot", help="render SVG charts from result CSVs")
    p.add_argument("csv", nargs="+", help="run log, sweep table or success series")
    p.add_argument("--out", help="directory for the SVG files (default: next to each CSV)")
    return parser


def _experiment_config(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig(mode=args.command)
    data = cfg.to_dict()
    data["mode"] = args.command
    if args.seed is not None:
        data["seed"] = args.seed
    if args.trials is not None:
        data["trials"] = args.trials
    if args.out is not None:
        data["output_dir"] = args.out
    if args.command == "geneprobe":
        if args.raw_counts:
            data["geneprobe"]["raw_counts"] = True
        if args.dataset is not None:
            data["geneprobe"]["dataset"] = args.dataset
    return ExperimentConfig.from_dict(data)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "plot":
            for path in args.csv:
                print(emit_plots(path, args.out))
            return 0
        cfg = _experiment_config(args)
        summary = run(cfg)
        print(json.dumps(summary, indent=2))
        return 0
    except (SamBanditError, OSError) as exc:
        msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        print(f"sambandit: error: {msg}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
