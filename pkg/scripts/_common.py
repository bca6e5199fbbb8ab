import argparse
from pathlib import Path

from sambandit.config import load_config

ROOT = Path(__file__).resolve().parent.parent


def config_from_args(default_config: str, description: str):
    parser = argparse.ArgumentParser(description=description)
    parser.add_argument("--config", default=str(ROOT / "configs" / default_config))
    parser.add_argument("--trials", type=int)
    parser.add_argument("--out")
    args = parser.parse_args()
    cfg = load_config(args.config)
    if args.trials is not None:
        cfg.trials = args.trials
    if args.out is not None:
        cfg.output_dir = args.out
    cfg.validate()
    return cfg
