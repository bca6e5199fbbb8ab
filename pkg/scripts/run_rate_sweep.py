"""Regret across observation probabilities, raw and rate-normalized."""

import csv
from pathlib import Path

from _common import config_from_args
from sambandit.experiments import run_sweep
from sambandit.plots import emit_plots

cfg = config_from_args("rate_sweep.yaml", __doc__)
summary = run_sweep(cfg)
table = Path(cfg.output_dir) / "sweep.csv"
with open(table, newline="") as fh:
    for row in csv.DictReader(fh):
        print(f"zeta={float(row['zeta']):.2f} {row['policy']:12s} "
              f"regret={float(row['regret_mean']):9.2f} "
              f"normalized={float(row['normalized_regret']):.4f}")
for policy, s in summary["spread"].items():
    print(f"{policy}: normalized max/min = {s['normalized_max_over_min']:.2f}, "
          f"raw max/min = {s['raw_max_over_min']:.2f}")
print(emit_plots(table))
