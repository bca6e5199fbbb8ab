"""Cumulative regret per policy under missing covariates, with a regret chart."""

from pathlib import Path

from _common import config_from_args
from sambandit.experiments import run_simulate
from sambandit.plots import emit_plots

cfg = config_from_args("missingness.yaml", __doc__)
summary = run_simulate(cfg)
for policy, s in summary["final_cumulative_regret"].items():
    print(f"{policy:12s} {s['mean']:10.2f} +- {s['sd']:.2f}  ({s['trials']} trials)")
print(emit_plots(Path(cfg.output_dir) / "runlog.csv"))
