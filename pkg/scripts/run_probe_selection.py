"""Success rate of sequential probe selection, one series per policy."""

from pathlib import Path

from _common import config_from_args
from sambandit.experiments import run_geneprobe
from sambandit.plots import emit_plots

cfg = config_from_args("probes.yaml", __doc__)
summary = run_geneprobe(cfg)
print(f"{summary['n_significant']} of {summary['n_probes']} probes significant on the full data")
for policy, s in summary["policies"].items():
    print(f"{policy:6s} final-window success {s['final_window_mean']:.3f}, "
          f"first reaches 0.9 at pull {s['time_to_0.9']}")
    print(emit_plots(Path(cfg.output_dir) / f"success_{policy}.csv"))
