"""Experiment runners behind the command line: simulate, sweep, geneprobe.

Every policy in a trial sees the same contexts, masks and reward noise. The
environment owns one generator stream per trial; each policy gets its own
stream, so adding a policy never shifts what the others see.
"""

from __future__ import annotations

import copy
import csv
import hashlib
import io
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .bandit import baseline_policy
from .config import ExperimentConfig
from .environments import SyntheticEnvironment, make_beta, regret_of
from .errors import ConfigurationError
from .geneprobe import (
    ProbeBanditConfig,
    load_expression,
    make_planted_fixture,
    run_probe_selection,
    significant_probes,
)
from .solver import SolverOptions

log = logging.getLogger(__name__)

RUNLOG_SCHEMA_VERSION = 1
RUNLOG_COLUMNS = ("trial", "t", "policy", "chosen_arm", "reward", "regret", "cumulative_regret",
                  "eta_t", "zeta_min_hat", "beta_l1", "solver_iterations")
SWEEP_COLUMNS = ("zeta", "zeta_min", "policy", "trials", "regret_mean", "regret_sd",
                 "normalized_regret")
SUCCESS_COLUMNS = ("t", "success_rate", "trials")


@dataclass
class SimulationResult:
    rows: list
    final_regret: dict
    trajectory_hashes: list = field(default_factory=list)


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_csv(path, columns, rows) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r[c]) for c in columns])
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


def _prepare_output(out_dir) -> Path:
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write_test"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise ConfigurationError(f"output directory {out} is not writable: {exc}") from None
    return out


def normalization_factor(zeta_min: float, s0: int, T: int, d: int) -> float:
    """``zeta_min**2 / sqrt(s0 * T * log(d * T))``."""
    return zeta_min**2 / math.sqrt(s0 * T * math.log(d * T))


def _simulate_trial(cfg: ExperimentConfig, trial: int, seed_seq: np.random.SeedSequence):
    env_cfg = cfg.env
    # one stream per policy is reserved after the environment's; the greedy
    # policies draw nothing, but a stochastic one could not shift the others
    env_ss = seed_seq.spawn(1 + len(cfg.policies))[0]
    env_rng = np.random.default_rng(env_ss)
    beta = make_beta(env_cfg.d, env_cfg.s0, env_cfg.b, env_rng)
    env = SyntheticEnvironment(env_cfg, env_rng)
    opts = SolverOptions(cfg.solver.rel_tol, cfg.solver.max_iter)
    radius = cfg.resolved_radius()
    policies = [
        baseline_policy(p, env_cfg.d, eta1=cfg.bandit.eta1, radius=radius, beta_star=beta,
                        ridge=cfg.bandit.ridge, floor=cfg.bandit.floor,
                        resolve=cfg.bandit.resolve, solver_opts=opts)
        for p in cfg.policies
    ]
    hashes = [hashlib.sha256() for _ in policies]
    cum = [0.0] * len(policies)
    rows = []
    for t in range(1, env_cfg.T + 1):
        rnd = env.sample_round()
        eps = float(env_rng.standard_normal()) * env_cfg.noise_sd

        def reward_fn(a, rnd=rnd, eps=eps):
            return float(rnd.x[a] @ beta) + eps

        def regret_fn(a, rnd=rnd):
            return regret_of(rnd, beta, a)

        for k, (name, pol) in enumerate(zip(cfg.policies, policies)):
            h = hashes[k]
            h.update(rnd.x.tobytes())
            h.update(rnd.u.tobytes())
            h.update(np.float64(eps).tobytes())
            o = pol.play(rnd, reward_fn, regret_fn)
            cum[k] += o.regret
            rows.append({
                "trial": trial, "t": t, "policy": name, "chosen_arm": o.chosen_arm,
                "reward": o.reward, "regret": o.regret, "cumulative_regret": cum[k],
                "eta_t": o.eta_t, "zeta_min_hat": o.zeta_min_hat, "beta_l1": o.beta_l1,
                "solver_iterations": o.solver_iterations,
            })
    digests = {name: h.hexdigest() for name, h in zip(cfg.policies, hashes)}
    return rows, dict(zip(cfg.policies, cum)), digests


def simulate(cfg: ExperimentConfig) -> SimulationResult:
    """Run every trial and policy in memory; no files are written."""
    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.trials)
    args = [(cfg, i, s) for i, s in enumerate(seeds)]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as ex:
            results = list(ex.map(_simulate_trial, *zip(*args)))
    else:
        results = [_simulate_trial(*a) for a in args]
    rows, final, hashes = [], {p: [] for p in cfg.policies}, []
    # results come back in trial order either way, so the log is ordered by (trial, t)
    for i, (trial_rows, trial_final, trial_hash) in enumerate(results):
        log.info("trial %d/%d: %s", i + 1, cfg.trials,
                 ", ".join(f"{p}={v:.3f}" for p, v in trial_final.items()))
        rows.extend(trial_rows)
        for p, v in trial_final.items():
            final[p].append(v)
        hashes.append(trial_hash)
    return SimulationResult(rows=rows, final_regret=final, trajectory_hashes=hashes)


def _regret_summary(final: dict) -> dict:
    out = {}
    for p, vals in final.items():
        a = np.asarray(vals, dtype=float)
        out[p] = {"mean": float(a.mean()), "sd": float(a.std(ddof=1)) if a.size > 1 else 0.0,
                  "trials": int(a.size)}
    return out


def run_simulate(cfg: ExperimentConfig, out_dir=None) -> dict:
    """Write ``runlog.csv`` and ``summary.json``; return the summary."""
    out = _prepare_output(out_dir or cfg.output_dir)
    res = simulate(cfg)
    write_csv(out / "runlog.csv", RUNLOG_COLUMNS, res.rows)
    summary = {
        "mode": "simulate",
        "schema_version": RUNLOG_SCHEMA_VERSION,
        "reward_source": "true contexts of the pulled arm; learners see masked contexts only",
        "T": cfg.env.T,
        "final_cumulative_regret": _regret_summary(res.final_regret),
        "trajectory_hashes": res.trajectory_hashes,
        "shared_trajectories": all(len(set(h.values())) == 1 for h in res.trajectory_hashes),
    }
    (out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    return summary


def run_sweep(cfg: ExperimentConfig, out_dir=None) -> dict:
    """Simulate once per missingness level and tabulate rate-normalized regret."""
    out = _prepare_output(out_dir or cfg.output_dir)
    rows = []
    for z in cfg.sweep.zeta_grid:
        sub = copy.deepcopy(cfg)
        sub.env.zeta = float(z)
        sub.env.validate()
        summary = run_simulate(sub, out / f"zeta_{z:g}")
        zmin = float(sub.env.zeta_vector().min())
        scale = normalization_factor(zmin, sub.env.s0, sub.env.T, sub.env.d)
        for p, s in summary["final_cumulative_regret"].items():
            rows.append({"zeta": float(z), "zeta_min": zmin, "policy": p, "trials": s["trials"],
                         "regret_mean": s["mean"], "regret_sd": s["sd"],
                         "normalized_regret": s["mean"] * scale})
    write_csv(out / "sweep.csv", SWEEP_COLUMNS, rows)
    spread = {}
    for p in cfg.policies:
        norm = [r["normalized_regret"] for r in rows if r["policy"] == p]
        raw = [r["regret_mean"] for r in rows if r["policy"] == p]
        spread[p] = {"normalized_max_over_min": _ratio(norm), "raw_max_over_min": _ratio(raw)}
    summary = {"mode": "sweep", "zeta_grid": list(cfg.sweep.zeta_grid), "spread": spread}
    (out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    return summary


def _ratio(vals) -> float | None:
    vals = [v for v in vals if v > 0]
    return max(vals) / min(vals) if vals else None


def probe_config(cfg: ExperimentConfig, policy: str) -> ProbeBanditConfig:
    g = cfg.geneprobe
    return ProbeBanditConfig(
        policy=policy, T=g.T, arms_per_round=g.arms_per_round, center=g.center, eta1=g.eta1,
        radius=g.radius, floor=cfg.bandit.floor, ridge=cfg.bandit.ridge,
        resolve=cfg.bandit.resolve, reward_noise_sd=g.reward_noise_sd,
        rel_tol=cfg.solver.rel_tol, max_iter=cfg.solver.max_iter,
    )


def load_probe_dataset(cfg: ExperimentConfig):
    g = cfg.geneprobe
    if g.dataset is not None:
        return load_expression(g.dataset, raw_counts=g.raw_counts)
    f = g.fixture
    return make_planted_fixture(n_probes=f.n_probes, n_signal=f.n_signal, m1=f.m1, m2=f.m2,
                                shift=f.shift, zero_frac=f.zero_frac, seed=f.seed)


def time_to(series, level: float) -> int | None:
    hit = np.nonzero(np.asarray(series) >= level)[0]
    return int(hit[0]) + 1 if hit.size else None


def run_geneprobe(cfg: ExperimentConfig, out_dir=None) -> dict:
    """Write ``success_<policy>.csv`` per policy and ``summary.json``."""
    out = _prepare_output(out_dir or cfg.output_dir)
    dataset = load_probe_dataset(cfg)
    significant = significant_probes(dataset)
    per_policy = {}
    for p in cfg.policies:
        series = run_probe_selection(dataset, probe_config(cfg, p), cfg.trials, seed=cfg.seed,
                                     significant=significant)
        rows = [{"t": t + 1, "success_rate": float(v), "trials": cfg.trials}
                for t, v in enumerate(series)]
        write_csv(out / f"success_{p}.csv", SUCCESS_COLUMNS, rows)
        tail = series[-max(1, len(series) // 10):]
        per_policy[p] = {"time_to_0.9": time_to(series, 0.9),
                         "final_window_mean": float(np.mean(tail))}
    summary = {"mode": "geneprobe", "n_probes": dataset.n_probes,
               "n_significant": int(significant.sum()), "policies": per_policy}
    (out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    return summary


RUNNERS = {"simulate": run_simulate, "sweep": run_sweep, "geneprobe": run_geneprobe}


def run(cfg: ExperimentConfig, out_dir=None) -> dict:
    try:
        runner = RUNNERS[cfg.mode]
    except KeyError:
        raise ConfigurationError(f"unknown mode {cfg.mode!r}") from None
    return runner(cfg, out_dir)
