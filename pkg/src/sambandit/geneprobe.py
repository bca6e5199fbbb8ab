"""Sequential DNA-probe selection on two-class expression data.

Each probe is an arm whose context is its expression across all samples.
Exact zeros are missing entries. Pulling a probe bootstraps each class's
replicates and pays the logit of the Welch test p-value. Success at a pull
means the chosen probe is significant (alpha = 0.05) on the full data.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.special import betainc

from .bandit import baseline_policy
from .environments import ContextRound
from .errors import ConfigurationError, DatasetError
from .solver import SolverOptions

P_CLAMP = 1e-12
ALPHA = 0.05


@dataclass(eq=False)
class ExpressionDataset:
    values: np.ndarray
    m1: int
    m2: int
    probe_ids: list = field(default_factory=list)
    class_labels: tuple = ("1", "2")

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2 or self.values.shape[1] != self.m1 + self.m2:
            raise DatasetError(
                f"values shape {self.values.shape} does not match m1+m2={self.m1 + self.m2}"
            )
        if self.m1 < 2 or self.m2 < 2:
            raise DatasetError(f"need at least 2 replicates per class, got m1={self.m1}, m2={self.m2}")
        if not np.all(np.isfinite(self.values)):
            raise DatasetError("expression values must be finite")
        if not self.probe_ids:
            self.probe_ids = [f"probe{i}" for i in range(self.n_probes)]

    @property
    def n_probes(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.m1 + self.m2

    def class_split(self, row):
        return row[: self.m1], row[self.m1:]


def load_expression(path, raw_counts: bool = False) -> ExpressionDataset:
    """Read a TSV: header ``probe_id<TAB>label...``, one probe per row.

    Sample columns must be grouped by class, the first label's columns first.
    With ``raw_counts`` the values are mapped through ``log(1 + x)``, which
    keeps zeros at zero.
    """
    path = Path(path)
    with path.open(newline="") as fh:
        rows = list(csv.reader(fh, delimiter="\t"))
    if not rows:
        raise DatasetError(f"{path}: empty file")
    header = rows[0]
    labels = header[1:]
    if len(labels) == 0:
        raise DatasetError(f"{path}:1: header has no sample columns")
    distinct = list(dict.fromkeys(labels))
    if len(distinct) != 2:
        raise DatasetError(f"{path}:1: expected exactly 2 class labels, found {distinct}")
    m1 = labels.count(distinct[0])
    if labels[:m1] != [distinct[0]] * m1:
        raise DatasetError(f"{path}:1: sample columns must be grouped by class")
    m2 = len(labels) - m1
    if m1 < 2 or m2 < 2:
        raise DatasetError(f"{path}:1: need at least 2 replicates per class, got {m1} and {m2}")

    ids, values = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != len(header):
            raise DatasetError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
        ids.append(row[0])
        parsed = []
        for col, cell in enumerate(row[1:], start=2):
            try:
                v = float(cell)
            except ValueError:
                raise DatasetError(f"{path}:{lineno}:{col}: non-numeric cell {cell!r}") from None
            if not math.isfinite(v):
                raise DatasetError(f"{path}:{lineno}:{col}: non-finite cell {cell!r}")
            parsed.append(v)
        values.append(parsed)
    if not values:
        raise DatasetError(f"{path}: no probe rows")
    arr = np.array(values)
    if raw_counts:
        if np.any(arr < 0):
            raise DatasetError(f"{path}: raw counts must be non-negative")
        arr = np.log1p(arr)
    return ExpressionDataset(arr, m1, m2, ids, (distinct[0], distinct[1]))


def save_expression(dataset: ExpressionDataset, path) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, delimiter="\t", lineterminator="\n")
        a, b = dataset.class_labels
        w.writerow(["probe_id"] + [a] * dataset.m1 + [b] * dataset.m2)
        for pid, row in zip(dataset.probe_ids, dataset.values):
            w.writerow([pid] + [repr(float(v)) for v in row])


@dataclass(frozen=True)
class WelchResult:
    t_stat: float
    dof: float
    p_value: float


def student_t_tail(t: float, dof: float) -> float:
    """Two-sided ``P(|T| >= |t|)`` via the regularized incomplete beta function."""
    if not dof > 0:
        raise ConfigurationError(f"dof must be > 0, got {dof}")
    if math.isinf(t):
        return 0.0
    x = dof / (dof + t * t)
    return float(min(max(betainc(0.5 * dof, 0.5, x), 0.0), 1.0))


def welch_t(x1, x2) -> WelchResult:
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    n1, n2 = x1.size, x2.size
    if n1 < 2 or n2 < 2:
        raise ConfigurationError("each sample needs at least 2 entries")
    m1, m2 = x1.mean(), x2.mean()
    a = x1.var(ddof=1) / n1
    b = x2.var(ddof=1) / n2
    se2 = a + b
    if se2 == 0.0:
        if m1 == m2:
            return WelchResult(0.0, float(n1 + n2 - 2), 1.0)
        return WelchResult(math.copysign(math.inf, m1 - m2), float(n1 + n2 - 2), P_CLAMP)
    dof = se2 * se2 / (a * a / (n1 - 1) + b * b / (n2 - 1))
    t = (m1 - m2) / math.sqrt(se2)
    return WelchResult(float(t), float(dof), student_t_tail(t, dof))


def _observed(v):
    return v[v != 0.0]


def welch_observed(dataset: ExpressionDataset, row) -> WelchResult:
    """Welch test on the non-missing entries of one probe; p = 1 if a class has < 2."""
    x1, x2 = dataset.class_split(row)
    x1, x2 = _observed(x1), _observed(x2)
    if x1.size < 2 or x2.size < 2:
        return WelchResult(0.0, 1.0, 1.0)
    return welch_t(x1, x2)


def logit_reward(p: float) -> float:
    p = min(max(p, P_CLAMP), 1.0 - P_CLAMP)
    return math.log((1.0 - p) / p)


def probe_reward(dataset: ExpressionDataset, probe_index: int, rng: np.random.Generator,
                 noise_sd: float = 0.0) -> float:
    """Bootstrap each class's replicates, then return the logit of the Welch p-value."""
    row = dataset.values[probe_index]
    c1, c2 = dataset.class_split(row)
    r1 = c1[rng.integers(0, dataset.m1, dataset.m1)]
    r2 = c2[rng.integers(0, dataset.m2, dataset.m2)]
    r1, r2 = _observed(r1), _observed(r2)
    if r1.size < 2 or r2.size < 2:
        p = 1.0
    else:
        p = welch_t(r1, r2).p_value
    r = logit_reward(p)
    if noise_sd > 0:
        r += noise_sd * rng.standard_normal()
    return r


def significant_probes(dataset: ExpressionDataset, alpha: float = ALPHA) -> np.ndarray:
    return np.array([welch_observed(dataset, row).p_value < alpha for row in dataset.values])


@dataclass
class ProbeBanditConfig:
    policy: str = "sam"
    T: int = 500
    arms_per_round: int | None = 200
    center: bool = True
    eta1: float = 0.1
    radius: float = 20.0
    floor: float = 1e-3
    ridge: float = 1.0
    resolve: str = "every"
    reward_noise_sd: float = 0.0
    rel_tol: float = 1e-8
    max_iter: int = 500


def run_probe_selection(dataset: ExpressionDataset, config: ProbeBanditConfig, trials: int,
                        seed: int = 0, significant=None) -> np.ndarray:
    """Success-rate series (length ``config.T``) averaged over ``trials`` runs."""
    if significant is None:
        significant = significant_probes(dataset)
    if not significant.any():
        warnings.warn("no probe is significant on the full data; success rate will be 0",
                      stacklevel=2)
    hits = np.zeros(config.T)
    seeds = np.random.SeedSequence(seed).spawn(trials)
    contexts = centered_contexts(dataset) if config.center else dataset.values
    for ss in seeds:
        hits += _one_trial(dataset, config, significant, ss, contexts)
    return hits / trials


def centered_contexts(dataset: ExpressionDataset) -> np.ndarray:
    """Subtract each probe's observed mean from its observed entries; missing stay 0.

    Raw log-expression carries a large per-probe baseline that says nothing
    about class separation but dominates the Gram matrix.
    """
    v = dataset.values
    obs = v != 0.0
    cnt = np.maximum(obs.sum(axis=1, keepdims=True), 1)
    mu = (v * obs).sum(axis=1, keepdims=True) / cnt
    return np.where(obs, v - mu, 0.0)


def _one_trial(dataset, config, significant, seed_seq, contexts):
    env_ss, pol_ss = seed_seq.spawn(2)
    env_rng = np.random.default_rng(env_ss)
    reward_rng = np.random.default_rng(pol_ss)
    n = dataset.n_probes
    K = n if config.arms_per_round is None else min(config.arms_per_round, n)
    policy = baseline_policy(
        config.policy, dataset.d, eta1=config.eta1, radius=config.radius, beta_star=None,
        ridge=config.ridge, floor=config.floor, resolve=config.resolve,
        solver_opts=SolverOptions(config.rel_tol, config.max_iter),
    )
    out = np.zeros(config.T)
    for t in range(config.T):
        arms = np.arange(n) if K == n else env_rng.choice(n, size=K, replace=False)
        x = contexts[arms]
        u = (dataset.values[arms] != 0.0).astype(float)
        round_ = ContextRound(x=x, u=u, z=x * u)

        def reward_fn(a, arms=arms):
            return probe_reward(dataset, int(arms[a]), reward_rng, config.reward_noise_sd)

        o = policy.play(round_, reward_fn)
        out[t] = float(significant[arms[o.chosen_arm]])
    return out


def make_planted_fixture(n_probes: int = 2000, n_signal: int = 50, m1: int = 38, m2: int = 34,
                         shift: float = 2.0, zero_frac: float = 0.15, sd: float = 1.0,
                         seed: int = 0) -> ExpressionDataset:
    """Synthetic log-expression with ``n_signal`` probes shifted up by ``shift * sd`` in class 1.

    Baselines are drawn per probe; ``zero_frac`` of all entries are zeroed
    completely at random to act as missing values.
    """
    rng = np.random.default_rng(seed)
    base = rng.uniform(4.0, 10.0, size=(n_probes, 1))
    values = base + sd * rng.standard_normal((n_probes, m1 + m2))
    signal = rng.choice(n_probes, size=n_signal, replace=False)
    values[np.ix_(signal, np.arange(m1))] += shift * sd
    values[rng.random(values.shape) < zero_frac] = 0.0
    ids = [f"p{i:05d}" for i in range(n_probes)]
    return ExpressionDataset(values, m1, m2, ids, ("wt", "mut"))
