"""Experiment configuration: nested dataclasses with a YAML round trip.

Every tunable the runners use lives here, so nothing numeric is hidden in
the experiment code. Unknown keys are rejected rather than ignored.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import yaml

from .bandit import POLICIES
from .environments import SyntheticEnvConfig
from .errors import ConfigurationError
from .estimators import DEFAULT_FLOOR

MODES = ("simulate", "sweep", "geneprobe")


@dataclass
class BanditSettings:
    eta1: float = 1.0
    # None means 2 * b * d**0.25, which keeps the true parameter inside the ball
    radius: float | None = None
    floor: float = DEFAULT_FLOOR
    ridge: float = 1.0
    resolve: str = "every"


@dataclass
class SolverSettings:
    rel_tol: float = 1e-8
    max_iter: int = 500


@dataclass
class SweepSettings:
    zeta_grid: list = field(default_factory=lambda: [0.65, 0.75, 0.9])


@dataclass
class FixtureSettings:
    n_probes: int = 2000
    n_signal: int = 50
    m1: int = 38
    m2: int = 34
    shift: float = 2.0
    zero_frac: float = 0.15
    seed: int = 0


@dataclass
class GeneprobeSettings:
    # None selects the planted synthetic fixture described by ``fixture``
    dataset: str | None = None
    raw_counts: bool = False
    T: int = 500
    arms_per_round: int | None = 200
    center: bool = True
    eta1: float = 0.1
    radius: float = 20.0
    reward_noise_sd: float = 0.0
    fixture: FixtureSettings = field(default_factory=FixtureSettings)


@dataclass
class ExperimentConfig:
    mode: str = "simulate"
    seed: int = 0
    trials: int = 20
    output_dir: str = "runs"
    workers: int = 1
    policies: list = field(default_factory=lambda: ["sam", "naive_lasso"])
    env: SyntheticEnvConfig = field(default_factory=SyntheticEnvConfig)
    bandit: BanditSettings = field(default_factory=BanditSettings)
    solver: SolverSettings = field(default_factory=SolverSettings)
    sweep: SweepSettings = field(default_factory=SweepSettings)
    geneprobe: GeneprobeSettings = field(default_factory=GeneprobeSettings)

    def __post_init__(self):
        # the top-level seed is the only one the runners read
        self.env.seed = self.seed
        self.validate()

    def validate(self) -> None:
        if self.mode not in MODES:
            raise ConfigurationError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.trials < 1:
            raise ConfigurationError(f"trials must be >= 1, got {self.trials}")
        if self.workers < 1:
            raise ConfigurationError(f"workers must be >= 1, got {self.workers}")
        bad = [p for p in self.policies if p not in POLICIES]
        if bad or not self.policies:
            raise ConfigurationError(f"unknown or empty policy list {self.policies}; "
                                     f"choose from {POLICIES}")
        if len(set(self.policies)) != len(self.policies):
            raise ConfigurationError("policies must not repeat")
        if self.bandit.resolve not in ("every", "doubling"):
            raise ConfigurationError("resolve must be 'every' or 'doubling'")
        if self.bandit.radius is not None and not self.bandit.radius > 0:
            raise ConfigurationError("radius must be > 0")
        if not self.sweep.zeta_grid or any(not 0 < z <= 1 for z in self.sweep.zeta_grid):
            raise ConfigurationError("zeta_grid must be non-empty with entries in (0, 1]")
        if self.mode == "geneprobe":
            if "oracle" in self.policies:
                raise ConfigurationError("the oracle policy needs true parameters, which the "
                                         "expression data does not have")
            path = self.geneprobe.dataset
            if path is not None and not Path(path).is_file():
                raise ConfigurationError(f"dataset {path} does not exist")

    def resolved_radius(self) -> float:
        if self.bandit.radius is not None:
            return self.bandit.radius
        return 2.0 * self.env.b * self.env.d ** 0.25

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        return _build(cls, data, "config")


_NESTED = {
    "env": SyntheticEnvConfig,
    "bandit": BanditSettings,
    "solver": SolverSettings,
    "sweep": SweepSettings,
    "geneprobe": GeneprobeSettings,
    "fixture": FixtureSettings,
}


def _build(cls, data, where: str):
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigurationError(f"{where}: expected a mapping, got {type(data).__name__}")
    names = {f.name for f in fields(cls)}
    unknown = sorted(set(data) - names)
    if unknown:
        raise ConfigurationError(f"{where}: unknown keys {unknown}")
    kw = {}
    for k, v in data.items():
        sub = _NESTED.get(k)
        kw[k] = _build(sub, v, f"{where}.{k}") if sub is not None and isinstance(v, dict) else v
    try:
        return cls(**kw)
    except TypeError as exc:
        raise ConfigurationError(f"{where}: {exc}") from None


def dump_config(cfg: ExperimentConfig) -> str:
    return yaml.safe_dump(cfg.to_dict(), sort_keys=False)


def parse_config(text: str) -> ExperimentConfig:
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigurationError(f"config is not valid YAML: {exc}") from None
    return ExperimentConfig.from_dict(data)


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigurationError(f"config file {path} does not exist")
    return parse_config(path.read_text(encoding="utf-8"))


def save_config(cfg: ExperimentConfig, path) -> None:
    Path(path).write_text(dump_config(cfg), encoding="utf-8")

