"""Synthetic sparse linear bandit with MCAR-masked Gaussian contexts."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError


def default_sparsity(d: int, c: float = 1.0) -> int:
    """``round(c * sqrt(d))``, at least 1."""
    return max(1, int(round(c * np.sqrt(d))))


@dataclass
class SyntheticEnvConfig:
    K: int = 20
    d: int = 200
    s0: int | None = None
    b: float = 1.0
    rho: float = 0.5
    noise_sd: float = 0.05
    zeta: float | list = 0.8
    T: int = 2000
    seed: int = 0
    sparsity_c: float = 1.0

    def __post_init__(self):
        if self.s0 is None:
            self.s0 = default_sparsity(self.d, self.sparsity_c)
        self.validate()

    def validate(self):
        if self.K < 1 or self.d < 1 or self.T < 1:
            raise ConfigurationError("K, d and T must all be >= 1")
        if not 0 <= self.s0 <= self.d:
            raise ConfigurationError(f"s0={self.s0} must lie in [0, d={self.d}]")
        if not 0.0 <= self.rho < 1.0:
            raise ConfigurationError(f"rho={self.rho} must lie in [0, 1)")
        if self.noise_sd < 0:
            raise ConfigurationError("noise_sd must be >= 0")
        z = self.zeta_vector()
        if np.any(z <= 0) or np.any(z > 1):
            raise ConfigurationError("all zeta entries must lie in (0, 1]")

    def zeta_vector(self) -> np.ndarray:
        z = np.asarray(self.zeta, dtype=float)
        if z.ndim == 0:
            return np.full(self.d, float(z))
        if z.shape != (self.d,):
            raise ConfigurationError(f"zeta has length {z.size}, expected d={self.d}")
        return z


@dataclass(eq=False)
class ContextRound:
    """True contexts ``x``, mask ``u`` and observed ``z = x * u`` (all ``K x d``)."""

    x: np.ndarray
    u: np.ndarray
    z: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.z is None:
            self.z = self.x * self.u

    @property
    def K(self) -> int:
        return self.x.shape[0]


def make_beta(d: int, s0: int, b: float, rng: np.random.Generator) -> np.ndarray:
    """Sparse parameter: ``s0`` random positions, magnitudes U[b/2, b], random signs."""
    if s0 > d:
        raise ConfigurationError(f"s0={s0} exceeds d={d}")
    beta = np.zeros(d)
    if s0 == 0:
        return beta
    idx = rng.choice(d, size=s0, replace=False)
    beta[idx] = rng.uniform(b / 2, b, size=s0) * rng.choice([-1.0, 1.0], size=s0)
    return beta


def toeplitz_sigma(d: int, rho: float) -> np.ndarray:
    i = np.arange(d)
    return rho ** np.abs(i[:, None] - i[None, :]).astype(float)


class SyntheticEnvironment:
    """Context/mask sampler bound to one config and one generator.

    The Cholesky factor is computed once; every draw comes from ``rng``, so
    replaying the seed replays the trajectory.
    """

    def __init__(self, config: SyntheticEnvConfig, rng: np.random.Generator):
        self.config = config
        self.rng = rng
        self.sigma = toeplitz_sigma(config.d, config.rho)
        self.chol = np.linalg.cholesky(self.sigma)
        self.zeta = config.zeta_vector()

    def sample_round(self) -> ContextRound:
        return sample_round(self.config, self.rng, chol=self.chol)


def sample_round(config: SyntheticEnvConfig, rng: np.random.Generator, chol=None) -> ContextRound:
    if chol is None:
        chol = np.linalg.cholesky(toeplitz_sigma(config.d, config.rho))
    x = rng.standard_normal((config.K, config.d)) @ chol.T
    u = (rng.random((config.K, config.d)) < config.zeta_vector()).astype(float)
    return ContextRound(x=x, u=u)


def reward(x_chosen, beta_star, noise_sd: float, rng: np.random.Generator) -> float:
    """Noisy linear reward from the *true* context of the pulled arm."""
    return float(np.dot(x_chosen, beta_star) + noise_sd * rng.standard_normal())


def regret_of(round_: ContextRound, beta_star, chosen: int) -> float:
    means = round_.x @ beta_star
    return float(means.max() - means[chosen])
