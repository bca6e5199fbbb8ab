"""Greedy sparse-agnostic lasso bandit with missing covariates, plus baselines.

Each round: refresh the observation-probability estimate from every arm's
mask, pull the arm maximizing ``(z / zeta_hat) @ beta_hat`` using the estimate
from the previous round, then fold the pulled arm's observation into the
moment sums and re-solve the constrained lasso (warm-started).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .errors import ConfigurationError, DivergenceError, RewardError, UnsupportedBaselineError
from .estimators import (
    DEFAULT_FLOOR,
    AdjustedMoments,
    SamplingProbEstimate,
    accumulate,
    adjusted_cross,
    adjusted_gram,
    unadjusted_cross,
    unadjusted_gram,
    update_sampling_probs,
)
from .solver import LassoProblem, SolverOptions, solve, spectral_bound

POLICIES = ("sam", "naive_lasso", "ols", "oracle")
_MAX_RETRIES = 8


@dataclass(frozen=True, eq=False)
class BanditState:
    beta_hat: np.ndarray
    probs: SamplingProbEstimate
    moments: AdjustedMoments
    t: int
    eta1: float
    radius: float
    adjust: bool = True
    resolve: str = "every"
    solver_opts: SolverOptions = field(default_factory=SolverOptions)

    @classmethod
    def initial(cls, d: int, eta1: float, radius: float, *, adjust: bool = True,
                resolve: str = "every", floor: float = DEFAULT_FLOOR,
                solver_opts: SolverOptions | None = None) -> "BanditState":
        if resolve not in ("every", "doubling"):
            raise ConfigurationError(f"unknown re-solve cadence {resolve!r}")
        if eta1 < 0 or not radius > 0:
            raise ConfigurationError("need eta1 >= 0 and radius > 0")
        return cls(
            beta_hat=np.zeros(d),
            probs=SamplingProbEstimate.initial(d, floor),
            moments=AdjustedMoments.empty(d),
            t=0,
            eta1=eta1,
            radius=radius,
            adjust=adjust,
            resolve=resolve,
            solver_opts=solver_opts or SolverOptions(),
        )


@dataclass(frozen=True)
class RoundOutcome:
    chosen_arm: int
    reward: float
    regret: float
    eta_t: float
    beta_l1: float
    zeta_min_hat: float = 1.0
    solver_iterations: int = 0


def select_arm(observed, probs: SamplingProbEstimate, beta_hat) -> int:
    """Plug-in policy; ties go to the lowest index."""
    scores = (np.asarray(observed, dtype=float) / probs.zeta_hat) @ beta_hat
    return int(np.argmax(scores))


def regularization_schedule(eta1: float, t: int, zeta_min: float, d: int) -> float:
    """``eta1 * sqrt((max(4 log(t zmin^2), 0) + log d) / (t zmin^2))``.

    The clamp keeps early rounds (``t * zmin^2 < 1``) real and positive.
    """
    if not zeta_min > 0:
        raise ConfigurationError(f"zeta_min must be > 0, got {zeta_min}")
    if t < 1 or d < 1:
        raise ConfigurationError("t and d must be >= 1")
    n_eff = t * zeta_min**2
    return eta1 * math.sqrt((max(4.0 * math.log(n_eff), 0.0) + math.log(d)) / n_eff)


def _should_resolve(resolve: str, t: int) -> bool:
    return resolve == "every" or (t & (t - 1)) == 0


def _fit(state: BanditState, moments: AdjustedMoments, probs: SamplingProbEstimate,
         eta_t: float):
    if state.adjust:
        G, g = adjusted_gram(moments, probs), adjusted_cross(moments, probs)
    else:
        G, g = unadjusted_gram(moments), unadjusted_cross(moments)
    problem = LassoProblem(G, g, eta_t, state.radius)
    L = spectral_bound(G)
    for _ in range(_MAX_RETRIES):
        try:
            return solve(problem, warm_start=state.beta_hat, opts=state.solver_opts, lipschitz=L)
        except DivergenceError:
            L *= 2.0
    raise DivergenceError(f"solver diverged after {_MAX_RETRIES} step-size halvings")


def step(state: BanditState, round_, reward_fn: Callable[[int], float],
         regret_fn: Callable[[int], float] | None = None):
    """One pass of the decision loop. Returns ``(new_state, RoundOutcome)``."""
    t = state.t + 1
    probs = update_sampling_probs(state.probs, round_.u)
    arm = select_arm(round_.z, probs, state.beta_hat)
    r = float(reward_fn(arm))
    if not math.isfinite(r):
        raise RewardError(f"non-finite reward {r!r} at round {t}")
    eta_t = regularization_schedule(state.eta1, t, probs.zeta_min, probs.d)
    moments = accumulate(state.moments, round_.z[arm], r)
    beta, iters = state.beta_hat, 0
    if _should_resolve(state.resolve, t):
        report = _fit(state, moments, probs, eta_t)
        beta, iters = report.beta, report.iterations
    new_state = replace(state, beta_hat=beta, probs=probs, moments=moments, t=t)
    regret = float(regret_fn(arm)) if regret_fn is not None else float("nan")
    out = RoundOutcome(
        chosen_arm=arm,
        reward=r,
        regret=regret,
        eta_t=eta_t,
        beta_l1=float(np.abs(beta).sum()),
        zeta_min_hat=probs.zeta_min,
        solver_iterations=iters,
    )
    return new_state, out


class LassoPolicy:
    """Stateful wrapper over :func:`step`; ``adjust=False`` gives the naive variant."""

    def __init__(self, d: int, eta1: float, radius: float, *, adjust: bool = True, **kw):
        self.state = BanditState.initial(d, eta1, radius, adjust=adjust, **kw)

    def play(self, round_, reward_fn, regret_fn=None) -> RoundOutcome:
        self.state, out = step(self.state, round_, reward_fn, regret_fn)
        return out


class OLSPolicy:
    """Ridge least squares on ``(z / zeta_hat, r)`` pairs, greedy plug-in selection."""

    def __init__(self, d: int, ridge: float = 1.0, floor: float = DEFAULT_FLOOR):
        self.ridge = ridge
        self.probs = SamplingProbEstimate.initial(d, floor)
        self.A = ridge * np.eye(d)
        self.b = np.zeros(d)
        self.beta_hat = np.zeros(d)
        self.t = 0

    def play(self, round_, reward_fn, regret_fn=None) -> RoundOutcome:
        self.t += 1
        self.probs = update_sampling_probs(self.probs, round_.u)
        arm = select_arm(round_.z, self.probs, self.beta_hat)
        r = float(reward_fn(arm))
        if not math.isfinite(r):
            raise RewardError(f"non-finite reward {r!r} at round {self.t}")
        w = round_.z[arm] / self.probs.zeta_hat
        self.A += np.outer(w, w)
        self.b += w * r
        self.beta_hat = np.linalg.solve(self.A, self.b)
        regret = float(regret_fn(arm)) if regret_fn is not None else float("nan")
        return RoundOutcome(arm, r, regret, 0.0, float(np.abs(self.beta_hat).sum()),
                            self.probs.zeta_min, 0)


class OraclePolicy:
    """Pulls ``argmax x @ beta_star`` on the true contexts."""

    def __init__(self, beta_star):
        if beta_star is None:
            raise UnsupportedBaselineError("oracle needs the true parameter, which is unknown here")
        self.beta_star = np.asarray(beta_star, dtype=float)

    def play(self, round_, reward_fn, regret_fn=None) -> RoundOutcome:
        arm = int(np.argmax(round_.x @ self.beta_star))
        r = float(reward_fn(arm))
        regret = float(regret_fn(arm)) if regret_fn is not None else float("nan")
        return RoundOutcome(arm, r, regret, 0.0, float(np.abs(self.beta_star).sum()), 1.0, 0)


def baseline_policy(kind: str, d: int, *, eta1: float = 1.0, radius: float = 5.0,
                    beta_star=None, ridge: float = 1.0, floor: float = DEFAULT_FLOOR,
                    resolve: str = "every", solver_opts: SolverOptions | None = None):
    """Build a policy object exposing ``play(round, reward_fn, regret_fn)``."""
    if kind == "sam":
        return LassoPolicy(d, eta1, radius, adjust=True, floor=floor, resolve=resolve,
                           solver_opts=solver_opts)
    if kind == "naive_lasso":
        return LassoPolicy(d, eta1, radius, adjust=False, floor=floor, resolve=resolve,
                           solver_opts=solver_opts)
    if kind == "ols":
        return OLSPolicy(d, ridge=ridge, floor=floor)
    if kind == "oracle":
        return OraclePolicy(beta_star)
    raise ConfigurationError(f"unknown policy {kind!r}; expected one of {POLICIES}")
