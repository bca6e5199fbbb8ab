"""Sparse linear contextual bandits with covariates missing completely at random."""

from .bandit import (
    BanditState,
    LassoPolicy,
    OLSPolicy,
    OraclePolicy,
    RoundOutcome,
    baseline_policy,
    regularization_schedule,
    select_arm,
    step,
)
from .environments import ContextRound, SyntheticEnvConfig, SyntheticEnvironment
from .estimators import AdjustedMoments, SamplingProbEstimate
from .solver import LassoProblem, SolverOptions, l1_projection, solve

__version__ = "0.1.0"

__all__ = [
    "AdjustedMoments",
    "BanditState",
    "ContextRound",
    "LassoPolicy",
    "LassoProblem",
    "OLSPolicy",
    "OraclePolicy",
    "RoundOutcome",
    "SamplingProbEstimate",
    "SolverOptions",
    "SyntheticEnvConfig",
    "SyntheticEnvironment",
    "baseline_policy",
    "l1_projection",
    "regularization_schedule",
    "select_arm",
    "solve",
    "step",
]
