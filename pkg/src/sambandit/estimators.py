"""Sampling-probability tracking and missingness-adjusted moment estimators.

Observed contexts are ``z = x * u`` with ``u`` an MCAR Bernoulli mask. The
sample second moment of ``z`` is biased: diagonal entries shrink by ``zeta_j``
and off-diagonal ones by ``zeta_i * zeta_j``. Dividing entrywise by the
matching correction matrix removes the bias, at the price of a Gram estimate
that may be indefinite.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigurationError, EmptyHistoryError

DEFAULT_FLOOR = 1e-3


@dataclass(frozen=True, eq=False)
class SamplingProbEstimate:
    """Running per-covariate observation probability.

    ``mask_sum`` and ``n_obs`` hold the exact bit counts, so the unclamped
    estimate is always the batch mean of every mask bit seen so far.
    """

    zeta_hat: np.ndarray
    t: int = 0
    floor: float = DEFAULT_FLOOR
    mask_sum: np.ndarray = field(default=None, repr=False)
    n_obs: int = 0

    def __post_init__(self):
        if self.mask_sum is None:
            object.__setattr__(self, "mask_sum", np.zeros_like(self.zeta_hat, dtype=float))

    @classmethod
    def initial(cls, d: int, floor: float = DEFAULT_FLOOR) -> "SamplingProbEstimate":
        if not 0.0 < floor <= 1.0:
            raise ConfigurationError(f"floor must lie in (0, 1], got {floor}")
        return cls(zeta_hat=np.ones(d), floor=floor)

    @property
    def d(self) -> int:
        return self.zeta_hat.shape[0]

    @property
    def raw(self) -> np.ndarray:
        """Unclamped running mean (all ones before the first round)."""
        if self.n_obs == 0:
            return np.ones(self.d)
        return self.mask_sum / self.n_obs

    @property
    def zeta_min(self) -> float:
        return float(self.zeta_hat.min())


def update_sampling_probs(state: SamplingProbEstimate, mask_round) -> SamplingProbEstimate:
    """Fold one round of masks (``K x d``, all arms) into the running mean."""
    mask = np.atleast_2d(np.asarray(mask_round, dtype=float))
    if mask.shape[1] != state.d:
        raise ConfigurationError(
            f"mask has {mask.shape[1]} columns but the estimate tracks d={state.d}"
        )
    mask_sum = state.mask_sum + mask.sum(axis=0)
    n_obs = state.n_obs + mask.shape[0]
    zeta_hat = np.clip(mask_sum / n_obs, state.floor, 1.0)
    return replace(state, zeta_hat=zeta_hat, t=state.t + 1, mask_sum=mask_sum, n_obs=n_obs)


@dataclass(frozen=True, eq=False)
class AdjustedMoments:
    """Accumulated ``sum z z^T`` and ``sum z r`` over the pulled arms."""

    gram_sum: np.ndarray
    cross_sum: np.ndarray
    t: int = 0

    @classmethod
    def empty(cls, d: int) -> "AdjustedMoments":
        return cls(gram_sum=np.zeros((d, d)), cross_sum=np.zeros(d))

    @property
    def d(self) -> int:
        return self.cross_sum.shape[0]


def accumulate(moments: AdjustedMoments, z_chosen, reward: float) -> AdjustedMoments:
    z = np.asarray(z_chosen, dtype=float)
    if z.shape != (moments.d,):
        raise ConfigurationError(f"expected a length-{moments.d} context, got shape {z.shape}")
    return AdjustedMoments(
        gram_sum=moments.gram_sum + np.outer(z, z),
        cross_sum=moments.cross_sum + z * float(reward),
        t=moments.t + 1,
    )


def mask_correction(zeta_hat) -> np.ndarray:
    """Matrix with ``zeta_i`` on the diagonal and ``zeta_i * zeta_j`` elsewhere."""
    zeta = np.asarray(zeta_hat, dtype=float)
    m = np.outer(zeta, zeta)
    np.fill_diagonal(m, zeta)
    return m


def _check_history(moments: AdjustedMoments, probs: SamplingProbEstimate):
    if moments.t == 0:
        raise EmptyHistoryError("no rounds accumulated yet")
    if probs.d != moments.d:
        raise ConfigurationError(f"dimension mismatch: moments d={moments.d}, probs d={probs.d}")


def adjusted_gram(moments: AdjustedMoments, probs: SamplingProbEstimate) -> np.ndarray:
    """Bias-corrected second moment; symmetric but possibly indefinite."""
    _check_history(moments, probs)
    return (moments.gram_sum / moments.t) / mask_correction(probs.zeta_hat)


def adjusted_cross(moments: AdjustedMoments, probs: SamplingProbEstimate) -> np.ndarray:
    _check_history(moments, probs)
    return (moments.cross_sum / moments.t) / probs.zeta_hat


def unadjusted_gram(moments: AdjustedMoments) -> np.ndarray:
    if moments.t == 0:
        raise EmptyHistoryError("no rounds accumulated yet")
    return moments.gram_sum / moments.t


def unadjusted_cross(moments: AdjustedMoments) -> np.ndarray:
    if moments.t == 0:
        raise EmptyHistoryError("no rounds accumulated yet")
    return moments.cross_sum / moments.t
