"""Composite projected gradient for the l1-penalized, l1-constrained quadratic.

Minimizes::

    0.5 * b' G b - <g, b> + eta * ||b||_1    subject to  ||b||_1 <= R

where ``G`` may be indefinite (a missingness-adjusted Gram matrix). The step
is a gradient move of length ``1/L`` followed by the exact proximal map of
the penalty plus the ball indicator, which is a soft-threshold followed by
an l1-ball projection. With ``L >= ||G||_2`` every step is a majorize-minimize
step, so the objective never increases even when ``G`` is indefinite.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, DivergenceError, NumericError

_POWER_SEED = 20240917


@dataclass(frozen=True, eq=False)
class LassoProblem:
    gamma_mat: np.ndarray
    gamma_vec: np.ndarray
    eta: float
    radius: float

    def __post_init__(self):
        g = np.asarray(self.gamma_mat, dtype=float)
        v = np.asarray(self.gamma_vec, dtype=float)
        d = v.shape[0]
        if g.shape != (d, d):
            raise ConfigurationError(f"gamma_mat shape {g.shape} does not match gamma_vec length {d}")
        if not np.allclose(g, g.T, rtol=0.0, atol=1e-12 * max(1.0, np.abs(g).max(initial=0.0))):
            raise ConfigurationError("gamma_mat must be symmetric")
        if self.eta < 0:
            raise ConfigurationError(f"eta must be >= 0, got {self.eta}")
        if not self.radius > 0:
            raise ConfigurationError(f"radius must be > 0, got {self.radius}")
        object.__setattr__(self, "gamma_mat", g)
        object.__setattr__(self, "gamma_vec", v)

    @property
    def d(self) -> int:
        return self.gamma_vec.shape[0]


@dataclass(frozen=True)
class SolverOptions:
    rel_tol: float = 1e-8
    max_iter: int = 500


@dataclass(eq=False)
class SolverReport:
    beta: np.ndarray
    iterations: int
    final_objective: float
    objective_trace: list = field(default_factory=list)
    converged: bool = False
    lipschitz: float = float("nan")


def objective(problem: LassoProblem, beta) -> float:
    b = np.asarray(beta, dtype=float)
    return float(
        0.5 * b @ problem.gamma_mat @ b - problem.gamma_vec @ b + problem.eta * np.abs(b).sum()
    )


def soft_threshold(v, tau: float) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return np.sign(v) * np.maximum(np.abs(v) - tau, 0.0)


def l1_projection(v, radius: float) -> np.ndarray:
    """Euclidean projection of ``v`` onto ``{w : ||w||_1 <= radius}``.

    Sort-based threshold search, O(d log d). Points already inside the ball
    are returned unchanged.
    """
    if not radius > 0:
        raise ConfigurationError(f"radius must be > 0, got {radius}")
    v = np.asarray(v, dtype=float)
    if not np.all(np.isfinite(v)):
        raise NumericError("l1_projection received non-finite entries")
    a = np.abs(v)
    if a.sum() <= radius:
        return v.copy()
    u = np.sort(a)[::-1]
    cssv = np.cumsum(u)
    ks = np.arange(1, u.size + 1)
    # largest index keeps duplicates deterministic; all valid ones give the same theta
    rho = np.nonzero(u * ks > cssv - radius)[0][-1]
    theta = (cssv[rho] - radius) / (rho + 1.0)
    return np.sign(v) * np.maximum(a - theta, 0.0)


def spectral_bound(m, n_iter: int = 50, safety: float = 1.1) -> float:
    """Upper estimate of ``max |eig(m)|`` for symmetric ``m``.

    Power iteration on ``m @ m`` (which is PSD even when ``m`` is not) from a
    fixed pseudo-random start, inflated by ``safety``.
    """
    m = np.asarray(m, dtype=float)
    d = m.shape[0]
    v = np.random.default_rng(_POWER_SEED).standard_normal(d)
    v /= np.linalg.norm(v)
    est = 0.0
    for _ in range(n_iter):
        w = m @ (m @ v)
        nrm = np.linalg.norm(w)
        if nrm == 0.0 or not np.isfinite(nrm):
            break
        v = w / nrm
        est = np.linalg.norm(m @ v)
    return max(safety * float(est), 1e-8)


def solve(problem: LassoProblem, warm_start=None, opts: SolverOptions | None = None,
          lipschitz: float | None = None) -> SolverReport:
    """Run composite projected gradient to a relative objective tolerance.

    ``lipschitz`` overrides the spectral estimate; callers that hit a
    :class:`DivergenceError` retry with a doubled value.
    """
    opts = opts or SolverOptions()
    R = problem.radius
    if warm_start is None:
        beta = np.zeros(problem.d)
    else:
        beta = l1_projection(np.asarray(warm_start, dtype=float), R)
    L = spectral_bound(problem.gamma_mat) if lipschitz is None else float(lipschitz)
    step = 1.0 / L
    tau = problem.eta * step
    G, g = problem.gamma_mat, problem.gamma_vec

    Gb = G @ beta
    f = float(0.5 * beta @ Gb - g @ beta + problem.eta * np.abs(beta).sum())
    if not np.isfinite(f):
        raise DivergenceError("initial objective is not finite")
    trace = [f]
    converged = False
    it = 0
    for it in range(1, opts.max_iter + 1):
        v = soft_threshold(beta - step * (Gb - g), tau)
        if not np.all(np.isfinite(v)):
            raise DivergenceError(f"iterate became non-finite at iteration {it} (L={L:g})")
        beta = l1_projection(v, R)
        Gb = G @ beta
        # same value as objective(), reusing G @ beta for the next gradient
        f_new = float(0.5 * beta @ Gb - g @ beta + problem.eta * np.abs(beta).sum())
        if not np.isfinite(f_new):
            raise DivergenceError(f"objective became non-finite at iteration {it} (L={L:g})")
        trace.append(f_new)
        if abs(f - f_new) <= opts.rel_tol * abs(f):
            converged = True
            f = f_new
            break
        f = f_new
    return SolverReport(beta=beta, iterations=it, final_objective=f, objective_trace=trace,
                        converged=converged, lipschitz=L)
