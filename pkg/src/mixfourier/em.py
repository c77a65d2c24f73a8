"""EM baseline for a k-component mixture with one shared variance."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import GaussianMixture, SampleSet, log_likelihood

VARIANCE_FLOOR = 1e-12


class EMCollapseError(RuntimeError):
    """The pooled variance collapsed to (numerically) zero."""


@dataclass
class EmState:
    means: np.ndarray
    weights: np.ndarray
    variance: float
    responsibilities: np.ndarray | None = None  # (k, n)


@dataclass
class EmResult:
    means: np.ndarray
    weights: np.ndarray
    variance: float
    loglik_trace: list
    iterations: int
    converged: bool

    @property
    def mixture(self) -> GaussianMixture:
        return GaussianMixture.from_estimate(self.means, self.weights, self.variance)

    @property
    def loglik(self) -> float:
        return self.loglik_trace[-1]


def e_step(x: np.ndarray, state: EmState):
    """Responsibilities (k, n) and the log-likelihood of the current parameters."""
    s2 = state.variance
    logp = ((np.log(state.weights) - 0.5 * np.log(2.0 * np.pi * s2))[:, None]
            - np.subtract.outer(state.means, x) ** 2 / (2.0 * s2))
    # max-shifted log-sum-exp inline; scipy's logsumexp dominates the loop at large n
    top = logp.max(axis=0)
    gamma = np.exp(logp - top)
    total = gamma.sum(axis=0)
    gamma /= total
    return gamma, float(np.sum(top + np.log(total)))


def m_step(x: np.ndarray, gamma: np.ndarray) -> EmState:
    n = x.size
    nk = gamma.sum(axis=1)
    weights = nk / n
    means = gamma @ x / nk
    variance = float(np.sum(gamma * (x[None, :] - means[:, None]) ** 2) / n)
    if variance < VARIANCE_FLOOR:
        raise EMCollapseError(f"pooled variance collapsed to {variance:.3g}")
    return EmState(means, weights, variance, gamma)


def initial_state(x: np.ndarray, k: int, rng: np.random.Generator) -> EmState:
    """k distinct samples as means, equal weights, the sample variance."""
    means = rng.choice(x, size=k, replace=False)
    return EmState(np.asarray(means, dtype=float), np.full(k, 1.0 / k), float(np.var(x)))


def em_fit(samples, k: int, seed=None, tol: float = 1e-5, max_iter: int = 1000,
           init: EmState | None = None) -> EmResult:
    """Run EM until the log-likelihood gain drops below ``tol`` or ``max_iter`` cycles.

    ``loglik_trace[0]`` is the log-likelihood of the initial guess and each
    later entry follows one E/M cycle.
    """
    x = samples.values if isinstance(samples, SampleSet) else np.asarray(samples, dtype=float)
    if k < 1:
        raise ValueError("k must be >= 1")
    if x.size < k:
        raise ValueError("need at least k samples")
    state = init if init is not None else initial_state(x, k, np.random.default_rng(seed))
    if state.variance < VARIANCE_FLOOR:
        raise EMCollapseError("initial variance is zero")

    gamma, ll = e_step(x, state)
    trace = [ll]
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        state = m_step(x, gamma)
        gamma, ll = e_step(x, state)
        trace.append(ll)
        if ll - trace[-2] < tol:
            converged = True
            break
    return EmResult(state.means, state.weights, state.variance, trace, it, converged)


def em_loglik(m: GaussianMixture, samples) -> float:
    return log_likelihood(m, samples)
