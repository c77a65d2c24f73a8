"""Error and model-selection metrics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import GaussianMixture, MixingDistribution, SampleSet, log_likelihood


def _as_measure(a) -> MixingDistribution:
    if isinstance(a, GaussianMixture):
        return MixingDistribution(a.means, a.weights)
    return a


def wasserstein1(a, b) -> float:
    """Exact W1 between two discrete measures on the line.

    Integrates ``|F_a - F_b|`` over the merged breakpoints, where both
    CDFs are piecewise constant.
    """
    a, b = _as_measure(a), _as_measure(b)
    pts = np.union1d(a.support, b.support)
    Fa = np.cumsum(a.weights)[np.searchsorted(a.support, pts, side="right") - 1]
    Fa = np.where(pts < a.support[0], 0.0, Fa)
    Fb = np.cumsum(b.weights)[np.searchsorted(b.support, pts, side="right") - 1]
    Fb = np.where(pts < b.support[0], 0.0, Fb)
    return float(np.sum(np.abs(Fa - Fb)[:-1] * np.diff(pts)))


@dataclass(frozen=True)
class ScoreCard:
    loglik: float
    p: int
    n: int

    @property
    def aic(self) -> float:
        return 2 * self.p - 2 * self.loglik

    @property
    def bic(self) -> float:
        return self.p * np.log(self.n) - 2 * self.loglik


def free_parameters(k: int) -> int:
    """k means, k-1 free weights and one shared variance."""
    return 2 * k


def scorecard(m: GaussianMixture, samples) -> ScoreCard:
    x = samples.values if isinstance(samples, SampleSet) else np.asarray(samples, dtype=float)
    return ScoreCard(log_likelihood(m, x), free_parameters(m.k), x.size)


def relative_error(est: float, truth: float) -> float:
    if truth == 0:
        raise ZeroDivisionError("relative error against a zero truth")
    return abs(est - truth) / abs(truth)
