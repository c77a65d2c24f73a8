"""One-dimensional Gaussian mixtures with a single shared variance.

``GaussianMixture`` carries both the sample-side variance ``s2`` and the
Fourier-side modulation parameter ``v = s2 / 2``.  Code that works with
samples uses ``s2``; code that works with Fourier data uses ``v``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.special import logsumexp

SQRT_2PI = np.sqrt(2.0 * np.pi)


@dataclass(frozen=True)
class GaussianMixture:
    """Mixture ``sum_i w_i N(mu_i, s2)``."""

    means: np.ndarray
    weights: np.ndarray
    variance_s2: float

    def __post_init__(self):
        means = np.atleast_1d(np.asarray(self.means, dtype=float))
        weights = np.atleast_1d(np.asarray(self.weights, dtype=float))
        if means.ndim != 1 or means.size == 0:
            raise ValueError("means must be a non-empty 1-d sequence")
        if weights.shape != means.shape:
            raise ValueError("means and weights must have the same length")
        if np.any(weights <= 0):
            raise ValueError("weights must be strictly positive")
        if abs(weights.sum() - 1.0) > 1e-12:
            raise ValueError(f"weights sum to {weights.sum():.15g}, not 1")
        if np.unique(means).size != means.size:
            raise ValueError("means must be pairwise distinct")
        if not self.variance_s2 > 0:
            raise ValueError("variance_s2 must be positive")
        means.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "variance_s2", float(self.variance_s2))

    @classmethod
    def from_v(cls, means, weights, v: float) -> "GaussianMixture":
        """Build from the modulation parameter ``v = s2 / 2``."""
        return cls(means, weights, 2.0 * v)

    @classmethod
    def from_estimate(cls, means, weights, s2: float) -> "GaussianMixture":
        """Tidy raw estimates into a valid mixture.

        Components with zero weight are dropped, coinciding means are merged
        and the weights renormalised.
        """
        means = np.atleast_1d(np.asarray(means, dtype=float))
        weights = np.atleast_1d(np.asarray(weights, dtype=float))
        keep = weights > 0
        means, weights = means[keep], weights[keep]
        uniq, inv = np.unique(means, return_inverse=True)
        merged = np.bincount(inv, weights=weights, minlength=uniq.size)
        return cls(uniq, merged / merged.sum(), s2)

    @property
    def v(self) -> float:
        return self.variance_s2 / 2.0

    @property
    def k(self) -> int:
        return self.means.size

    @property
    def min_weight(self) -> float:
        return float(self.weights.min())

    @property
    def min_separation(self) -> float:
        if self.k < 2:
            return np.inf
        return float(np.diff(np.sort(self.means)).min())

    def to_dict(self) -> dict:
        return {
            "means": self.means.tolist(),
            "weights": self.weights.tolist(),
            "variance": self.variance_s2,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GaussianMixture":
        return cls(d["means"], d["weights"], d["variance"])

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n")

    @classmethod
    def load(cls, path) -> "GaussianMixture":
        return cls.from_dict(json.loads(Path(path).read_text()))


@dataclass(frozen=True)
class MixingDistribution:
    """Discrete measure ``sum_i w_i delta_{x_i}``, support sorted ascending."""

    support: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        x = np.atleast_1d(np.asarray(self.support, dtype=float))
        w = np.atleast_1d(np.asarray(self.weights, dtype=float))
        if x.shape != w.shape or x.ndim != 1 or x.size == 0:
            raise ValueError("support and weights must be equal-length, non-empty 1-d")
        if np.any(w < 0):
            raise ValueError("weights must be non-negative")
        if abs(w.sum() - 1.0) > 1e-9:
            raise ValueError(f"weights sum to {w.sum():.15g}, not 1")
        order = np.argsort(x, kind="stable")
        x, w = x[order], w[order]
        x.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "support", x)
        object.__setattr__(self, "weights", w)


@dataclass(frozen=True)
class SampleSet:
    """i.i.d. draws, plus the seed that produced them when synthetic."""

    values: np.ndarray
    seed: int | None = field(default=None)

    def __post_init__(self):
        x = np.atleast_1d(np.asarray(self.values, dtype=float))
        if x.ndim != 1 or x.size == 0:
            raise ValueError("a SampleSet needs at least one value")
        x.setflags(write=False)
        object.__setattr__(self, "values", x)

    def __len__(self):
        return self.values.size

    @property
    def n(self) -> int:
        return self.values.size

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for x in self.values:
                fh.write(f"{x:.17g}\n")

    @classmethod
    def load(cls, path) -> "SampleSet":
        text = Path(path).read_text(encoding="utf-8")
        vals = [float(tok) for tok in text.split()]
        return cls(np.array(vals))


def gaussian_pdf(x, mu, s2):
    return np.exp(-((x - mu) ** 2) / (2.0 * s2)) / np.sqrt(2.0 * np.pi * s2)


def density(m: GaussianMixture, x):
    """Mixture density at ``x`` (scalar or array)."""
    x = np.asarray(x, dtype=float)
    comps = gaussian_pdf(x[..., None], m.means, m.variance_s2)
    return comps @ m.weights


def log_likelihood(m: GaussianMixture, x) -> float:
    """``sum_j log p(x_j)``, evaluated with log-sum-exp."""
    x = x.values if isinstance(x, SampleSet) else np.asarray(x, dtype=float)
    s2 = m.variance_s2
    if not s2 > 0:
        raise ValueError("variance must be positive")
    logc = np.log(m.weights) - 0.5 * np.log(2.0 * np.pi * s2)
    z = logc - (x[:, None] - m.means) ** 2 / (2.0 * s2)
    return float(np.sum(logsumexp(z, axis=1)))


def characteristic_function(m: GaussianMixture, omega):
    """``E[exp(i omega X)] = exp(-v omega^2) sum_i w_i exp(i mu_i omega)``."""
    omega = np.asarray(omega, dtype=float)
    phases = np.exp(1j * omega[..., None] * m.means) @ m.weights
    return np.exp(-m.v * omega**2) * phases


def sample(m: GaussianMixture, n: int, seed: int) -> SampleSet:
    """Draw ``n`` samples: categorical component label, then a Gaussian draw."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    labels = rng.choice(m.k, size=n, p=m.weights)
    x = m.means[labels] + np.sqrt(m.variance_s2) * rng.standard_normal(n)
    return SampleSet(x, seed=seed)


def mixing_distribution(m: GaussianMixture) -> MixingDistribution:
    return MixingDistribution(m.means, m.weights)


def child_seeds(seed: int, count: int) -> list[int]:
    """Independent per-trial seeds derived from one parent seed."""
    ss = np.random.SeedSequence(seed)
    return [int(c.generate_state(1, dtype=np.uint64)[0]) for c in ss.spawn(count)]
