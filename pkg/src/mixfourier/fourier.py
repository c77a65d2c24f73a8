"""Frequency grids, empirical characteristic functions and synthetic Fourier data."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .model import GaussianMixture, SampleSet, characteristic_function

# ECF accumulates over sample chunks of this size; fixes the summation order.
_ECF_CHUNK = 1 << 16


@dataclass(frozen=True)
class FourierGrid:
    """Symmetric uniform grid ``omega_q = q * cutoff / K`` for ``q = -K..K``."""

    cutoff: float
    K: int

    def __post_init__(self):
        if not self.cutoff > 0:
            raise ValueError("cutoff must be positive")
        if int(self.K) != self.K or self.K < 1:
            raise ValueError("K must be an integer >= 1")
        object.__setattr__(self, "cutoff", float(self.cutoff))
        object.__setattr__(self, "K", int(self.K))

    @property
    def step(self) -> float:
        return self.cutoff / self.K

    @property
    def q(self) -> np.ndarray:
        return np.arange(-self.K, self.K + 1)

    @property
    def frequencies(self) -> np.ndarray:
        w = self.q * self.step
        # exact endpoints regardless of rounding in q * step
        w[0], w[-1] = -self.cutoff, self.cutoff
        return w

    @property
    def mean_range(self) -> tuple[float, float]:
        """Identifiable window ``[-pi/(2h), pi/(2h))`` for the component means."""
        half = np.pi / (2.0 * self.step)
        return -half, half


@dataclass(frozen=True)
class FourierData:
    grid: FourierGrid
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != (2 * self.grid.K + 1,):
            raise ValueError(
                f"expected {2 * self.grid.K + 1} Fourier values, got shape {vals.shape}"
            )
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def frequencies(self) -> np.ndarray:
        return self.grid.frequencies

    def modulated(self, u: float) -> "FourierData":
        """Pointwise ``exp(u omega^2) * Y(omega)``."""
        return FourierData(self.grid, np.exp(u * self.frequencies**2) * self.values)

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["q", "omega", "re", "im"])
            for q, om, y in zip(self.grid.q, self.frequencies, self.values):
                w.writerow([int(q), f"{om:.17g}", f"{y.real:.17g}", f"{y.imag:.17g}"])

    @classmethod
    def from_csv(cls, path) -> "FourierData":
        with open(path, encoding="utf-8", newline="") as fh:
            rows = list(csv.DictReader(fh))
        q = np.array([int(r["q"]) for r in rows])
        omega = np.array([float(r["omega"]) for r in rows])
        vals = np.array([complex(float(r["re"]), float(r["im"])) for r in rows])
        order = np.argsort(q)
        q, omega, vals = q[order], omega[order], vals[order]
        K = int(q[-1])
        if not np.array_equal(q, np.arange(-K, K + 1)):
            raise ValueError("CSV must hold q = -K..K exactly once")
        return cls(FourierGrid(float(omega[-1]), K), vals)


def ecf_at(x: np.ndarray, omega) -> np.ndarray:
    """``(1/n) sum_j exp(i omega x_j)`` for each omega, chunked over samples."""
    x = np.asarray(x, dtype=float)
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    if x.size == 0:
        raise ValueError("empirical characteristic function of an empty sample")
    acc = np.zeros(omega.shape, dtype=complex)
    for start in range(0, x.size, _ECF_CHUNK):
        chunk = x[start:start + _ECF_CHUNK]
        acc += np.exp(1j * np.multiply.outer(omega, chunk)).sum(axis=-1)
    return acc / x.size


def ecf(samples: SampleSet, grid: FourierGrid) -> FourierData:
    """Empirical characteristic function on ``grid``.

    Only the non-negative half is evaluated; the negative half is its
    conjugate mirror, so symmetry holds exactly and ``Y(0) = 1``.
    """
    x = samples.values if isinstance(samples, SampleSet) else np.asarray(samples, dtype=float)
    if x.size == 0:
        raise ValueError("empirical characteristic function of an empty sample")
    pos = ecf_at(x, grid.frequencies[grid.K:])
    pos[0] = 1.0
    values = np.concatenate([np.conj(pos[:0:-1]), pos])
    return FourierData(grid, values)


def exact_fourier(m: GaussianMixture, grid: FourierGrid) -> FourierData:
    return FourierData(grid, characteristic_function(m, grid.frequencies))


def complex_noise(sigma: float, size: int, rng: np.random.Generator) -> np.ndarray:
    """Draws of ``N(0, sigma^2) + i N(0, sigma^2)``."""
    return sigma * (rng.standard_normal(size) + 1j * rng.standard_normal(size))


def synth_fourier(m: GaussianMixture, grid: FourierGrid, sigma: float, seed=None) -> FourierData:
    """Exact characteristic function plus i.i.d. complex Gaussian noise per frequency."""
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    clean = characteristic_function(m, grid.frequencies)
    if sigma == 0:
        return FourierData(grid, clean)
    rng = np.random.default_rng(seed)
    return FourierData(grid, clean + complex_noise(sigma, clean.size, rng))


def cutoff_search(samples: SampleSet, t: int = 8, omega_init: float = 10.0,
                  tau: float = 1.0, return_bracket: bool = False):
    """Bisection for the frequency where the ECF modulus drops below ``tau/sqrt(n)``.

    Runs exactly ``t`` halvings of ``[0, omega_init]`` and returns the
    upper end of the final bracket.  ``tau = 1`` probes at the noise level
    itself, where roughly a third of pure-noise probes still exceed the
    level; ``tau = 8`` keeps the chosen band well above the noise.
    """
    if t < 1:
        raise ValueError("t must be >= 1")
    if not omega_init > 0:
        raise ValueError("omega_init must be positive")
    x = samples.values if isinstance(samples, SampleSet) else np.asarray(samples, dtype=float)
    if not tau > 0:
        raise ValueError("tau must be positive")
    level = tau / np.sqrt(x.size)
    lo, hi = 0.0, float(omega_init)
    for _ in range(t):
        mid = 0.5 * (lo + hi)
        if abs(ecf_at(x, mid)[0]) < level:
            hi = mid
        else:
            lo = mid
    return (hi, (lo, hi)) if return_bracket else hi


def hoeffding_bound(n: int, eps: float, K: int, clamp: bool = False) -> float:
    """``(4K + 2) exp(-n^(-2 eps) / 2)``: tail bound on the sup-norm of the ECF error."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not eps > 0:
        raise ValueError("eps must be positive")
    b = (4 * K + 2) * np.exp(-0.5 * float(n) ** (-2.0 * eps))
    return min(b, 1.0) if clamp else float(b)


def noise_threshold(n: int, c: float = 20.0) -> float:
    """Data-driven singular-value threshold ``c / sqrt(n)``."""
    return c / np.sqrt(n)
