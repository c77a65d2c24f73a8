"""Singular-value-ratio (SVR) estimation of the shared variance and the model order.

For a candidate modulation ``u`` the Hankel matrix of the Fourier data is
multiplied entrywise by ``E(u)``.  At ``u = v`` and without noise the
result has rank ``k``, so the ratio ``sigma_l / sigma_{l+1}`` of
consecutive singular values blows up at ``l = k``.  The estimator scans a
grid of ``u`` and all ``l`` and returns the maximiser.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .fourier import FourierData, FourierGrid, ecf
from .hankel import check_modulation_range, modulated_hankel, singular_values
from .model import SampleSet


THRESHOLD_MODES = ("constant", "modulated")


class EstimationError(RuntimeError):
    """No admissible (variance, order) pair could be selected."""


def variance_grid(vmax: float, step: float, vmin: float = 0.0) -> np.ndarray:
    """Inclusive uniform grid ``vmin, vmin + step, ..., vmax``."""
    if step <= 0 or vmax < vmin:
        raise ValueError("need step > 0 and vmax >= vmin")
    count = int(round((vmax - vmin) / step)) + 1
    return vmin + step * np.arange(count)


@dataclass(frozen=True)
class SVRConfig:
    candidates: np.ndarray
    threshold: float = 0.0
    known_order: int | None = None
    threshold_mode: str = "constant"

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.candidates, dtype=float))
        if c.ndim != 1 or c.size == 0:
            raise ValueError("candidate set must be non-empty")
        if np.any(c < 0) or np.any(np.diff(c) <= 0):
            raise ValueError("candidates must be non-negative and strictly ascending")
        if not self.threshold >= 0:
            raise ValueError("threshold must be >= 0")
        if self.threshold_mode not in THRESHOLD_MODES:
            raise ValueError(f"threshold_mode must be one of {THRESHOLD_MODES}")
        if self.known_order is not None and self.known_order < 1:
            raise ValueError("known_order must be >= 1")
        c.setflags(write=False)
        object.__setattr__(self, "candidates", c)
        object.__setattr__(self, "threshold", float(self.threshold))

    @property
    def vmax(self) -> float:
        return float(self.candidates[-1])


def clean_singular_values(s: np.ndarray) -> np.ndarray:
    """Zero out singular values at or below the numerical-rank tolerance.

    Tolerance follows the usual rank-revealing convention
    ``sigma_1 * size * eps``.
    """
    s = np.array(s, dtype=float)
    if s.size and s[0] > 0:
        tol = s[0] * s.size * np.finfo(float).eps
        s[s <= tol] = 0.0
    return s


def ratios_from_singular_values(s: np.ndarray) -> np.ndarray:
    """``s[l] / s[l+1]`` with ``+inf`` for a numerically zero denominator.

    A ratio of two numerical zeros is reported as 1.
    """
    num, den = s[..., :-1], s[..., 1:]
    with np.errstate(divide="ignore", invalid="ignore"):
        r = num / den
    r = np.where(den == 0, np.where(num == 0, 1.0, np.inf), r)
    return r


@dataclass(frozen=True)
class SVRSurface:
    """Singular values and ratios over (candidate u) x (order l = 1..K)."""

    candidates: np.ndarray
    singular_values: np.ndarray  # (m, K+1), descending per row
    ratios: np.ndarray           # (m, K), column l-1 holds r(u, l)
    passes: np.ndarray           # (m, K), sigma(u, l) > threshold
    threshold: float
    threshold_mode: str
    known_order: int | None
    best_index: int
    best_order: int

    @property
    def orders(self) -> np.ndarray:
        return np.arange(1, self.ratios.shape[1] + 1)

    @property
    def best_u(self) -> float:
        return float(self.candidates[self.best_index])

    @property
    def best_ratio(self) -> float:
        return float(self.ratios[self.best_index, self.best_order - 1])

    def ratio_curve(self, l: int) -> np.ndarray:
        return self.ratios[:, l - 1]

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["u", "l", "ratio", "passes_threshold"])
            for i, u in enumerate(self.candidates):
                for l in self.orders:
                    r = self.ratios[i, l - 1]
                    w.writerow([f"{u:.17g}", int(l), "inf" if np.isinf(r) else f"{r:.17g}",
                                int(bool(self.passes[i, l - 1]))])


def threshold_levels(grid: FourierGrid, config: SVRConfig) -> np.ndarray:
    """Per-candidate singular-value threshold.

    ``"constant"`` uses ``T`` for every ``u``.  ``"modulated"`` scales ``T``
    by the RMS entry of the modulation matrix, ``||E(u)||_F / (K+1)``, which
    tracks how much ``E(u)`` amplifies the data noise; it equals ``T`` at
    ``u = 0``.
    """
    T = np.full(config.candidates.size, config.threshold)
    if config.threshold_mode == "modulated":
        w2 = grid.frequencies**2
        # multiplicity of omega_{-K+s} among the Hankel entries
        mult = grid.K + 1 - np.abs(grid.q)
        rms = np.sqrt(np.exp(2.0 * np.outer(config.candidates, w2)) @ mult) / (grid.K + 1)
        T = T * rms
    return T


def svr_surface(data: FourierData, config: SVRConfig) -> SVRSurface:
    """Fill the ratio surface and select its admissible maximiser.

    Ties are broken toward the smallest ``u``, then the smallest ``l``.
    """
    K = data.grid.K
    for u in (config.candidates[0], config.candidates[-1]):
        check_modulation_range(data.grid, u)
    if config.known_order is not None and config.known_order > K:
        raise ValueError(f"known_order={config.known_order} exceeds K={K}")

    sv = np.empty((config.candidates.size, K + 1))
    for i, u in enumerate(config.candidates):
        sv[i] = clean_singular_values(singular_values(modulated_hankel(data, u)))
    ratios = ratios_from_singular_values(sv)
    levels = threshold_levels(data.grid, config)
    passes = sv[:, :-1] > levels[:, None]

    if config.known_order is not None:
        col = ratios[:, config.known_order - 1]
        best_index, best_order = int(np.argmax(col)), config.known_order
    else:
        masked = np.where(passes, ratios, -np.inf)
        if not np.any(passes):
            raise EstimationError(
                f"all singular values are below the threshold T={config.threshold:g}"
            )
        flat = int(np.argmax(masked))
        best_index, col = divmod(flat, K)
        best_order = col + 1

    return SVRSurface(
        candidates=config.candidates,
        singular_values=sv,
        ratios=ratios,
        passes=passes,
        threshold=config.threshold,
        threshold_mode=config.threshold_mode,
        known_order=config.known_order,
        best_index=best_index,
        best_order=best_order,
    )


def estimate_fourier(data: FourierData, config: SVRConfig):
    """SVR estimate from Fourier data: returns ``(v_hat, k_hat, surface)``."""
    surface = svr_surface(data, config)
    return surface.best_u, surface.best_order, surface


def estimate_samples(samples: SampleSet, cutoff: float, K: int, config: SVRConfig):
    """SVR estimate from raw samples: returns ``(v_hat, k_hat, fourier_data)``."""
    data = ecf(samples, FourierGrid(cutoff, K))
    v_hat, k_hat, _ = estimate_fourier(data, config)
    return v_hat, k_hat, data


def zeta(k: int) -> int:
    """``max_j (j-1)! (k-j)!`` over ``j = 1..k``."""
    return max(math.factorial(j - 1) * math.factorial(k - j) for j in range(1, k + 1))


def ratio_lower_bound(pi_min, d_min, sigma, k, K, v, h, cutoff) -> float:
    """Guaranteed lower bound on ``r(v, k)`` when every ``|W(omega_q)| < sigma``.

    ``pi_min / sigma * (h d_min / pi)^(2k-2) * exp(-cutoff^2 v) * (K+1)^(-3/2)
    * zeta(k)^2 / k - 1``.  For ``k = 1`` pass any positive ``d_min``.
    """
    if k < 1 or K < 1:
        raise ValueError("k and K must be >= 1")
    for name, val in (("pi_min", pi_min), ("d_min", d_min), ("sigma", sigma),
                      ("h", h), ("cutoff", cutoff)):
        if not val > 0:
            raise ValueError(f"{name} must be positive")
    if v < 0:
        raise ValueError("v must be >= 0")
    core = (pi_min / sigma) * (h * d_min / np.pi) ** (2 * k - 2)
    return float(core * np.exp(-cutoff**2 * v) * (K + 1) ** -1.5 * zeta(k) ** 2 / k - 1.0)
