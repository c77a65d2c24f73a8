"""End-to-end estimation: samples to (variance, order, means, weights)."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

import numpy as np

from .fourier import FourierData, FourierGrid, cutoff_search, ecf
from .model import GaussianMixture, MixingDistribution, SampleSet
from .spectral import DEFAULT_RESOLUTION, MusicSpectrum, music_spectrum, weight_solve
from .svr import SVRConfig, SVRSurface, estimate_fourier


@dataclass
class EstimationResult:
    v: float
    k: int
    means: np.ndarray
    weights: np.ndarray
    cutoff: float
    K: int
    selected_ratio: float
    surface: SVRSurface | None = field(default=None, repr=False)
    spectrum: MusicSpectrum | None = field(default=None, repr=False)
    data: FourierData | None = field(default=None, repr=False)
    timings: dict = field(default_factory=dict)
    flags: list = field(default_factory=list)

    @property
    def variance_s2(self) -> float:
        return 2.0 * self.v

    @property
    def mixture(self) -> GaussianMixture:
        return GaussianMixture.from_estimate(self.means, self.weights, self.variance_s2)

    @property
    def mixing(self) -> MixingDistribution:
        return MixingDistribution(self.means, self.weights)

    def to_dict(self) -> dict:
        return {
            "v": self.v,
            "variance_s2": self.variance_s2,
            "k": self.k,
            "means": [float(m) for m in self.means],
            "weights": [float(w) for w in self.weights],
            "cutoff": self.cutoff,
            "K": self.K,
            "selected_ratio": None if not np.isfinite(self.selected_ratio) else self.selected_ratio,
            "selected_ratio_infinite": bool(np.isinf(self.selected_ratio)),
            "timings": dict(self.timings),
            "flags": list(self.flags),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def _merge_close(means: np.ndarray, step: float) -> np.ndarray:
    out = [means[0]]
    for m in means[1:]:
        if m - out[-1] <= step:
            out[-1] = 0.5 * (out[-1] + m)
        else:
            out.append(m)
    return np.array(out)


def estimate_from_fourier(data: FourierData, config: SVRConfig,
                          resolution: int = DEFAULT_RESOLUTION) -> EstimationResult:
    """Variance/order by SVR, means by MUSIC on demodulated data, then weights."""
    timings = {}
    flags = []

    t0 = time.perf_counter()
    v_hat, k_hat, surface = estimate_fourier(data, config)
    timings["svr"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    spectrum = music_spectrum(data.modulated(v_hat), k_hat, resolution)
    means = np.sort(spectrum.peaks)
    merged = _merge_close(means, spectrum.step)
    if merged.size < means.size:
        flags.append(f"merged {means.size - merged.size} colliding mean(s)")
        means = merged
    timings["music"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    solve = weight_solve(data, means, v_hat)
    if solve.rank_deficient:
        flags.append("rank-deficient weight design")
    timings["weights"] = time.perf_counter() - t0

    return EstimationResult(
        v=v_hat,
        k=int(means.size),
        means=means,
        weights=solve.weights,
        cutoff=data.grid.cutoff,
        K=data.grid.K,
        selected_ratio=surface.best_ratio,
        surface=surface,
        spectrum=spectrum,
        data=data,
        timings=timings,
        flags=flags,
    )


def estimate(samples: SampleSet, cutoff, K: int, candidates, threshold: float = 0.0,
             known_order: int | None = None, resolution: int = DEFAULT_RESOLUTION,
             search_steps: int = 8, search_init: float = 10.0,
             search_tau: float = 8.0, threshold_mode: str = "constant") -> EstimationResult:
    """Full estimate from samples.

    ``cutoff="auto"`` picks the cutoff frequency by bisection on the ECF
    modulus.  The samples are only read while forming Fourier data.
    """
    t0 = time.perf_counter()
    if isinstance(cutoff, str):
        if cutoff != "auto":
            raise ValueError("cutoff must be a number or 'auto'")
        cutoff = cutoff_search(samples, search_steps, search_init, search_tau)
    data = ecf(samples, FourierGrid(cutoff, K))
    t_ecf = time.perf_counter() - t0

    config = SVRConfig(candidates, threshold, known_order, threshold_mode)
    result = estimate_from_fourier(data, config, resolution)
    result.timings = {"ecf": t_ecf, **result.timings}
    return result
