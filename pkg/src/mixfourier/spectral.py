"""Mean recovery by MUSIC and weight recovery by simplex-constrained least squares."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .fourier import FourierData
from .hankel import hankel, music_subspace

DEFAULT_RESOLUTION = 2**12


@dataclass(frozen=True)
class MusicSpectrum:
    mu: np.ndarray
    values: np.ndarray
    k: int
    peaks: np.ndarray

    @property
    def step(self) -> float:
        return float(self.mu[1] - self.mu[0])

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["mu", "J"])
            for m, j in zip(self.mu, self.values):
                w.writerow([f"{m:.17g}", f"{j:.17g}"])


def steering_vectors(mu: np.ndarray, data: FourierData) -> np.ndarray:
    """Columns ``(exp(i mu omega_q))_{q=-K..0}``, one per trial mean."""
    omega = data.frequencies[: data.grid.K + 1]
    return np.exp(1j * np.multiply.outer(omega, np.asarray(mu, dtype=float)))


def imaging_function(U2: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """``||phi|| / ||U2^* phi||`` per column; the denominator is floored at ``eps ||phi||``."""
    num = np.linalg.norm(phi, axis=0)
    den = np.linalg.norm(U2.conj().T @ phi, axis=0)
    return num / np.maximum(den, np.finfo(float).eps * num)


def music_spectrum(modulated: FourierData, k: int,
                   resolution: int = DEFAULT_RESOLUTION) -> MusicSpectrum:
    """MUSIC imaging of demodulated data on a uniform grid over ``[-pi/2h, pi/2h)``.

    ``modulated`` must already carry the ``exp(v omega^2)`` factor.
    """
    K = modulated.grid.K
    if not 1 <= k < K + 1:
        raise ValueError(f"k must satisfy 1 <= k <= K={K}, got {k}")
    if resolution < 3:
        raise ValueError("resolution must be >= 3")
    U2 = music_subspace(hankel(modulated), k)
    lo, hi = modulated.grid.mean_range
    mu = np.linspace(lo, hi, resolution, endpoint=False)
    J = imaging_function(U2, steering_vectors(mu, modulated))
    return MusicSpectrum(mu=mu, values=J, k=k, peaks=_pick_peaks(mu, J, k))


def _pick_peaks(mu: np.ndarray, J: np.ndarray, k: int) -> np.ndarray:
    inner = np.arange(1, J.size - 1)
    is_peak = (J[inner] > J[inner - 1]) & (J[inner] > J[inner + 1])
    cand = inner[is_peak]
    # stable sort on -J keeps the smaller mu first among equal heights
    cand = cand[np.argsort(-J[cand], kind="stable")]
    chosen = list(cand[:k])
    if len(chosen) < k:
        for idx in np.argsort(-J, kind="stable"):
            if all(abs(int(idx) - c) > 1 for c in chosen):
                chosen.append(int(idx))
            if len(chosen) == k:
                break
    return np.sort(mu[np.array(chosen, dtype=int)])


def music_peaks(spectrum: MusicSpectrum, k: int | None = None) -> np.ndarray:
    """The ``k`` highest strict local maxima of the imaging function, ascending.

    Falls back to the largest values (at least two grid steps apart) when
    there are fewer than ``k`` local maxima.
    """
    if k is None or k == spectrum.k:
        return spectrum.peaks
    return _pick_peaks(spectrum.mu, spectrum.values, k)


def project_simplex(y: np.ndarray) -> np.ndarray:
    """Euclidean projection onto ``{x >= 0, sum x = 1}`` (sort-based)."""
    y = np.asarray(y, dtype=float)
    u = np.sort(y)[::-1]
    css = np.cumsum(u) - 1.0
    ind = np.arange(1, y.size + 1)
    rho = np.nonzero(u - css / ind > 0)[0][-1]
    tau = css[rho] / (rho + 1.0)
    return np.maximum(y - tau, 0.0)


@dataclass(frozen=True)
class WeightSolve:
    design: np.ndarray       # (2K+1, k) complex
    observed: np.ndarray     # (2K+1,) complex
    weights: np.ndarray
    residual: float
    iterations: int
    rank_deficient: bool


def design_matrix(data: FourierData, means, v: float) -> np.ndarray:
    """Columns ``exp(-v omega_q^2) exp(i mu omega_q)`` over all ``2K+1`` frequencies."""
    omega = data.frequencies
    env = np.exp(-v * omega**2)
    return env[:, None] * np.exp(1j * np.multiply.outer(omega, np.asarray(means, dtype=float)))


def weight_solve(data: FourierData, means, v: float, tol: float = 1e-12,
                 max_iter: int = 10_000) -> WeightSolve:
    """Minimise ``||y - Z theta||_2`` over the probability simplex.

    Projected gradient with step ``1/L`` on the real-stacked problem,
    started from the barycentre.
    """
    means = np.atleast_1d(np.asarray(means, dtype=float))
    if v < 0:
        raise ValueError("v must be >= 0")
    if np.unique(means).size != means.size:
        raise ValueError("means must be distinct")
    Z = design_matrix(data, means, v)
    y = data.values
    k = means.size
    if k == 1:
        theta = np.ones(1)
        return WeightSolve(Z, y, theta, float(np.linalg.norm(y - Z @ theta)), 0, False)

    A = np.vstack([Z.real, Z.imag])
    b = np.concatenate([y.real, y.imag])
    G = A.T @ A
    Atb = A.T @ b
    L = np.linalg.eigvalsh(G)[-1]
    rank_deficient = np.linalg.matrix_rank(A) < k

    theta = np.full(k, 1.0 / k)
    it = 0
    for it in range(1, max_iter + 1):
        nxt = project_simplex(theta - (G @ theta - Atb) / L)
        moved = np.linalg.norm(nxt - theta)
        theta = nxt
        if moved < tol:
            break
    theta = np.maximum(theta, 0.0)
    theta /= theta.sum()
    return WeightSolve(Z, y, theta, float(np.linalg.norm(y - Z @ theta)), it, bool(rank_deficient))


def estimate_weights(data: FourierData, means, v: float) -> np.ndarray:
    return weight_solve(data, means, v).weights
