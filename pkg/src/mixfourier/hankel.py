"""Hankel matrices of Fourier data, Gaussian modulation, and the SVD kernel."""

from __future__ import annotations

import numpy as np
from scipy.linalg import hankel as _scipy_hankel

from .fourier import FourierData, FourierGrid

# exp(300) ~ 1.9e130; leaves headroom for products with data before overflow.
MAX_EXPONENT = 300.0


def check_modulation_range(grid: FourierGrid, u: float) -> None:
    if u * grid.cutoff**2 > MAX_EXPONENT:
        raise OverflowError(
            f"modulation exp(u * cutoff^2) with u={u:g}, cutoff={grid.cutoff:g} "
            f"exceeds exp({MAX_EXPONENT:g})"
        )


def hankel_from_values(values: np.ndarray) -> np.ndarray:
    """Square Hankel matrix ``M[i, j] = values[i + j]`` from ``2K + 1`` values."""
    values = np.asarray(values)
    if values.ndim != 1 or values.size % 2 == 0:
        raise ValueError("need an odd number (2K+1) of values")
    K = values.size // 2
    return _scipy_hankel(values[:K + 1], values[K:])


def hankel(data: FourierData) -> np.ndarray:
    """``(K+1) x (K+1)`` Hankel matrix; row ``i``, column ``j`` holds ``Y(omega_{-K+i+j})``."""
    if data.values.size != 2 * data.grid.K + 1:
        raise ValueError("Fourier data length does not match its grid")
    return hankel_from_values(data.values)


def modulation(grid: FourierGrid, u: float) -> np.ndarray:
    """Entrywise Gaussian modulation ``E(u)[i, j] = exp(u * omega_{-K+i+j}^2)``."""
    check_modulation_range(grid, u)
    return hankel_from_values(np.exp(u * grid.frequencies**2))


def singular_values(matrix) -> np.ndarray:
    """All singular values, descending."""
    a = np.asarray(matrix)
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return np.linalg.svd(a, compute_uv=False)


def modulated_hankel(data: FourierData, u: float) -> np.ndarray:
    return modulation(data.grid, u) * hankel(data)


def modulated_singular_values(data: FourierData, u: float) -> np.ndarray:
    return singular_values(modulated_hankel(data, u))


def music_subspace(matrix, k: int) -> np.ndarray:
    """Orthonormal basis of the left singular subspace past the ``k`` leading directions."""
    a = np.asarray(matrix)
    n = a.shape[0]
    if not 0 <= k < n:
        raise ValueError(f"k must satisfy 0 <= k < {n}, got {k}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    U, _, _ = np.linalg.svd(a)
    return U[:, k:]
