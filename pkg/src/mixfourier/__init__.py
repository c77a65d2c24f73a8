"""Fourier/Hankel estimation of one-dimensional Gaussian mixtures with a shared variance."""

from .em import EMCollapseError, em_fit, em_loglik
from .fourier import (FourierData, FourierGrid, cutoff_search, ecf, exact_fourier,
                      hoeffding_bound, noise_threshold, synth_fourier)
from .hankel import (hankel, modulated_singular_values, modulation, music_subspace,
                     singular_values)
from .metrics import ScoreCard, relative_error, scorecard, wasserstein1
from .model import (GaussianMixture, MixingDistribution, SampleSet, characteristic_function,
                    density, log_likelihood, mixing_distribution, sample)
from .pipeline import EstimationResult, estimate, estimate_from_fourier
from .spectral import (MusicSpectrum, WeightSolve, estimate_weights, music_peaks,
                       music_spectrum, project_simplex, weight_solve)
from .svr import (EstimationError, SVRConfig, SVRSurface, estimate_fourier, estimate_samples,
                  ratio_lower_bound, svr_surface, variance_grid)

__version__ = "0.1.0"
