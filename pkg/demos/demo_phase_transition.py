"""
Where order detection breaks down
=================================

Two equal-weight components are placed ``d = pi / (SRF * cutoff)`` apart and
observed through Fourier data with noise ``sigma = pi_min / SNR``.  Sampling
(log SRF, log SNR) uniformly shows a sharp boundary between success and
failure whose slope is close to 2k.
"""

# %%
import numpy as np

from mixfourier import experiments as ex

cfg = ex.PhaseConfig(k=2, trials=2000, seed=7)
records = ex.phase_transition(cfg)
fit = ex.fit_transition_line(records)
print(f"fitted boundary: log SNR = {fit['slope']:.2f} * log SRF + {fit['line_intercept']:.2f}")

# %%
# A coarse text rendering of the success rate: rows are log SNR bands
# (high at the top), columns are log SRF bands.
x = np.array([r.log_srf for r in records])
y = np.array([r.log_snr for r in records])
s = np.array([r.success for r in records], dtype=float)
xb = np.linspace(0, 3, 7)
yb = np.linspace(2, 10, 9)
for j in range(len(yb) - 2, -1, -1):
    cells = []
    for i in range(len(xb) - 1):
        sel = (x >= xb[i]) & (x < xb[i + 1]) & (y >= yb[j]) & (y < yb[j + 1])
        cells.append(f"{s[sel].mean():4.2f}" if sel.any() else "  - ")
    print(f"log SNR {yb[j]:4.1f}-{yb[j + 1]:4.1f} | " + " ".join(cells))

# %%
# The optimal cutoff and the resulting resolution limit for this setup.
print("optimal cutoff:", ex.optimal_cutoff(2, 0.5))
for n in (10**3, 10**4, 10**5):
    print(f"n={n:>6}: resolution limit ~ {ex.resolution_limit(0.5, 2, 0.5, n=n):.3f}")
