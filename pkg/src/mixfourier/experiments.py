"""Monte-Carlo harnesses: phase-transition diagrams and comparisons against EM.

Every trial derives its own seed from ``(experiment seed, trial id)``, so
any single trial can be re-run in isolation and results do not depend on
the number of worker processes.
"""

from __future__ import annotations

import csv
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields

import numpy as np
from scipy.optimize import minimize

from .em import EMCollapseError, em_fit
from .fourier import FourierGrid, cutoff_search, synth_fourier
from .metrics import relative_error, scorecard, wasserstein1
from .model import GaussianMixture, log_likelihood, sample
from .pipeline import estimate
from .svr import EstimationError, SVRConfig, estimate_fourier, variance_grid


def trial_seed(seed: int, trial: int, stream: int = 0) -> int:
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(trial, stream))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _map(fn, items, jobs: int | None):
    jobs = jobs or 1
    if jobs <= 1:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items, chunksize=max(1, len(items) // (4 * jobs))))


def default_jobs() -> int:
    return os.cpu_count() or 1


# ---------------------------------------------------------------------------
# resolution limit


def optimal_cutoff(k: int, v: float) -> float:
    """Cutoff minimising the resolution threshold: ``sqrt((2k-2)/v)``."""
    if k < 2:
        raise ValueError("optimal cutoff is defined for k >= 2")
    if not v > 0:
        raise ValueError("v must be positive")
    return math.sqrt((2 * k - 2) / v)


def resolution_limit(v: float, k: int, pi_min: float, noise: float | None = None,
                     n: int | None = None) -> float:
    """Order-of-magnitude separation below which the order may not be resolvable.

    Give either the sup-norm of the Fourier noise (``noise``) or the sample
    size ``n`` (noise ~ 1/sqrt(n)).  The universal constant is taken as 1.
    """
    if k < 2:
        raise ValueError("resolution limit is defined for k >= 2")
    if (noise is None) == (n is None):
        raise ValueError("give exactly one of noise or n")
    if not (v > 0 and pi_min > 0):
        raise ValueError("v and pi_min must be positive")
    level = noise if noise is not None else 1.0 / math.sqrt(n)
    if not level > 0:
        raise ValueError("noise level must be positive")
    return math.sqrt(v / (2 * k - 2)) * (level / pi_min) ** (1.0 / (2 * k - 2))


# ---------------------------------------------------------------------------
# phase transition


@dataclass
class TrialRecord:
    trial: int
    seed: int
    log_srf: float
    log_snr: float
    srf: float
    snr: float
    d_min: float
    sigma: float
    pi_min: float
    cutoff: float
    k_true: int
    k_hat: int
    v_hat: float
    w1: float
    runtime_ms: float
    success: bool

    def check_consistency(self) -> bool:
        srf = np.pi / (self.d_min * self.cutoff)
        snr = self.pi_min / self.sigma
        return (abs(srf - self.srf) <= 1e-12 * max(1.0, srf)
                and abs(snr - self.snr) <= 1e-12 * max(1.0, snr))


@dataclass(frozen=True)
class PhaseConfig:
    k: int = 2
    trials: int = 2000
    log_srf: tuple = (0.0, 3.0)
    log_snr: tuple = (2.0, 10.0)
    known_variance: bool = True
    seed: int = 0
    s2: float = 1.0
    # modulation grid u = s^2 / 2 over [0, 1]
    vmax: float = 1.0
    vstep: float = 0.02


def equally_spaced_means(k: int, d: float) -> np.ndarray:
    return d * (np.arange(k) - (k - 1) / 2.0)


def phase_trial(cfg: PhaseConfig, trial: int) -> TrialRecord:
    """One point of the diagram: sample (log SRF, log SNR), build noisy Fourier data, run SVR."""
    seed = trial_seed(cfg.seed, trial)
    rng = np.random.default_rng(seed)
    lsrf = rng.uniform(*cfg.log_srf)
    lsnr = rng.uniform(*cfg.log_snr)
    srf, snr = 10.0**lsrf, 10.0**lsnr
    k = cfg.k
    v = cfg.s2 / 2.0
    cutoff = optimal_cutoff(k, v)
    d_min = np.pi / (srf * cutoff)
    pi_min = 1.0 / k
    sigma = pi_min / snr
    m = GaussianMixture(equally_spaced_means(k, d_min), np.full(k, 1.0 / k), cfg.s2)
    grid = FourierGrid(cutoff, k)
    t0 = time.perf_counter()
    data = synth_fourier(m, grid, sigma, rng)
    if cfg.known_variance:
        config = SVRConfig([v])
    else:
        config = SVRConfig(variance_grid(cfg.vmax, cfg.vstep), threshold=2.0 * sigma)
    try:
        v_hat, k_hat, _ = estimate_fourier(data, config)
    except EstimationError:
        v_hat, k_hat = float("nan"), 0
    runtime = (time.perf_counter() - t0) * 1e3
    return TrialRecord(trial, seed, lsrf, lsnr, srf, snr, d_min, sigma, pi_min, cutoff,
                       k, int(k_hat), float(v_hat), float("nan"), runtime, k_hat == k)


def _phase_job(args):
    return phase_trial(*args)


def phase_transition(cfg: PhaseConfig, jobs: int | None = 1,
                     trial_ids=None) -> list[TrialRecord]:
    ids = range(cfg.trials) if trial_ids is None else trial_ids
    return _map(_phase_job, [(cfg, t) for t in ids], jobs)


def corner_probe(cfg: PhaseConfig, log_srf: float, log_snr: float, trials: int = 100,
                 jobs: int | None = 1) -> list[TrialRecord]:
    """Trials pinned to a single (log SRF, log SNR) point."""
    pinned = PhaseConfig(**{**asdict(cfg), "log_srf": (log_srf, log_srf),
                            "log_snr": (log_snr, log_snr), "trials": trials})
    return phase_transition(pinned, jobs)


def fit_transition_line(records) -> dict:
    """Logistic fit of success on (log SRF, log SNR).

    The 50% contour ``a + b x + c y = 0`` gives the transition line
    ``y = -(a + b x) / c``; its slope in the (log SRF, log SNR) plane is
    ``-b / c``.  A small ridge term keeps the fit finite under perfect
    separation.
    """
    x = np.array([r.log_srf for r in records])
    y = np.array([r.log_snr for r in records])
    s = np.array([float(r.success) for r in records])
    X = np.column_stack([np.ones_like(x), x, y])
    ridge = 1e-4

    def loss(beta):
        z = X @ beta
        return np.sum(np.logaddexp(0.0, z) - s * z) + ridge * beta[1:] @ beta[1:]

    def grad(beta):
        p = 0.5 * (1.0 + np.tanh(0.5 * (X @ beta)))
        g = X.T @ (p - s)
        g[1:] += 2 * ridge * beta[1:]
        return g

    res = minimize(loss, np.zeros(3), jac=grad, method="BFGS")
    a, b, c = res.x
    return {"intercept": float(a), "coef_log_srf": float(b), "coef_log_snr": float(c),
            "slope": float(-b / c), "line_intercept": float(-a / c),
            "success_rate": float(s.mean()), "trials": int(s.size)}


def success_by_snr_bins(records, bins: int = 5, log_snr=(2.0, 10.0)) -> list[float]:
    edges = np.linspace(*log_snr, bins + 1)
    y = np.array([r.log_snr for r in records])
    s = np.array([r.success for r in records], dtype=float)
    idx = np.clip(np.searchsorted(edges, y, side="right") - 1, 0, bins - 1)
    return [float(s[idx == b].mean()) if np.any(idx == b) else float("nan") for b in range(bins)]


# ---------------------------------------------------------------------------
# comparison with EM


@dataclass(frozen=True)
class CompareConfig:
    """Settings of one EM-versus-SVR comparison.

    ``s2_max``/``s2_step`` define the variance grid on ``s^2``; the
    modulation candidates are half of it.
    """

    K: int = 4
    s2_max: float = 2.0
    s2_step: float = 0.01
    threshold_c: float = 0.0
    threshold_mode: str = "constant"
    known_order: int | None = 2
    search_steps: int = 8
    search_init: float = 10.0
    search_tau: float = 8.0
    resolution: int = 2**12
    em_k: tuple = (2,)
    em_tol: float = 1e-5
    em_max_iter: int = 1000

    @property
    def candidates(self) -> np.ndarray:
        return variance_grid(self.s2_max, self.s2_step) / 2.0


@dataclass
class CompareRow:
    n: int
    trial: int
    method: str
    separation: float
    k_hat: int
    var_rel_err: float
    w1: float
    runtime_ms: float
    loglik: float
    aic: float
    bic: float

    CSV_FIELDS = ("n", "trial", "method", "separation", "k_hat", "var_rel_err", "w1",
                  "runtime_ms", "loglik", "aic", "bic")


def compare_trial(model: GaussianMixture, n: int, trial: int, seed: int,
                  cfg: CompareConfig, separation: float = float("nan")) -> list[CompareRow]:
    x = sample(model, n, trial_seed(seed, trial, 0))
    rows = []

    t0 = time.perf_counter()
    try:
        thr = cfg.threshold_c / math.sqrt(n)
        res = estimate(x, "auto", cfg.K, cfg.candidates, thr, cfg.known_order,
                       cfg.resolution, cfg.search_steps, cfg.search_init, cfg.search_tau,
                       cfg.threshold_mode)
        est = res.mixture
        dt = (time.perf_counter() - t0) * 1e3
        sc = scorecard(est, x)
        rows.append(CompareRow(n, trial, "proposed", separation, est.k,
                               relative_error(est.variance_s2, model.variance_s2),
                               wasserstein1(model, est), dt, sc.loglik, sc.aic, sc.bic))
    except EstimationError:
        nan = float("nan")
        rows.append(CompareRow(n, trial, "proposed", separation, 0, nan, nan,
                               (time.perf_counter() - t0) * 1e3, nan, nan, nan))

    for k in cfg.em_k:
        t0 = time.perf_counter()
        try:
            fit = em_fit(x, k, seed=trial_seed(seed, trial, k), tol=cfg.em_tol,
                         max_iter=cfg.em_max_iter)
            dt = (time.perf_counter() - t0) * 1e3
            est = fit.mixture
            sc = scorecard(est, x)
            rows.append(CompareRow(n, trial, f"em{k}", separation, est.k,
                                   relative_error(est.variance_s2, model.variance_s2),
                                   wasserstein1(model, est), dt, sc.loglik, sc.aic, sc.bic))
        except EMCollapseError:
            nan = float("nan")
            rows.append(CompareRow(n, trial, f"em{k}", separation, 0, nan, nan,
                                   (time.perf_counter() - t0) * 1e3, nan, nan, nan))
    return rows


def _compare_job(args):
    return compare_trial(*args)


def compare_em(model: GaussianMixture, n_list, trials: int, seed: int,
               cfg: CompareConfig = CompareConfig(), jobs: int | None = 1) -> list[CompareRow]:
    """Run the SVR pipeline and EM on the same samples for every (n, trial)."""
    work = [(model, int(n), t, trial_seed(seed, int(n)), cfg) for n in n_list for t in range(trials)]
    return [row for rows in _map(_compare_job, work, jobs) for row in rows]


def separation_sweep(separations, n: int, trials: int, seed: int,
                     cfg: CompareConfig | None = None, jobs: int | None = 1) -> list[CompareRow]:
    """Two equal-weight unit-variance components at ``+-sep/2`` for each separation."""
    if cfg is None:
        cfg = CompareConfig(K=2, known_order=None, em_k=(1, 2))
    work = []
    for i, sep in enumerate(separations):
        m = GaussianMixture([-sep / 2, sep / 2], [0.5, 0.5], 1.0)
        for t in range(trials):
            work.append((m, n, t, trial_seed(seed, 10_000 + i), cfg, float(sep)))
    return [row for rows in _map(_compare_job, work, jobs) for row in rows]


def summarize(rows, by=("n", "method")) -> list[dict]:
    """Mean/median/quantiles per group, plus loglik/AIC/BIC differences against the proposed method."""
    groups: dict = {}
    for r in rows:
        groups.setdefault(tuple(getattr(r, b) for b in by), []).append(r)
    out = []
    def order(kv):
        return tuple((0, k, "") if isinstance(k, (int, float)) else (1, 0, str(k)) for k in kv[0])

    for key, grp in sorted(groups.items(), key=order):
        entry = dict(zip(by, key))
        entry["trials"] = len(grp)
        for f in ("var_rel_err", "w1", "runtime_ms", "loglik", "aic", "bic"):
            vals = np.array([getattr(r, f) for r in grp], dtype=float)
            vals = vals[np.isfinite(vals)]
            if vals.size:
                entry[f"{f}_mean"] = float(vals.mean())
                entry[f"{f}_median"] = float(np.median(vals))
                entry[f"{f}_q10"] = float(np.quantile(vals, 0.1))
                entry[f"{f}_q90"] = float(np.quantile(vals, 0.9))
        out.append(entry)
    # differences of EM against the proposed method, paired by trial
    keyed = {}
    for r in rows:
        keyed[tuple(getattr(r, b) for b in by if b != "method") + (r.trial, r.method)] = r
    for entry in out:
        if entry.get("method", "").startswith("em"):
            d_ll, d_aic, d_bic = [], [], []
            base = tuple(entry[b] for b in by if b != "method")
            for r in rows:
                if r.method != entry["method"] or tuple(getattr(r, b) for b in by if b != "method") != base:
                    continue
                p = keyed.get(base + (r.trial, "proposed"))
                if p is not None and np.isfinite(p.loglik) and np.isfinite(r.loglik):
                    d_ll.append(r.loglik - p.loglik)
                    d_aic.append(r.aic - p.aic)
                    d_bic.append(r.bic - p.bic)
            if d_ll:
                entry["delta_ll_mean"] = float(np.mean(d_ll))
                entry["delta_aic_mean"] = float(np.mean(d_aic))
                entry["delta_bic_mean"] = float(np.mean(d_bic))
    return out


# ---------------------------------------------------------------------------
# output


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def write_csv(path, records, columns=None) -> None:
    records = list(records)
    if columns is None:
        columns = [f.name for f in fields(records[0])] if records else []
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for r in records:
            w.writerow([_fmt(getattr(r, c)) for c in columns])


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if math.isfinite(f) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_json(path, obj) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(_jsonable(obj), fh, sort_keys=True, indent=2)
        fh.write("\n")
