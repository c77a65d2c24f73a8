"""Command-line front end.

Subcommands: ``estimate``, ``phase-transition``, ``compare-em``, ``cutoff``.
Options can also come from ``--config FILE.json`` (keys are the long option
names with dashes replaced by underscores); command-line flags win.

Exit codes: 0 success, 1 configuration error, 2 estimation failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import experiments as ex
from .fourier import FourierGrid, cutoff_search, synth_fourier
from .model import GaussianMixture, SampleSet, sample
from .pipeline import estimate, estimate_from_fourier
from .svr import THRESHOLD_MODES, EstimationError, SVRConfig, variance_grid


class ConfigError(Exception):
    pass


DEFAULTS = {
    "estimate": dict(samples=None, model=None, n=None, sigma=None, omega="auto", K=4,
                     vmax=2.0, vstep=0.01, T=0.0, c=None, threshold_mode="constant",
                     known_k=None, resolution=4096, t=8, omega_init=10.0, tau=8.0,
                     seed=None, out=None, with_timings=False),
    "phase-transition": dict(k=2, trials=2000, log_srf="0:3", log_snr="2:10",
                             unknown_variance=False, seed=None, jobs=None, out=None,
                             with_timings=False),
    "compare-em": dict(model=None, samples=None, separations=None, n="100000", trials=100,
                       K=4, s2_max=2.0, s2_step=0.01, c=0.0, threshold_mode="constant",
                       known_k=2, em_k="2", em_tol=1e-5, em_max_iter=1000,
                       resolution=4096, seed=None, jobs=None, out=None),
    "cutoff": dict(samples=None, t=8, omega_init=10.0, tau=8.0),
}


def _range(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(p) for p in str(text).split(":"))
    except ValueError:
        raise ConfigError(f"expected LO:HI, got {text!r}")
    if hi < lo:
        raise ConfigError(f"empty range {text!r}")
    return lo, hi


def _steps(text: str) -> list[float]:
    parts = [float(p) for p in str(text).split(":")]
    if len(parts) != 3 or parts[2] <= 0 or parts[1] < parts[0]:
        raise ConfigError(f"expected START:STOP:STEP, got {text!r}")
    lo, hi, step = parts
    count = int(round((hi - lo) / step)) + 1
    return [round(lo + i * step, 12) for i in range(count)]


def _ints(text) -> list[int]:
    return [int(float(p)) for p in str(text).split(",") if p.strip()]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mixfourier", description=__doc__.splitlines()[0])
    p.add_argument("--config", help="JSON file with option values")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("estimate", help="estimate order, variance, means and weights")
    e.add_argument("--samples", help="text file, one sample per line")
    e.add_argument("--model", help="mixture JSON {means, weights, variance}")
    e.add_argument("--n", type=int, help="with --model: draw n samples instead of using Fourier data")
    e.add_argument("--sigma", type=float, help="with --model: Fourier-domain noise level")
    e.add_argument("--omega", help="cutoff frequency or 'auto'")
    e.add_argument("--K", type=int)
    e.add_argument("--vmax", type=float, help="upper end of the s^2 search grid (candidates u = s^2/2)")
    e.add_argument("--vstep", type=float, help="step of the s^2 search grid")
    e.add_argument("--T", type=float, help="singular-value threshold")
    e.add_argument("--c", type=float, help="threshold as c/sqrt(n) (sample input only)")
    e.add_argument("--threshold-mode", choices=THRESHOLD_MODES)
    e.add_argument("--known-k", type=int)
    e.add_argument("--resolution", type=int)
    e.add_argument("--t", type=int, help="bisection steps for --omega auto")
    e.add_argument("--omega-init", type=float)
    e.add_argument("--tau", type=float)
    e.add_argument("--seed", type=int)
    e.add_argument("--out", help="output directory")
    e.add_argument("--with-timings", action="store_true", default=None)

    ph = sub.add_parser("phase-transition", help="model-order success over (log SRF, log SNR)")
    ph.add_argument("--k", type=int)
    ph.add_argument("--trials", type=int)
    ph.add_argument("--log-srf", help="LO:HI (base 10)")
    ph.add_argument("--log-snr", help="LO:HI (base 10)")
    ph.add_argument("--unknown-variance", action="store_true", default=None)
    ph.add_argument("--seed", type=int)
    ph.add_argument("--jobs", type=int)
    ph.add_argument("--out")
    ph.add_argument("--with-timings", action="store_true", default=None)

    c = sub.add_parser("compare-em", help="SVR pipeline against EM")
    c.add_argument("--model", help="ground-truth mixture JSON")
    c.add_argument("--samples", help="single external sample file (no ground truth)")
    c.add_argument("--separations", help="START:STOP:STEP sweep of 2-component separations")
    c.add_argument("--n", help="comma-separated sample sizes")
    c.add_argument("--trials", type=int)
    c.add_argument("--K", type=int)
    c.add_argument("--s2-max", type=float)
    c.add_argument("--s2-step", type=float)
    c.add_argument("--c", type=float, help="threshold constant, T = c/sqrt(n)")
    c.add_argument("--threshold-mode", choices=THRESHOLD_MODES)
    c.add_argument("--known-k", type=int, help="0 for unknown order")
    c.add_argument("--em-k", help="comma-separated EM component counts")
    c.add_argument("--em-tol", type=float)
    c.add_argument("--em-max-iter", type=int)
    c.add_argument("--resolution", type=int)
    c.add_argument("--seed", type=int)
    c.add_argument("--jobs", type=int)
    c.add_argument("--out")

    cu = sub.add_parser("cutoff", help="bisection search for the cutoff frequency")
    cu.add_argument("--samples")
    cu.add_argument("--t", type=int)
    cu.add_argument("--omega-init", type=float)
    cu.add_argument("--tau", type=float)
    return p


def resolve(args: argparse.Namespace) -> dict:
    """Merge defaults, the JSON config file and explicit flags (in that order)."""
    opts = dict(DEFAULTS[args.command])
    if args.config:
        path = Path(args.config)
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        file_opts = json.loads(path.read_text())
        unknown = set(file_opts) - set(opts)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        opts.update(file_opts)
    for key in opts:
        val = getattr(args, key, None)
        if val is not None:
            opts[key] = val
    return opts


def _seed(opts, required=True):
    if opts.get("seed") is not None:
        return int(opts["seed"])
    env = os.environ.get("MIXFOURIER_SEED")
    if env is not None:
        return int(env)
    if required:
        raise ConfigError("a seed is required (--seed or MIXFOURIER_SEED)")
    return None


def _load_samples(path) -> SampleSet:
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"sample file not found: {p}")
    try:
        return SampleSet.load(p)
    except ValueError as err:
        raise ConfigError(f"cannot read samples from {p}: {err}")


def _load_model(path) -> GaussianMixture:
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"model file not found: {p}")
    try:
        return GaussianMixture.load(p)
    except (ValueError, KeyError) as err:
        raise ConfigError(f"invalid model file {p}: {err}")


def _outdir(opts) -> Path | None:
    if opts.get("out") is None:
        return None
    out = Path(opts["out"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def window_cutoff(m: GaussianMixture, K: int) -> float:
    """Cutoff keeping every mean inside 90% of the identifiable window ``[-pi/2h, pi/2h)``."""
    reach = float(np.max(np.abs(m.means)))
    if reach == 0:
        return optimal_or_one(m)
    return 0.9 * K * np.pi / (2.0 * reach)


def optimal_or_one(m: GaussianMixture) -> float:
    return ex.optimal_cutoff(m.k, m.v) if m.k >= 2 else 1.0


def cmd_estimate(opts) -> int:
    if (opts["samples"] is None) == (opts["model"] is None):
        raise ConfigError("give exactly one of --samples or --model")
    if opts["K"] < 1 or opts["vstep"] <= 0 or opts["vmax"] < 0 or opts["t"] < 1:
        raise ConfigError("need K >= 1, vstep > 0, vmax >= 0, t >= 1")
    candidates = variance_grid(opts["vmax"], opts["vstep"]) / 2.0
    known = opts["known_k"] or None
    K = opts["K"]

    data = None
    if opts["samples"] is not None:
        samples = _load_samples(opts["samples"])
    else:
        m = _load_model(opts["model"])
        if opts["n"] is not None:
            samples = sample(m, opts["n"], _seed(opts))
        else:
            samples = None
            sigma = opts["sigma"] or 0.0
            omega = window_cutoff(m, K) if opts["omega"] == "auto" else float(opts["omega"])
            seed = _seed(opts, required=sigma > 0)
            data = synth_fourier(m, FourierGrid(omega, K), sigma, seed)

    try:
        if data is not None:
            config = SVRConfig(candidates, opts["T"], known, opts["threshold_mode"])
            result = estimate_from_fourier(data, config, opts["resolution"])
        else:
            T = opts["c"] / math.sqrt(samples.n) if opts["c"] is not None else opts["T"]
            omega = opts["omega"] if opts["omega"] == "auto" else float(opts["omega"])
            result = estimate(samples, omega, K, candidates, T, known, opts["resolution"],
                              opts["t"], opts["omega_init"], opts["tau"], opts["threshold_mode"])
    except (EstimationError, OverflowError) as err:
        print(f"estimation failed: {err}", file=sys.stderr)
        return 2

    payload = result.to_dict()
    if not opts["with_timings"]:
        payload.pop("timings")
    text = json.dumps(payload, sort_keys=True, indent=2)
    print(text)
    out = _outdir(opts)
    if out is not None:
        (out / "estimate.json").write_text(text + "\n", encoding="utf-8")
        result.surface.to_csv(out / "surface.csv")
        result.spectrum.to_csv(out / "spectrum.csv")
    return 0


PHASE_COLUMNS = ["trial", "seed", "log_srf", "log_snr", "srf", "snr", "d_min", "sigma",
                 "pi_min", "cutoff", "k_true", "k_hat", "v_hat", "success"]


def cmd_phase_transition(opts) -> int:
    if opts["trials"] < 1 or opts["k"] < 2:
        raise ConfigError("need trials >= 1 and k >= 2")
    cfg = ex.PhaseConfig(k=opts["k"], trials=opts["trials"], log_srf=_range(opts["log_srf"]),
                         log_snr=_range(opts["log_snr"]),
                         known_variance=not opts["unknown_variance"], seed=_seed(opts))
    jobs = opts["jobs"] or ex.default_jobs()
    records = ex.phase_transition(cfg, jobs)
    fit = ex.fit_transition_line(records)
    summary = {"config": {"k": cfg.k, "trials": cfg.trials, "log_srf": list(cfg.log_srf),
                          "log_snr": list(cfg.log_snr), "known_variance": cfg.known_variance,
                          "seed": cfg.seed},
               "fit": fit,
               "success_by_log_snr_bin": ex.success_by_snr_bins(records, 5, cfg.log_snr)}
    cols = PHASE_COLUMNS + (["runtime_ms"] if opts["with_timings"] else [])
    out = _outdir(opts)
    if out is not None:
        ex.write_csv(out / "phase_trials.csv", records, cols)
        ex.write_json(out / "phase_summary.json", summary)
    print(json.dumps(ex._jsonable(fit), sort_keys=True))
    return 0


COMPARE_COLUMNS = ["n", "trial", "method", "var_rel_err", "w1", "runtime_ms", "loglik", "aic", "bic"]


def cmd_compare_em(opts) -> int:
    sources = [opts[k] is not None for k in ("model", "samples", "separations")]
    if sum(sources) != 1:
        raise ConfigError("give exactly one of --model, --samples or --separations")
    if opts["trials"] < 1:
        raise ConfigError("trials must be >= 1")
    known = opts["known_k"] or None
    em_k = tuple(_ints(opts["em_k"]))
    cfg = ex.CompareConfig(K=opts["K"], s2_max=opts["s2_max"], s2_step=opts["s2_step"],
                           threshold_c=opts["c"], threshold_mode=opts["threshold_mode"],
                           known_order=known, resolution=opts["resolution"], em_k=em_k,
                           em_tol=opts["em_tol"], em_max_iter=opts["em_max_iter"])
    jobs = opts["jobs"] or ex.default_jobs()
    n_list = _ints(opts["n"])
    cols = COMPARE_COLUMNS
    if opts["model"] is not None:
        rows = ex.compare_em(_load_model(opts["model"]), n_list, opts["trials"], _seed(opts), cfg, jobs)
        by = ("n", "method")
    elif opts["separations"] is not None:
        if len(n_list) != 1:
            raise ConfigError("a separation sweep takes a single --n")
        rows = ex.separation_sweep(_steps(opts["separations"]), n_list[0], opts["trials"],
                                   _seed(opts), cfg, jobs)
        cols = ["separation"] + COMPARE_COLUMNS
        by = ("separation", "method")
    else:
        samples = _load_samples(opts["samples"])
        # no ground truth: a unit-variance placeholder keeps the error columns defined
        rows = _compare_external(samples, cfg, _seed(opts))
        by = ("n", "method")
    summary = ex.summarize(rows, by)
    out = _outdir(opts)
    if out is not None:
        ex.write_csv(out / "compare_trials.csv", rows, cols)
        ex.write_json(out / "compare_summary.json", summary)
    print(json.dumps(ex._jsonable(summary), sort_keys=True, indent=2))
    return 0


def _compare_external(samples: SampleSet, cfg, seed) -> list:
    import time
    from .em import em_fit
    from .metrics import scorecard
    rows = []
    nan = float("nan")
    t0 = time.perf_counter()
    T = cfg.threshold_c / math.sqrt(samples.n)
    res = estimate(samples, "auto", cfg.K, cfg.candidates, T, cfg.known_order, cfg.resolution,
                   cfg.search_steps, cfg.search_init, cfg.search_tau, cfg.threshold_mode)
    dt = (time.perf_counter() - t0) * 1e3
    sc = scorecard(res.mixture, samples)
    rows.append(ex.CompareRow(samples.n, 0, "proposed", nan, res.k, nan, nan, dt,
                              sc.loglik, sc.aic, sc.bic))
    for k in cfg.em_k:
        t0 = time.perf_counter()
        fit = em_fit(samples, k, seed=ex.trial_seed(seed, 0, k), tol=cfg.em_tol,
                     max_iter=cfg.em_max_iter)
        dt = (time.perf_counter() - t0) * 1e3
        sc = scorecard(fit.mixture, samples)
        rows.append(ex.CompareRow(samples.n, 0, f"em{k}", nan, fit.mixture.k, nan, nan, dt,
                                  sc.loglik, sc.aic, sc.bic))
    return rows


def cmd_cutoff(opts) -> int:
    if opts["samples"] is None:
        raise ConfigError("--samples is required")
    if opts["t"] < 1 or opts["omega_init"] <= 0 or opts["tau"] <= 0:
        raise ConfigError("need t >= 1, omega-init > 0, tau > 0")
    samples = _load_samples(opts["samples"])
    print(format(cutoff_search(samples, opts["t"], opts["omega_init"], opts["tau"]), ".17g"))
    return 0


COMMANDS = {
    "estimate": cmd_estimate,
    "phase-transition": cmd_phase_transition,
    "compare-em": cmd_compare_em,
    "cutoff": cmd_cutoff,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    try:
        opts = resolve(args)
        return COMMANDS[args.command](opts)
    except ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except (ValueError, json.JSONDecodeError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
