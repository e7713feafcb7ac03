"""Monte Carlo experiments on eigenvector components of the spiked GUE.

A trial samples one spiked matrix, computes the requested squared
components (directly from an eigensolver, through the spectra of minors, or
both) and, for first-coordinate observables, the truncated edge products.
Trials run in any number of processes; results are folded in trial order.
"""
from __future__ import annotations

import csv
import json
import logging
import math
from dataclasses import dataclass, field
from functools import partial
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from spikedgue import accel
from spikedgue.errors import (
    DegenerateSpectrumError,
    EigenSolverError,
    InterlacingError,
    InvalidDimensionError,
    SpikedGUEError,
)
from spikedgue.identity import (
    ComponentQuery,
    ComponentRecord,
    log_component_sq,
    log_xi_orders,
    minor_spectrum,
    scale_factor,
)
from spikedgue.linalg import SpikeConfig, eigh_top, eigvalsh, principal_minor, spiked_gue
from spikedgue.parallel import ordered_map, trial_seed
from spikedgue.spectra import chain_from_levels

log = logging.getLogger(__name__)

METHODS = ("direct", "identity", "both")
MAX_FAILURE_RATE = 1e-3
XI_FRACTIONS = (8, 4, 2)
BANDWIDTH_FLOOR = 1e-3
KDE_MARGIN = 8.0


class TrialFailureError(SpikedGUEError, RuntimeError):
    """Too many trials failed for the run to be trusted."""


@dataclass(frozen=True)
class ExperimentConfig:
    spike: SpikeConfig
    trials: int
    master_seed: int
    observables: Tuple[ComponentQuery, ...]
    method: str = "direct"
    xi_orders: Tuple[int, ...] = ()

    def __post_init__(self):
        obs = tuple(o if isinstance(o, ComponentQuery) else ComponentQuery(*o) for o in self.observables)
        object.__setattr__(self, "observables", obs)
        if self.trials < 1:
            raise InvalidDimensionError("trials must be >= 1")
        if not obs:
            raise InvalidDimensionError("at least one observable is required")
        for o in obs:
            o.validate(self.spike.N)
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must be a 64-bit unsigned integer")
        orders = tuple(int(n) for n in self.xi_orders)
        if not orders:
            orders = tuple(n for n in (self.spike.N // f for f in XI_FRACTIONS) if n >= 2)
        object.__setattr__(self, "xi_orders", orders)

    def echo(self) -> dict:
        """Everything needed to re-run the experiment."""
        return {
            "N": self.spike.N,
            "k": self.spike.k,
            "a": list(self.spike.a),
            "trials": self.trials,
            "master_seed": self.master_seed,
            "observables": [f"{o.j}:{o.l}" for o in self.observables],
            "method": self.method,
            "xi_orders": list(self.xi_orders),
        }


@dataclass
class TrialResults:
    config: ExperimentConfig
    records: List[ComponentRecord]
    failures: List[Tuple[int, int, str]] = field(default_factory=list)

    def samples(self, j: int, l: int) -> np.ndarray:
        return np.array([r.scaled_value for r in self.records if r.j == j and r.l == l])

    def by_observable(self) -> Dict[Tuple[int, int], np.ndarray]:
        return {(o.j, o.l): self.samples(o.j, o.l) for o in self.config.observables}


def _one_trial(cfg: ExperimentConfig, t: int):
    sp = cfg.spike
    N = sp.N
    seed = trial_seed(cfg.master_seed, t)
    try:
        m = spiked_gue(sp, seed)
        direct = identity = None
        if cfg.method in ("direct", "both"):
            es = eigh_top(m, max(o.j for o in cfg.observables))
            direct = np.abs(es.vectors) ** 2
        chain = None
        minors = {}
        if cfg.method in ("identity", "both") or cfg.xi_orders and any(o.l == 1 for o in cfg.observables):
            if N >= 2:
                chain = chain_from_levels([eigvalsh(m), eigvalsh(principal_minor(m, 1))])
        if cfg.method in ("identity", "both"):
            identity = {}
            for o in cfg.observables:
                if N == 1:
                    identity[(o.j, o.l)] = 1.0
                    continue
                if o.l not in minors:
                    minors[o.l] = chain.levels[1] if o.l == 1 else minor_spectrum(m, o.l)
                identity[(o.j, o.l)] = math.exp(log_component_sq(chain.levels[0], minors[o.l], o.j))
        out = []
        for o in cfg.observables:
            d = float(direct[o.l - 1, o.j - 1]) if direct is not None else None
            s = identity[(o.j, o.l)] if identity is not None else None
            base = d if d is not None else s
            xis: List[float] = []
            if chain is not None and o.l == 1:
                orders = [n for n in cfg.xi_orders if o.j < n <= N]
                xis = [math.exp(v) for v in log_xi_orders(chain, o.j, orders)]
            out.append(
                ComponentRecord(
                    trial=t,
                    seed=seed,
                    N=N,
                    k=sp.k,
                    a=list(sp.a),
                    j=o.j,
                    l=o.l,
                    direct_sq=d,
                    identity_sq=s,
                    scaled_value=scale_factor(N, sp.k, o.l) * base,
                    xi_truncations=xis,
                )
            )
        return t, out, None
    except (EigenSolverError, DegenerateSpectrumError, InterlacingError) as exc:
        return t, [], f"{type(exc).__name__}: {exc}"


def run_trials(cfg: ExperimentConfig, workers: int = 1) -> TrialResults:
    """Run every trial and fold results in trial order.

    Trials whose eigensolve fails are dropped and counted; more than 0.1%
    failures aborts the run.
    """
    fn = partial(_one_trial, cfg)
    results = ordered_map(fn, range(cfg.trials), workers)
    records: List[ComponentRecord] = []
    failures = []
    for t, recs, err in results:
        if err is not None:
            failures.append((t, trial_seed(cfg.master_seed, t), err))
            continue
        records.extend(recs)
    if failures:
        log.warning("%d of %d trials failed and were excluded", len(failures), cfg.trials)
        if len(failures) > MAX_FAILURE_RATE * cfg.trials:
            raise TrialFailureError(
                f"{len(failures)} of {cfg.trials} trials failed (limit {MAX_FAILURE_RATE:.1%}); "
                f"first: trial {failures[0][0]} seed {failures[0][1]}: {failures[0][2]}"
            )
    return TrialResults(cfg, records, failures)


@dataclass(frozen=True, eq=False)
class EmpiricalCurve:
    grid: np.ndarray
    values: np.ndarray
    kind: str
    meta: dict = field(default_factory=dict)


def silverman_bandwidth(samples) -> float:
    x = np.asarray(samples, dtype=np.float64)
    sd = float(np.std(x, ddof=1))
    q75, q25 = np.percentile(x, [75, 25])
    iqr = float(q75 - q25) / 1.34
    spread = min(sd, iqr) if sd > 0 and iqr > 0 else max(sd, iqr)
    return 0.9 * spread * x.size ** (-0.2)


def kde(samples, bandwidth: Optional[float] = None) -> EmpiricalCurve:
    """Gaussian kernel density estimate on an automatic grid.

    The grid extends 8 bandwidths past the extreme samples with spacing at
    most a quarter bandwidth, so the trapezoid integral is 1 to ~1e-12.
    """
    x = np.ascontiguousarray(samples, dtype=np.float64)
    if x.size < 2:
        raise InvalidDimensionError("kde needs at least 2 samples")
    if bandwidth is not None and not bandwidth > 0:
        raise ValueError("bandwidth must be positive")
    h = silverman_bandwidth(x) if bandwidth is None else float(bandwidth)
    floored = h < BANDWIDTH_FLOOR
    h = max(h, BANDWIDTH_FLOOR)
    lo = float(np.min(x)) - KDE_MARGIN * h
    hi = float(np.max(x)) + KDE_MARGIN * h
    points = int(min(2**16, max(512, math.ceil((hi - lo) / (h / 4.0)) + 1)))
    grid = np.linspace(lo, hi, points)
    vals = accel.gaussian_kde_grid(x, grid, h)
    meta = {"bandwidth": h, "bandwidth_floored": floored, "samples": int(x.size), "margin_bandwidths": KDE_MARGIN}
    return EmpiricalCurve(grid, np.asarray(vals), "kde", meta)


def tail_curve(samples, t_grid=None, t_min: float = 0.5) -> EmpiricalCurve:
    """``-log`` of the empirical survival function on ``t >= t_min``.

    Grid points with no exceedances are dropped and counted in the metadata.
    """
    x = np.sort(np.asarray(samples, dtype=np.float64))
    if x.size == 0:
        raise InvalidDimensionError("tail_curve needs samples")
    if t_grid is None:
        top = max(float(x[-1]), t_min)
        t_grid = np.linspace(t_min, top, 200)
    t = np.asarray(t_grid, dtype=np.float64)
    if t.size > 1 and np.any(np.diff(t) <= 0):
        raise ValueError("t_grid must be strictly ascending")
    t = t[t >= t_min]
    exceed = x.size - np.searchsorted(x, t, side="right")
    keep = exceed > 0
    vals = -np.log(exceed[keep] / x.size)
    meta = {"t_min": t_min, "samples": int(x.size), "censored_points": int(np.count_nonzero(~keep))}
    if not np.all(keep):
        meta["note"] = "grid points with zero exceedances removed"
    return EmpiricalCurve(t[keep], vals, "neg_log_tail", meta)


def tail_slope(samples, lo: float = 0.5, hi: float = 3.0, points: int = 51) -> float:
    curve = tail_curve(samples, np.linspace(lo, hi, points), t_min=lo)
    if curve.grid.size < 2:
        return math.nan
    return float(np.polyfit(curve.grid, curve.values, 1)[0])


def exp1_gof(samples):
    """``(KS distance to Exp(1), sample mean, tail slope on [0.5, 3])``."""
    x = np.asarray(samples, dtype=np.float64)
    if x.size < 100:
        raise InvalidDimensionError("goodness of fit needs at least 100 samples")
    ks = float(stats.kstest(x, "expon").statistic)
    return ks, float(np.mean(x)), tail_slope(x)


def truncated_log_variance(samples, M: float = math.e**3) -> float:
    x = np.clip(np.asarray(samples, dtype=np.float64), 1.0 / M, M)
    return float(np.var(np.log(x), ddof=1))


def two_sample_ks(a, b) -> float:
    return float(stats.ks_2samp(a, b).statistic)


# ---- output writers ----------------------------------------------------


def _header(fh, echo: dict) -> None:
    fh.write("# config " + json.dumps(echo, sort_keys=True) + "\n")


def write_records_csv(results: TrialResults, path) -> None:
    with open(path, "w", newline="") as fh:
        _header(fh, results.config.echo())
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["trial", "seed", "observable_j", "observable_l", "scaled_value"])
        for r in results.records:
            w.writerow([r.trial, r.seed, r.j, r.l, repr(r.scaled_value)])


def write_records_jsonl(results: TrialResults, path) -> None:
    with open(path, "w") as fh:
        fh.write(json.dumps({"config": results.config.echo()}, sort_keys=True) + "\n")
        for r in results.records:
            fh.write(json.dumps(r.to_dict(), sort_keys=True) + "\n")


def write_curve_csv(curve: EmpiricalCurve, path, echo: dict) -> None:
    with open(path, "w", newline="") as fh:
        _header(fh, echo)
        fh.write("# curve " + json.dumps({"kind": curve.kind, **curve.meta}, sort_keys=True) + "\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["grid", "value"])
        for g, v in zip(curve.grid.tolist(), curve.values.tolist()):
            w.writerow([repr(g), repr(v)])


def write_plot_script(path, panels: Sequence[Tuple[str, str, str]], echo: dict) -> None:
    """Gnuplot script with one density and one tail panel per observable.

    ``panels`` holds ``(label, kde_csv, tail_csv)`` with paths relative to
    the script. The Exp(1) density and the line ``t`` are drawn for reference.
    """
    lines = [
        "# config " + json.dumps(echo, sort_keys=True),
        "set datafile separator ','",
        "set datafile commentschars '#'",
        "set key top right",
        f"set terminal pngcairo size 900,{360 * max(1, len(panels))}",
        "set output 'panels.png'",
        f"set multiplot layout {max(1, len(panels))},2",
    ]
    for label, kde_csv, tail_csv in panels:
        lines += [
            f"set title 'density of {label}'",
            "set xrange [0:*]",
            f"plot '{kde_csv}' every ::1 using 1:2 with lines title 'kde', exp(-x) with lines dashtype 2 title 'Exp(1)'",
            f"set title '-log P(X > t) for {label}'",
            "set xrange [0.5:*]",
            f"plot '{tail_csv}' every ::1 using 1:2 with lines title 'empirical', x with lines dashtype 2 title 'Exp(1)'",
        ]
    lines.append("unset multiplot")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def summarize(results: TrialResults) -> dict:
    """Counts, moments and fit statistics per observable; no timing or host data."""
    cfg = results.config
    sp = cfg.spike
    obs = {}
    for (j, l), x in results.by_observable().items():
        entry: dict = {"count": int(x.size), "scale": "N" if l > sp.k else "N^(1/3)"}
        if x.size:
            entry["mean"] = float(np.mean(x))
        if x.size >= 2:
            entry["var"] = float(np.var(x, ddof=1))
            entry["kde_bandwidth"] = kde(x).meta["bandwidth"]
        if x.size >= 100:
            ks, mean, slope = exp1_gof(x)
            entry.update({"ks_exp1": ks, "tail_slope": slope})
            if l <= sp.k:
                entry["truncated_log_var"] = truncated_log_variance(x)
        if l == 1 and x.size:
            recs = [r for r in results.records if r.j == j and r.l == 1 and len(r.xi_truncations) >= 2]
            if recs:
                gaps = [abs(math.log(r.xi_truncations[-2]) - math.log(r.xi_truncations[-1])) for r in recs]
                entry["xi_log_gap_median"] = float(np.median(gaps))
        obs[f"{j}:{l}"] = entry
    return {
        "config": cfg.echo(),
        "trials": cfg.trials,
        "failures": len(results.failures),
        "failed_trials": [[t, s, e] for t, s, e in results.failures],
        "observables": obs,
    }


def write_summary_json(summary: dict, path) -> None:
    with open(path, "w") as fh:
        json.dump(summary, fh, sort_keys=True, indent=2)
        fh.write("\n")
