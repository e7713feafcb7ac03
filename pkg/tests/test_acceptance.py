"""Acceptance criteria, each at its stated tolerance.

Every test records one PASS/FAIL line (shown again in the terminal summary).
Monte Carlo seeds are fixed in advance; nothing here is tuned to a seed.
"""
import hashlib
import math
import time

import numpy as np
import pytest

from spikedgue.airy import airy_kernel_closed
from spikedgue.harness import ExperimentConfig, exp1_gof, run_trials, summarize, truncated_log_variance, write_summary_json
from spikedgue.identity import component_sq_matrix, log_xi_truncated
from spikedgue.kernels import KernelParams, extended_airy_kernel, scaled_gue_kernel
from spikedgue.linalg import SpikeConfig, eigh, eigh_top, spiked_gue
from spikedgue.measure import e_n_closed, edge_x, mc_measure_moments, v_n_closed
from spikedgue.parallel import default_workers, trial_seed
from spikedgue.spectra import ScaledEdge, build_minor_chain, edge_scale

pytestmark = pytest.mark.acceptance

SEED = 20240611
EDGE_XI = (-3.0, -5.0, -8.0)


@pytest.fixture(scope="module")
def workers():
    return default_workers()


@pytest.fixture(scope="module")
def measure_rows(workers):
    N = 256
    xs = [0.0] + [float(edge_x(N, xi)) for xi in EDGE_XI]
    return N, mc_measure_moments(SpikeConfig(N, 1, (0.0,)), xs, 5000, SEED, workers)


def test_c01_eigenvector_eigenvalue_identity(verdict):
    start = time.perf_counter()
    cfg = SpikeConfig(8, 2, (-1.0, 0.0))
    worst = 0.0
    for t in range(50):
        m = spiked_gue(cfg, trial_seed(SEED, t))
        direct = np.abs(eigh(m).vectors.T) ** 2
        worst = max(worst, float(np.max(np.abs(component_sq_matrix(m) - direct))))
    took = time.perf_counter() - start
    verdict("C1 identity", worst <= 1e-10 and took < 5, f"max_abs_err={worst:.2e} runtime={took:.2f}s")


def test_c02_interlacing(verdict):
    start = time.perf_counter()
    violations = chains = 0
    for N in (32, 128):
        cfg = SpikeConfig(N, 2, (-1.0, 0.0))
        for t in range(100):
            chain = build_minor_chain(spiked_gue(cfg, trial_seed(SEED + N, t)), cfg.k + 1)
            chains += 1
            violations += not chain.strictly_interlaced
    took = time.perf_counter() - start
    verdict("C2 interlacing", violations == 0 and took < 30, f"chains={chains} violations={violations} runtime={took:.2f}s")


def test_c03_exp1_limit(verdict, workers):
    cfg = ExperimentConfig(SpikeConfig(512, 2, (-1.0, 0.0)), 2000, SEED, [(1, 3)])
    ks, mean, slope = exp1_gof(run_trials(cfg, workers).samples(1, 3))
    ok = abs(mean - 1) <= 0.15 and ks <= 0.08 and abs(slope - 1) <= 0.15
    verdict("C3 exp1 limit", ok, f"mean={mean:.4f} ks={ks:.4f} tail_slope={slope:.4f}")


def test_c04_kernel_reduction(verdict):
    start = time.perf_counter()
    grid = [-2.0, -1.0, 0.0, 1.0, 2.0]
    worst = max(
        abs(extended_airy_kernel(x, y, KernelParams(m1=0, m2=0)).value - airy_kernel_closed(x, y).value)
        for x in grid
        for y in grid
    )
    took = time.perf_counter() - start
    verdict("C4 kernel reduction", worst <= 1e-8 and took < 10, f"max_abs_err={worst:.2e} runtime={took:.2f}s")


def test_c05_finite_n_convergence(verdict):
    start = time.perf_counter()
    ref = extended_airy_kernel(0, 0, KernelParams(m1=1, m2=1, a=(0.0,))).value
    errs = [abs(scaled_gue_kernel(N, 0, 0, 0, 0, (0.0,)).value - ref) for N in (20, 40, 80)]
    took = time.perf_counter() - start
    ok = errs[0] >= errs[1] >= errs[2] and errs[2] <= 0.05 and took < 60
    verdict("C5 kernel convergence", ok, "errors(20,40,80)=" + ",".join(f"{e:.4f}" for e in errs) + f" runtime={took:.2f}s")


def test_c06_bulk_moments(verdict, measure_rows):
    N, rows = measure_rows
    r = rows[0]
    e, v = e_n_closed(N, 0.0), v_n_closed(N, 0.0)
    rel = abs(r.mean_mc / e - 1)
    ok = rel <= 0.03 and abs(r.var_mc - v) <= 0.15
    verdict("C6 bulk moments", ok, f"mean={r.mean_mc:.4f} E={e:.4f} rel={rel:.4f} var={r.var_mc:.4f} V={v:.4f}")


def test_c07_edge_variance_trend(verdict, measure_rows):
    N, rows = measure_rows
    ratios = [r.edge_variance_ratio(N) for r in rows[1:]]
    dev = [abs(q - 1) for q in ratios]
    in_band = all(0.6 <= q <= 1.4 for q in ratios)
    not_growing = all(dev[i + 1] <= dev[i] for i in range(len(dev) - 1))
    detail = " ".join(f"xi={xi:g}:ratio={q:.3f}" for xi, q in zip(EDGE_XI, ratios))
    verdict("C7 edge variance trend", in_band and not_growing, f"{detail} in_band={in_band} non_growing={not_growing}")


def test_c08_truncation_stability(verdict):
    N = 512
    cfg = SpikeConfig(N, 2, (-1.0, 0.0))
    gaps = []
    worst_rel = 0.0
    for t in range(200):
        m = spiked_gue(cfg, trial_seed(SEED, t))
        chain = build_minor_chain(m, 2)
        xi = ScaledEdge(edge_scale(chain.levels[0], N))
        eta = ScaledEdge(edge_scale(chain.levels[1], N))
        a = log_xi_truncated(xi, eta, 1, N // 4)
        b = log_xi_truncated(xi, eta, 1, N // 2)
        gaps.append(abs(a - b))
        full = math.exp(log_xi_truncated(xi, eta, 1, N))
        direct = N ** (1 / 3) * abs(eigh_top(m, 1).vectors[0, 0]) ** 2
        worst_rel = max(worst_rel, abs(full / direct - 1))
    med = float(np.median(gaps))
    verdict("C8 truncation stability", med <= 0.2 and worst_rel <= 1e-9, f"median_gap={med:.4f} full_truncation_rel_err={worst_rel:.2e}")


def test_c09_nondegenerate(verdict, workers):
    cfg = ExperimentConfig(SpikeConfig(400, 2, (-1.0, 0.0)), 2000, SEED, [(1, 1)])
    tlv = truncated_log_variance(run_trials(cfg, workers).samples(1, 1))
    verdict("C9 nondegeneracy", tlv >= 0.01, f"truncated_log_var={tlv:.4f}")


def test_c10_reproducibility(verdict, tmp_path):
    cfg = ExperimentConfig(SpikeConfig(96, 2, (-1.0, 0.0)), 300, SEED, [(1, 1), (1, 2), (1, 3)], method="both")
    digests = []
    for run, w in enumerate((1, 2, 1)):
        path = tmp_path / f"summary{run}.json"
        write_summary_json(summarize(run_trials(cfg, w)), path)
        digests.append(hashlib.sha256(path.read_bytes()).hexdigest())
    verdict("C10 reproducibility", len(set(digests)) == 1, f"digests={[d[:12] for d in digests]}")
