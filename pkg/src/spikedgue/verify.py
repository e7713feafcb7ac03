"""Self-check suites run by ``spikedgue verify``.

Each suite returns a :class:`SuiteResult`; the report is deterministic for a
given seed and mode.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Callable, List

import numpy as np

from spikedgue.airy import airy_kernel_closed
from spikedgue.identity import component_sq_matrix
from spikedgue.kernels import KernelParams, extended_airy_kernel, scaled_gue_kernel
from spikedgue.linalg import SpikeConfig, eigh, spiked_gue
from spikedgue.parallel import trial_seed
from spikedgue.spectra import build_minor_chain, semicircle_quantile


@dataclass
class SuiteResult:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)


def identity_suite(seed: int, count: int) -> SuiteResult:
    cfg = SpikeConfig(8, 2, (-1.0, 0.5))
    worst = 0.0
    for t in range(count):
        m = spiked_gue(cfg, trial_seed(seed, t))
        direct = np.abs(eigh(m).vectors.T) ** 2
        worst = max(worst, float(np.max(np.abs(component_sq_matrix(m) - direct))))
    return SuiteResult("identity_equivalence", worst <= 1e-10, {"matrices": count, "max_abs_error": worst})


def interlacing_suite(seed: int, count: int) -> SuiteResult:
    bad = 0
    total = 0
    for N in (32, 128):
        cfg = SpikeConfig(N, 2, (-1.0, 0.0))
        for t in range(count):
            chain = build_minor_chain(spiked_gue(cfg, trial_seed(seed + N, t)), cfg.k + 1)
            total += 1
            bad += 0 if chain.strictly_interlaced else 1
    return SuiteResult("interlacing", bad == 0, {"chains": total, "violations": bad})


def kernel_reduction_suite() -> SuiteResult:
    grid = [-2.0, -1.0, 0.0, 1.0, 2.0]
    worst = 0.0
    for x in grid:
        for y in grid:
            v = extended_airy_kernel(x, y, KernelParams()).value
            worst = max(worst, abs(v - airy_kernel_closed(x, y).value))
    return SuiteResult("kernel_reduction", worst <= 1e-8, {"points": len(grid) ** 2, "max_abs_error": worst})


def quantile_symmetry_suite() -> SuiteResult:
    worst = 0.0
    monotone = True
    for N in (7, 64, 255):
        u = np.atleast_1d(semicircle_quantile(N, np.arange(1, N + 1)))
        worst = max(worst, float(np.max(np.abs(u + u[::-1]))))
        monotone &= bool(np.all(np.diff(u) < 0))
    return SuiteResult("quantile_symmetry", worst <= 1e-9 and monotone, {"max_asymmetry": worst, "monotone": monotone})


def kernel_convergence_suite() -> SuiteResult:
    ref = extended_airy_kernel(0.0, 0.0, KernelParams(m1=1, m2=1, a=(0.0,))).value
    errs = [abs(scaled_gue_kernel(N, 0, 0, 0.0, 0.0, (0.0,)).value - ref) for N in (20, 40, 80)]
    ok = errs[0] >= errs[1] >= errs[2] and errs[2] <= 0.05
    return SuiteResult("kernel_convergence", ok, {"N": [20, 40, 80], "abs_error": errs, "limit": ref})


def run_suites(quick: bool = True, seed: int = 0) -> List[SuiteResult]:
    count = 10 if quick else 50
    chains = 20 if quick else 100
    suites: List[Callable[[], SuiteResult]] = [
        lambda: identity_suite(seed, count),
        lambda: interlacing_suite(seed, chains),
        kernel_reduction_suite,
        quantile_symmetry_suite,
    ]
    if not quick:
        suites.append(kernel_convergence_suite)
    return [s() for s in suites]


def report_json(results: List[SuiteResult], quick: bool, seed: int) -> str:
    return json.dumps(
        {"mode": "quick" if quick else "full", "seed": seed, "suites": [asdict(r) for r in results]},
        sort_keys=True,
        indent=2,
    )
