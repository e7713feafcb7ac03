"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_accel.py [--repeat 5] [--json out.json]

Sizes follow real call sites: a 64x64 node Cauchy sum per kernel quadrature
pass, a 512-point log-gap sum per identity evaluation, step tails for a
256-level measure on an 8-point grid, and a KDE of 6000 samples.
"""
import argparse
import json
import sys
import timeit

import numpy as np

from spikedgue import accel


def cases(rng):
    u = rng.normal(size=128) + 1j * rng.normal(size=128) + 4
    v = rng.normal(size=128) + 1j * rng.normal(size=128) - 4
    fu = rng.normal(size=128) + 0j
    gv = rng.normal(size=128) + 0j
    lam = np.sort(rng.normal(size=512))[::-1].copy()
    num = lam[1:] + 1e-3
    s = np.sort(rng.normal(size=511))[::-1]
    lefts, rights = s[1::2].copy(), s[:-1:2].copy()
    xs = np.linspace(-2, 2, 8)
    samples = rng.exponential(size=6000)
    grid = np.linspace(-0.5, 9.0, 2048)
    return {
        "cauchy_sum[128x128]": lambda m: m.cauchy_sum(fu, u, gv, v),
        "log_ratio_sum[512]": lambda m: m.log_ratio_sum(lam[0] + 0.5, num, lam, 0),
        "step_tail[255x8]": lambda m: m.step_tail(lefts, rights, xs),
        "gaussian_kde_grid[6000x2048]": lambda m: m.gaussian_kde_grid(samples, grid, 0.1),
    }


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--json")
    args = p.parse_args(argv)

    mods = accel.backends()
    if "cython" not in mods:
        print("compiled extension not built; only the fallback can be timed", file=sys.stderr)
    rows = []
    for name, fn in cases(np.random.default_rng(0)).items():
        row = {"case": name}
        for label, mod in sorted(mods.items()):
            timer = timeit.Timer(lambda: fn(mod))
            number, _ = timer.autorange()
            best = min(timer.repeat(repeat=args.repeat, number=number)) / number
            row[label] = best
        if "cython" in row:
            row["speedup"] = row["python"] / row["cython"]
        rows.append(row)

    print(f"{'case':32s} {'python':>12s} {'cython':>12s} {'speedup':>8s}")
    for r in rows:
        cy = f"{r['cython'] * 1e6:10.1f}us" if "cython" in r else f"{'-':>12s}"
        sp = f"{r['speedup']:7.1f}x" if "speedup" in r else f"{'-':>8s}"
        print(f"{r['case']:32s} {r['python'] * 1e6:10.1f}us {cy} {sp}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)
    return 0


if __name__ == "__main__":
    sys.exit(main())
