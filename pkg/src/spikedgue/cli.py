"""Command line entry point: ``spikedgue {simulate,kernel,measure,verify}``.

Every subcommand accepts ``--config FILE`` (TOML or JSON). Values given on
the command line override the file, which overrides built-in defaults. The
file may hold flat keys or a table named after the subcommand; keys use the
long flag names with dashes or underscores.

Exit status: 0 on success, 1 on a runtime or verification failure, 2 on a
usage error.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np

from spikedgue import __version__
from spikedgue.errors import DistinctSpikesError, SpikedGUEError

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

PROFILES = {
    "desk": {"n": 400, "trials": 2000},
    "full": {"n": 1000, "trials": 6000},
}

DEFAULTS: Dict[str, dict] = {
    "simulate": {
        "profile": "desk",
        "n": None,
        "k": 2,
        "a": "-1,0",
        "trials": None,
        "seed": 0,
        "out_dir": "spikedgue-out",
        "observables": None,
        "workers": None,
        "method": "direct",
    },
    "kernel": {
        "m1": 0,
        "m2": 0,
        "a": "",
        "grid": "-2:2:5",
        "finite_n": None,
        "quad_points": None,
        "out": None,
    },
    "measure": {
        "n": 256,
        "k": 1,
        "a": "0",
        "trials": 5000,
        "seed": 0,
        "x_grid": "bulk,edge",
        "no_mc": False,
        "workers": None,
        "out": None,
    },
    "verify": {"quick": False, "seed": 0, "report": "verify-report.json"},
}

# flags whose values may start with '-' (negative numbers in lists)
_LIST_FLAGS = {"--a", "--grid", "--x-grid", "--observables"}


class UsageError(Exception):
    pass


def _glue(argv: Sequence[str]) -> List[str]:
    out = []
    it = iter(argv)
    for tok in it:
        if tok in _LIST_FLAGS:
            nxt = next(it, None)
            if nxt is None:
                out.append(tok)
            else:
                out.append(f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="spikedgue", description="Spiked GUE eigenvector experiments and kernel numerics.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="Monte Carlo eigenvector experiment")
    s.add_argument("--config")
    s.add_argument("--profile", choices=sorted(PROFILES), help="default sizes: desk (N=400, 2000 trials) or full (N=1000, 6000 trials)")
    s.add_argument("--n", type=int)
    s.add_argument("--k", type=int)
    s.add_argument("--a", help="comma-separated offsets, empty string for k=0")
    s.add_argument("--trials", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--out-dir")
    s.add_argument("--observables", help="j:l pairs, e.g. 1:1,1:3")
    s.add_argument("--workers", type=int)
    s.add_argument("--method", choices=["direct", "identity", "both"])

    k = sub.add_parser("kernel", help="evaluate a correlation kernel on a grid")
    k.add_argument("--config")
    k.add_argument("--m1", type=int)
    k.add_argument("--m2", type=int)
    k.add_argument("--a")
    k.add_argument("--grid", help="xmin:xmax:steps, used for both arguments")
    k.add_argument("--finite-n", type=int, help="evaluate the scaled finite-N kernel instead")
    k.add_argument("--quad-points", type=int)
    k.add_argument("--out", help="CSV path (default stdout)")

    m = sub.add_parser("measure", help="moments of the interval measure")
    m.add_argument("--config")
    m.add_argument("--n", type=int)
    m.add_argument("--k", type=int)
    m.add_argument("--a")
    m.add_argument("--trials", type=int)
    m.add_argument("--seed", type=int)
    m.add_argument("--x-grid", help="comma list of points and/or the words bulk, edge")
    m.add_argument("--no-mc", action="store_const", const=True, default=None)
    m.add_argument("--workers", type=int)
    m.add_argument("--out", help="CSV path (default stdout)")

    v = sub.add_parser("verify", help="run the self-check suites")
    v.add_argument("--config")
    v.add_argument("--quick", action="store_const", const=True, default=None)
    v.add_argument("--seed", type=int)
    v.add_argument("--report", help="JSON report path")
    return p


def _load_config(path: Optional[str], command: str) -> dict:
    if not path:
        return {}
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}") from exc
    try:
        if path.endswith(".json"):
            data = json.loads(raw)
        else:
            data = tomllib.loads(raw.decode())
    except (ValueError, tomllib.TOMLDecodeError) as exc:
        raise UsageError(f"cannot parse config file {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError("config file must hold a table of keys")
    if command in data and isinstance(data[command], dict):
        data = data[command]
    data = {str(key).replace("-", "_"): val for key, val in data.items()}
    unknown = sorted(set(data) - set(DEFAULTS[command]))
    if unknown:
        raise UsageError(f"unknown config keys for {command}: {', '.join(unknown)}")
    return data


def _merge(command: str, ns: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS[command])
    filed = _load_config(ns.config, command)
    cfg.update(filed)
    for key in DEFAULTS[command]:
        val = getattr(ns, key, None)
        if val is not None:
            cfg[key] = val
    if command == "simulate":
        prof = cfg["profile"]
        if prof not in PROFILES:
            raise UsageError(f"unknown profile {prof!r}")
        for key, val in PROFILES[prof].items():
            if cfg[key] is None:
                cfg[key] = val
    if "workers" in cfg and cfg["workers"] is None:
        try:
            from spikedgue.parallel import default_workers

            cfg["workers"] = default_workers()
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    return cfg


def _floats(text, name: str) -> List[float]:
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    text = str(text).strip()
    if text == "":
        return []
    try:
        return [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"--{name}: expected comma-separated numbers, got {text!r}") from exc


def _spike(cfg: dict):
    from spikedgue.linalg import SpikeConfig

    a = _floats(cfg["a"], "a")
    n, k = int(cfg["n"]), int(cfg["k"])
    if n < 1:
        raise UsageError("--n must be >= 1")
    if k < 0 or k > n:
        raise UsageError("--k must satisfy 0 <= k <= n")
    if len(a) != k:
        raise UsageError(f"--a has {len(a)} values but --k is {k}")
    if len(set(a)) != len(a):
        raise UsageError("distinct-spikes required: --a has repeated values")
    return SpikeConfig(n, k, tuple(a))


def _positive(cfg: dict, key: str) -> int:
    v = int(cfg[key])
    if v < 1:
        raise UsageError(f"--{key.replace('_', '-')} must be >= 1")
    return v


def _echo_lines(command: str, cfg: dict) -> List[str]:
    return [f"spikedgue {__version__} {command}", "config " + json.dumps(cfg, sort_keys=True)]


def _observables(text, N: int, k: int):
    from spikedgue.identity import ComponentQuery

    if text is None:
        pairs = [(1, l) for l in range(1, min(k + 1, N) + 1)]
        return tuple(ComponentQuery(j, l) for j, l in pairs)
    items = text if isinstance(text, list) else str(text).split(",")
    out = []
    for it in items:
        try:
            j, l = (int(v) for v in str(it).split(":"))
        except ValueError as exc:
            raise UsageError(f"--observables: bad pair {it!r}, expected j:l") from exc
        if not (1 <= j <= N and 1 <= l <= N):
            raise UsageError(f"--observables: pair {it} out of range for N={N}")
        out.append(ComponentQuery(j, l))
    if not out:
        raise UsageError("--observables is empty")
    return tuple(out)


def cmd_simulate(cfg: dict) -> int:
    from spikedgue import harness

    spike = _spike(cfg)
    trials = _positive(cfg, "trials")
    workers = _positive(cfg, "workers")
    seed = int(cfg["seed"])
    if not 0 <= seed < 2**64:
        raise UsageError("--seed must be a 64-bit unsigned integer")
    obs = _observables(cfg["observables"], spike.N, spike.k)
    exp = harness.ExperimentConfig(spike, trials, seed, obs, method=cfg["method"])
    out = Path(cfg["out_dir"])
    out.mkdir(parents=True, exist_ok=True)

    res = harness.run_trials(exp, workers=workers)
    echo = {"command": "simulate", **exp.echo()}
    harness.write_records_csv(res, out / "records.csv")
    harness.write_records_jsonl(res, out / "records.jsonl")
    panels = []
    for (j, l), x in res.by_observable().items():
        if x.size >= 2:
            kname, tname = f"kde_{j}_{l}.csv", f"tail_{j}_{l}.csv"
            harness.write_curve_csv(harness.kde(x), out / kname, echo)
            harness.write_curve_csv(harness.tail_curve(x), out / tname, echo)
            panels.append((f"{j}:{l}", kname, tname))
    harness.write_plot_script(out / "panels.gp", panels, echo)
    summary = harness.summarize(res)
    summary["config"] = echo
    harness.write_summary_json(summary, out / "summary.json")
    print(f"wrote {len(res.records)} records from {trials - len(res.failures)} trials to {out}")
    return EXIT_OK


def _parse_grid(text: str) -> np.ndarray:
    parts = str(text).split(":")
    if len(parts) != 3:
        raise UsageError(f"--grid must be xmin:xmax:steps, got {text!r}")
    try:
        lo, hi, steps = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise UsageError(f"--grid: cannot parse {text!r}") from exc
    if steps < 1 or not (math.isfinite(lo) and math.isfinite(hi)) or hi < lo:
        raise UsageError("--grid is empty")
    return np.linspace(lo, hi, steps)


def _open_out(path: Optional[str]):
    if path:
        return open(path, "w", newline="")
    return sys.stdout


def cmd_kernel(cfg: dict) -> int:
    from spikedgue.kernels import KernelParams, check_distinct, extended_airy_kernel, scaled_gue_kernel

    a = tuple(_floats(cfg["a"], "a"))
    try:
        check_distinct(a)
    except DistinctSpikesError as exc:
        raise UsageError(str(exc)) from exc
    m1, m2 = int(cfg["m1"]), int(cfg["m2"])
    if m1 < 0 or m2 < 0 or max(m1, m2) > len(a):
        raise UsageError(f"--m1/--m2 must lie in [0, {len(a)}] (number of offsets)")
    grid = _parse_grid(cfg["grid"])
    fin = cfg["finite_n"]
    qp = cfg["quad_points"]
    if qp is not None and int(qp) < 16:
        raise UsageError("--quad-points must be >= 16")
    if fin is not None:
        fin = int(fin)
        if fin < len(a) + 1:
            raise UsageError("--finite-n must exceed the number of offsets")
        params = KernelParams(quad_points=int(qp or 96))
        k = len(a)

        def ev(x, y):
            return scaled_gue_kernel(fin, k - m1, k - m2, x, y, a, params)

    else:
        params = KernelParams(m1=m1, m2=m2, a=a, quad_points=int(qp or 64))

        def ev(x, y):
            return extended_airy_kernel(x, y, params)

    fh = _open_out(cfg["out"])
    try:
        for line in _echo_lines("kernel", cfg):
            fh.write(f"# {line}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "y", "value", "est_error"])
        for x in grid:
            for y in grid:
                kv = ev(float(x), float(y))
                w.writerow([repr(float(x)), repr(float(y)), repr(kv.value), repr(kv.est_error)])
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK


def _x_grid(text, N: int) -> np.ndarray:
    from spikedgue.measure import bulk_grid, edge_grid

    items = text if isinstance(text, list) else str(text).split(",")
    pts: List[float] = []
    for it in items:
        it = str(it).strip()
        if it == "bulk":
            pts.extend(bulk_grid(N).tolist())
        elif it == "edge":
            pts.extend(edge_grid(N).tolist())
        elif it:
            try:
                pts.append(float(it))
            except ValueError as exc:
                raise UsageError(f"--x-grid: cannot parse {it!r}") from exc
    if not pts:
        raise UsageError("--x-grid is empty")
    r = 2.0 * math.sqrt(N)
    if any(abs(p) > r for p in pts):
        raise UsageError(f"--x-grid points must lie in [-{r:g}, {r:g}]")
    return np.array(pts)


def cmd_measure(cfg: dict) -> int:
    from spikedgue import measure

    spike = _spike(cfg)
    xs = _x_grid(cfg["x_grid"], spike.N)
    no_mc = bool(cfg["no_mc"])
    if no_mc:
        rows = measure.closed_rows(spike, xs)
    else:
        trials = int(cfg["trials"])
        if trials < 100:
            raise UsageError("--trials must be >= 100")
        workers = _positive(cfg, "workers")
        rows = measure.mc_measure_moments(spike, xs, trials, int(cfg["seed"]), workers)
    echo = dict(cfg)
    echo.pop("workers", None)
    fh = _open_out(cfg["out"])
    try:
        measure.write_rows(rows, fh, _echo_lines("measure", echo), closed_only=no_mc)
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK


def cmd_verify(cfg: dict) -> int:
    from spikedgue import verify

    quick = bool(cfg["quick"])
    seed = int(cfg["seed"])
    results = verify.run_suites(quick=quick, seed=seed)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name}  {json.dumps(r.detail, sort_keys=True)}")
    Path(cfg["report"]).write_text(verify.report_json(results, quick, seed) + "\n")
    failed = [r.name for r in results if not r.passed]
    if failed:
        print("failed suites: " + ", ".join(failed))
        return EXIT_FAIL
    print(f"all {len(results)} suites passed")
    return EXIT_OK


COMMANDS = {"simulate": cmd_simulate, "kernel": cmd_kernel, "measure": cmd_measure, "verify": cmd_verify}


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _parser()
    try:
        ns = parser.parse_args(_glue(argv))
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _merge(ns.command, ns)
        return COMMANDS[ns.command](cfg)
    except UsageError as exc:
        print(f"spikedgue {ns.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SpikedGUEError, ArithmeticError, OSError, RuntimeError) as exc:
        print(f"spikedgue {ns.command}: failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
