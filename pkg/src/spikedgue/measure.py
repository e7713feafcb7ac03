"""Mean and variance of the interval measure M_N: closed forms, edge
asymptotics, and Monte Carlo estimates to compare them with."""
from __future__ import annotations

import csv
import math
from dataclasses import asdict, dataclass, fields
from functools import partial
from typing import Iterable, List, Optional, Sequence

import numpy as np

from spikedgue.errors import DomainError, InvalidDimensionError
from spikedgue.identity import build_step_measure, measure_tail
from spikedgue.linalg import SpikeConfig, eigvalsh, principal_minor, spiked_gue
from spikedgue.parallel import ordered_map, trial_seed

EDGE_WINDOW = 10.0
BULK_FRACTIONS = (-1.0, -0.5, 0.0, 0.5, 1.0)
EDGE_POINTS = (-3.0, -5.0, -8.0)


def _edge_arg(N: int, x):
    x = np.asarray(x, dtype=np.float64)
    r = 2.0 * math.sqrt(N)
    if np.any(np.abs(x) > r * (1.0 + 1e-14)):
        raise DomainError(f"x must lie in [-2 sqrt(N), 2 sqrt(N)] = [{-r}, {r}]")
    return x, r, np.clip(x / r, -1.0, 1.0)


def _out(v):
    return float(v) if np.ndim(v) == 0 else v


def e_n_closed(N: int, x):
    """Expected tail mass of M_N at x (leading order in N)."""
    x, r, c = _edge_arg(N, x)
    root = np.sqrt(np.clip(4.0 * N - x * x, 0.0, None))
    val = (-root + x * np.arccos(c)) / (2.0 * math.pi) + math.sqrt(N) - x / 2.0
    return _out(val)


def v_n_closed(N: int, x):
    """Variance of M_N at x (leading order in N)."""
    x, r, c = _edge_arg(N, x)
    val = (np.sqrt(np.clip(1.0 - c * c, 0.0, None)) + np.arccos(c)) / math.pi
    return _out(val)


def airy_asymptotics(xi: float):
    """Leading ``(mean, variance)`` of the limiting measure tail as xi -> -infinity."""
    xi = float(xi)
    if not xi < 0:
        raise DomainError(f"xi must be negative, got {xi}")
    return -xi / 2.0, 2.0 / math.pi * math.sqrt(-xi)


def edge_variance_predictions(xi: float, a_k: float) -> dict:
    """Both readings of the edge variance: with and without the constant ``a_k`` term."""
    _, var = airy_asymptotics(xi)
    return {"plain": var, "shifted": var + float(a_k)}


def edge_x(N: int, xi):
    return 2.0 * math.sqrt(N) + np.asarray(xi, dtype=np.float64) / N ** (1.0 / 6.0)


def edge_xi(N: int, x):
    return N ** (1.0 / 6.0) * (np.asarray(x, dtype=np.float64) - 2.0 * math.sqrt(N))


def bulk_grid(N: int) -> np.ndarray:
    return math.sqrt(N) * np.array(BULK_FRACTIONS)


def edge_grid(N: int) -> np.ndarray:
    return edge_x(N, EDGE_POINTS)


def regime(N: int, x: float) -> str:
    return "edge" if abs(float(edge_xi(N, x))) <= EDGE_WINDOW else "bulk"


@dataclass(frozen=True)
class MeasureMomentRow:
    x: float
    regime: str
    trials: int
    mean_mc: Optional[float]
    se_mean: Optional[float]
    var_mc: Optional[float]
    mean_closed: float
    var_closed: float
    z_mean: Optional[float]
    xi: float
    var_edge_plain: Optional[float] = None
    var_edge_shifted: Optional[float] = None

    def edge_variance_ratio(self, N: int) -> Optional[float]:
        """``N^(1/3) var_mc`` over the plain edge prediction."""
        if self.var_mc is None or self.var_edge_plain is None:
            return None
        return N ** (1.0 / 3.0) * self.var_mc / self.var_edge_plain


def _tail_trial(cfg: SpikeConfig, xs: np.ndarray, master_seed: int, t: int) -> np.ndarray:
    m = spiked_gue(cfg, trial_seed(master_seed, t))
    meas = build_step_measure(eigvalsh(m), eigvalsh(principal_minor(m, 1)))
    return measure_tail(meas, xs)


def measure_samples(cfg: SpikeConfig, x_grid, trials: int, master_seed: int, workers: int = 1) -> np.ndarray:
    """``trials x len(x_grid)`` array of M_N evaluated per trial."""
    xs = np.ascontiguousarray(x_grid, dtype=np.float64)
    fn = partial(_tail_trial, cfg, xs, int(master_seed))
    return np.array(ordered_map(fn, range(trials), workers)).reshape(trials, xs.size)


def closed_rows(cfg: SpikeConfig, x_grid) -> List[MeasureMomentRow]:
    return moment_rows(cfg, x_grid, None)


def moment_rows(cfg: SpikeConfig, x_grid, samples: Optional[np.ndarray]) -> List[MeasureMomentRow]:
    N = cfg.N
    a_k = cfg.a[-1] if cfg.k else 0.0
    rows = []
    for g, x in enumerate(np.asarray(x_grid, dtype=np.float64)):
        xi = float(edge_xi(N, x))
        tag = regime(N, x)
        plain = shifted = None
        if tag == "edge" and xi < 0:
            pred = edge_variance_predictions(xi, a_k)
            plain, shifted = pred["plain"], pred["shifted"]
        ec = e_n_closed(N, x)
        vc = v_n_closed(N, x)
        if samples is None:
            rows.append(MeasureMomentRow(float(x), tag, 0, None, None, None, ec, vc, None, xi, plain, shifted))
            continue
        col = samples[:, g]
        n = col.size
        mean = float(np.mean(col))
        var = float(np.var(col, ddof=1))
        se = math.sqrt(var / n)
        z = (mean - ec) / se if se > 0 else (0.0 if mean == ec else math.copysign(math.inf, mean - ec))
        rows.append(MeasureMomentRow(float(x), tag, n, mean, se, var, ec, vc, z, xi, plain, shifted))
    return rows


def mc_measure_moments(
    cfg: SpikeConfig,
    x_grid: Sequence[float],
    trials: int,
    master_seed: int,
    workers: int = 1,
) -> List[MeasureMomentRow]:
    if trials < 100:
        raise InvalidDimensionError(f"need at least 100 trials, got {trials}")
    samples = measure_samples(cfg, x_grid, trials, master_seed, workers)
    return moment_rows(cfg, x_grid, samples)


CSV_COLUMNS = [f.name for f in fields(MeasureMomentRow)]
CLOSED_COLUMNS = ["x", "regime", "xi", "mean_closed", "var_closed", "var_edge_plain", "var_edge_shifted"]


def write_rows(rows: Iterable[MeasureMomentRow], fh, header_lines=(), closed_only: bool = False) -> None:
    cols = CLOSED_COLUMNS if closed_only else CSV_COLUMNS
    for line in header_lines:
        fh.write(f"# {line}\n")
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        d = asdict(r)
        w.writerow(["" if d[c] is None else (repr(d[c]) if isinstance(d[c], float) else d[c]) for c in cols])


def write_rows_csv(rows: Iterable[MeasureMomentRow], path, header_lines=(), closed_only: bool = False) -> None:
    with open(path, "w", newline="") as fh:
        write_rows(rows, fh, header_lines, closed_only)
