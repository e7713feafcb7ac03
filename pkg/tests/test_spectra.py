import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, optimize

from spikedgue.errors import InterlacingError, InvalidDimensionError
from spikedgue.linalg import SpikeConfig, eigh_top, hermitian, spiked_gue
from spikedgue.spectra import (
    build_minor_chain,
    chain_from_levels,
    check_interlacing,
    rigidity_report,
    scaled_edge_coords,
    semicircle_quantile,
    semicircle_tail,
)


def rho_sc(x):
    return np.sqrt(np.clip(4 - x * x, 0, None)) / (2 * np.pi)


def test_diagonal_chain_is_degenerate():
    chain = build_minor_chain(hermitian(np.diag([3.0, 2.0, 1.0])), 2)
    assert chain.depth == 2
    assert np.allclose(chain.levels[0], [3, 2, 1])
    assert np.allclose(chain.levels[1], [2, 1])
    assert chain.degenerate
    assert not chain.strictly_interlaced


def test_sampled_chain_interlaces_strictly():
    m = spiked_gue(SpikeConfig(64, 1, (0.0,)), 5)
    chain = build_minor_chain(m, 2)
    assert chain.strictly_interlaced and not chain.degenerate
    assert [len(v) for v in chain.levels] == [64, 63]


def test_depth_one_has_no_checks():
    chain = build_minor_chain(spiked_gue(SpikeConfig(8, 0, ()), 1), 1)
    assert chain.depth == 1 and chain.reports == []


def test_chain_depth_bounds():
    m = spiked_gue(SpikeConfig(4, 0, ()), 1)
    with pytest.raises(InvalidDimensionError):
        build_minor_chain(m, 0)
    with pytest.raises(InvalidDimensionError):
        build_minor_chain(m, 5)


def test_violation_raises():
    with pytest.raises(InterlacingError):
        chain_from_levels([[3.0, 1.0], [3.5]])


@pytest.mark.parametrize("N", [32, 128])
def test_interlacing_many_chains(N):
    cfg = SpikeConfig(N, 2, (-1.0, 0.0))
    for t in range(25):
        chain = build_minor_chain(spiked_gue(cfg, 1000 * N + t), cfg.k + 1)
        assert chain.strictly_interlaced


def test_edge_coordinate_centering_and_unit():
    assert scaled_edge_coords([2 * np.sqrt(9.0)], 9, 1).coords[0] == pytest.approx(0.0, abs=1e-12)
    N = 10000
    c = scaled_edge_coords([2 * np.sqrt(N) + N ** (-1 / 6)], N, 1).coords[0]
    assert c == pytest.approx(1.0, abs=1e-10)


def test_edge_coordinate_bounds():
    with pytest.raises(InvalidDimensionError):
        scaled_edge_coords([1.0, 0.0], 4, 3)


@pytest.mark.slow
def test_top_edge_coordinate_is_tight():
    cfg = SpikeConfig(512, 1, (0.0,))
    inside = 0
    for t in range(1000):
        top = eigh_top(spiked_gue(cfg, t), 1).values
        inside += abs(scaled_edge_coords(top, 512, 1).coords[0]) <= 6
    assert inside >= 990


def test_quantile_middle_is_zero():
    for N in (1, 5, 101):
        assert semicircle_quantile(N, (N + 1) // 2) == pytest.approx(0.0, abs=1e-10)


def test_quantile_symmetry_and_monotone():
    N = 64
    u = semicircle_quantile(N, np.arange(1, N + 1))
    assert np.allclose(u, -u[::-1], atol=1e-9)
    assert np.all(np.diff(u) < 0)


def test_quantile_two_point_oracle():
    # descending convention: the top quantile carries mass (1 - 1/2)/2 above it
    f = lambda u: integrate.quad(rho_sc, u, 2, epsabs=1e-14)[0] - 0.25
    u = optimize.brentq(f, -2, 2, xtol=1e-14)
    assert semicircle_quantile(2, 1) == pytest.approx(u * np.sqrt(2), abs=1e-10)


def test_quantile_residual_and_total_mass():
    assert semicircle_tail(-2.0) == pytest.approx(1.0, abs=1e-12)
    assert integrate.quad(rho_sc, -2, 2, epsabs=1e-14)[0] == pytest.approx(1.0, abs=1e-12)
    N = 37
    i = np.arange(1, N + 1)
    u = semicircle_quantile(N, i) / np.sqrt(N)
    assert np.max(np.abs(semicircle_tail(u) - (i - 0.5) / N)) <= 1e-12


@settings(max_examples=50, deadline=None)
@given(N=st.integers(1, 400), data=st.data())
def test_quantile_properties(N, data):
    i = data.draw(st.integers(1, N))
    j = data.draw(st.integers(1, N))
    ui, uj = semicircle_quantile(N, i), semicircle_quantile(N, j)
    assert ui == pytest.approx(-semicircle_quantile(N, N + 1 - i), abs=1e-9)
    if i < j:
        assert ui > uj


def test_rigidity_exact_quantiles():
    N = 50
    rep = rigidity_report(semicircle_quantile(N, np.arange(1, N + 1)), 0.1, 0.1)
    assert rep.satisfied_fraction == 1.0


def test_rigidity_vacuous_bound():
    m = spiked_gue(SpikeConfig(64, 1, (0.0,)), 3)
    rep = rigidity_report(build_minor_chain(m, 1), epsilon=5.0, c=0.1)
    assert rep.satisfied_fraction == 1.0
    assert rep.checked == int(0.9 * 64)


def test_rigidity_report_json_fields():
    m = spiked_gue(SpikeConfig(64, 1, (0.0,)), 3)
    d = json.loads(rigidity_report(build_minor_chain(m, 1)).to_json())
    for key in ("N", "epsilon", "cut", "satisfied_fraction", "worst_index", "worst_deviation"):
        assert key in d
    assert d["edge_checked"] == 1


def test_rigidity_moderate_epsilon():
    m = spiked_gue(SpikeConfig(256, 1, (0.0,)), 2024)
    assert rigidity_report(build_minor_chain(m, 1), epsilon=0.3, c=0.1).satisfied_fraction >= 0.98


@pytest.mark.xfail(reason="at N=256 the eps=0.1 band is about one bulk standard deviation wide", strict=True)
def test_rigidity_small_epsilon_at_moderate_n():
    m = spiked_gue(SpikeConfig(256, 1, (0.0,)), 2024)
    assert rigidity_report(build_minor_chain(m, 1), epsilon=0.1, c=0.1).satisfied_fraction >= 0.99


def test_check_interlacing_reports_ties():
    rep = check_interlacing([2.0, 1.0], [1.0])
    assert rep.degenerate and rep.ties == 1 and rep.max_violation == 0.0
