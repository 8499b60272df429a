import itertools

import numpy as np
import pytest

from asynclife.percolation import (
    PORE_DRAW,
    PercolationConfig,
    percolate_once,
    success_curve,
)
from asynclife.rng import RngStream


def _oracle_reaches_bottom(pores: np.ndarray, wrap: bool) -> bool:
    """Independent reachability search over the directed pore lattice."""
    n, m = pores.shape
    wet = {(0, j) for j in range(m) if pores[0, j]}
    frontier = list(wet)
    while frontier:
        i, j = frontier.pop()
        if i + 1 >= n:
            continue
        for dj in (0, 1):
            nj = j + dj
            if nj >= m:
                if not wrap:
                    continue
                nj -= m
            if pores[i + 1, nj] and (i + 1, nj) not in wet:
                wet.add((i + 1, nj))
                frontier.append((i + 1, nj))
    return any((n - 1, j) in wet for j in range(m))


# --- percolate_once --------------------------------------------------------

def test_full_porosity_percolates():
    assert percolate_once(20, 1.0, RngStream(1).child(0))


def test_zero_porosity_blocks():
    assert not percolate_once(20, 0.0, RngStream(1).child(0))


def test_invalid_porosity():
    with pytest.raises(ValueError):
        percolate_once(10, 1.2, RngStream(0))


def test_wetting_equals_reachability_on_random_instances():
    rng = np.random.default_rng(13)
    for k in range(1000):
        n = int(rng.integers(2, 7))
        m_cols = n
        wrap = bool(rng.integers(2))
        porosity = float(rng.random())
        stream = RngStream(500).child(k)
        pores = stream.child(PORE_DRAW).uniforms((n, m_cols)) < porosity
        assert percolate_once(n, porosity, stream, wrap) == \
            _oracle_reaches_bottom(pores, wrap)


def test_two_by_two_success_probability_matches_enumeration():
    # Exact success probability by enumerating all 16 pore masks.
    for wrap in (True, False):
        p = 0.55
        exact = 0.0
        for bits in itertools.product((0, 1), repeat=4):
            pores = np.array(bits, dtype=bool).reshape(2, 2)
            if _oracle_reaches_bottom(pores, wrap):
                k = sum(bits)
                exact += p ** k * (1 - p) ** (4 - k)
        trials = 4000
        hits = sum(percolate_once(2, p, RngStream(9).child(t), wrap)
                   for t in range(trials))
        rate = hits / trials
        se = np.sqrt(exact * (1 - exact) / trials)
        assert abs(rate - exact) <= 3 * se


def test_coupled_sampling_is_exactly_monotone():
    porosities = [0.1, 0.3, 0.5, 0.65, 0.7, 0.9]
    for trial in range(50):
        stream = RngStream(31).child(trial)
        outcomes = [percolate_once(12, p, stream) for p in porosities]
        assert outcomes == sorted(outcomes)


# --- success_curve ---------------------------------------------------------

def test_curve_matches_percolate_once():
    config = PercolationConfig(side=12, porosities=(0.3, 0.6, 0.8), trials=20)
    result = success_curve(config, master_seed=77)
    for ip, porosity in enumerate(config.porosities):
        direct = sum(percolate_once(12, porosity, RngStream(77).child(t))
                     for t in range(config.trials))
        assert result.success_counts[ip] == direct


def test_curve_saturated_high():
    config = PercolationConfig(side=10, porosities=(1.0,), trials=5)
    result = success_curve(config, master_seed=1)
    assert result.success_rates == (1.0,)
    assert result.estimated_threshold is None and result.fit is None


def test_curve_saturated_low():
    config = PercolationConfig(side=10, porosities=(0.0, 0.01), trials=5)
    result = success_curve(config, master_seed=1)
    assert result.success_rates == (0.0, 0.0)
    assert result.estimated_threshold is None


def test_curve_threads_identical():
    config = PercolationConfig(side=16, porosities=(0.5, 0.65, 0.8), trials=12)
    a = success_curve(config, master_seed=3, threads=1)
    b = success_curve(config, master_seed=3, threads=3)
    assert a == b


def test_moderate_threshold_estimate():
    config = PercolationConfig(side=100, trials=40)
    result = success_curve(config, master_seed=11)
    assert result.estimated_threshold is not None
    assert 0.60 <= result.estimated_threshold <= 0.75
    rates = np.array(result.success_rates)
    assert rates[0] == 0.0 and rates[-1] == 1.0


def test_config_validation():
    with pytest.raises(ValueError):
        PercolationConfig(side=1)
    with pytest.raises(ValueError):
        PercolationConfig(trials=0)
    with pytest.raises(ValueError):
        PercolationConfig(porosities=(1.2,))
    with pytest.raises(ValueError):
        PercolationConfig(porosities=())
