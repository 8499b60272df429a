import numpy as np
import pytest

from asynclife.engine import BoundaryMode, Grid, RuleVariant, UpdateParams, place_pattern
from asynclife.patterns import BLINKER, GLIDER
from asynclife.phase import (
    DecayConfig,
    FrozenCriterion,
    SweepConfig,
    is_quiescent,
    measure_density_decay,
    run_until_frozen,
    sweep_frozen_probability,
)
from asynclife.rng import RngStream

PERIODIC = BoundaryMode.PERIODIC
FIXED = BoundaryMode.FIXED_ZERO
CONWAY = RuleVariant.CONWAY_B3S23


# --- is_quiescent ----------------------------------------------------------

def test_empty_grid_quiescent():
    assert is_quiescent(Grid.empty(6, 6))


def test_blinker_quiescent():
    g = place_pattern(Grid.empty(7, 7, FIXED), BLINKER, (3, 2))
    assert is_quiescent(g)


def test_glider_not_quiescent():
    g = place_pattern(Grid.empty(20, 20, PERIODIC), GLIDER, (8, 8))
    assert not is_quiescent(g)


def _oracle_life_step_3x3(state):
    """Independent synchronous step on a 3x3 fixed-zero grid (bitmask state)."""
    cells = [(state >> k) & 1 for k in range(9)]
    nxt = 0
    for i in range(3):
        for j in range(3):
            s = 0
            for di in (-1, 0, 1):
                for dj in (-1, 0, 1):
                    if di == dj == 0:
                        continue
                    r, c = i + di, j + dj
                    if 0 <= r < 3 and 0 <= c < 3:
                        s += cells[3 * r + c]
            a = cells[3 * i + j]
            if (a == 0 and s == 3) or (a == 1 and s in (2, 3)):
                nxt |= 1 << (3 * i + j)
    return nxt


def _oracle_on_short_cycle(state):
    """True iff the synchronous orbit returns to ``state`` within 2 steps."""
    current = state
    for k in range(1, 3):
        current = _oracle_life_step_3x3(current)
        if current == state:
            return True
    # Longer revisits would mean a cycle of length > 2 through ``state``.
    return False


def test_quiescence_matches_orbit_enumeration_on_all_3x3_grids():
    for state in range(1 << 9):
        cells = np.array([(state >> k) & 1 for k in range(9)],
                         dtype=np.uint8).reshape(3, 3)
        g = Grid(cells, FIXED)
        assert is_quiescent(g, CONWAY) == _oracle_on_short_cycle(state), state


def test_quiescence_invariant_under_translation_and_dihedral():
    rng = np.random.default_rng(5)
    for _ in range(20):
        cells = (rng.random((9, 9)) < 0.4).astype(np.uint8)
        g = Grid(cells, PERIODIC)
        q = is_quiescent(g)
        for shift in ((1, 0), (0, 3), (4, 4)):
            rolled = Grid(np.roll(np.roll(cells, shift[0], 0), shift[1], 1), PERIODIC)
            assert is_quiescent(rolled) == q
        m = cells
        for _ in range(4):
            assert is_quiescent(Grid(m.copy(), PERIODIC)) == q
            assert is_quiescent(Grid(np.fliplr(m).copy(), PERIODIC)) == q
            m = np.rot90(m)


# --- run_until_frozen ------------------------------------------------------

def test_empty_soup_frozen_at_first_check():
    params = UpdateParams(p_hold=0.1)
    crit = FrozenCriterion(max_steps=100, check_interval=10)
    assert run_until_frozen(params, 16, crit, RngStream(1).child(0),
                            init_density=0.0) == 0


def test_noise_forbidden():
    params = UpdateParams(p_hold=0.1, p_noise=0.01)
    with pytest.raises(ValueError):
        run_until_frozen(params, 16, FrozenCriterion(), RngStream(1))


def test_deep_frozen_phase_trial_freezes():
    params = UpdateParams(p_hold=0.05)
    crit = FrozenCriterion(max_steps=10_000, check_interval=10)
    step = run_until_frozen(params, 32, crit, RngStream(7).child(0))
    assert step is not None
    assert step % 10 == 0


def test_active_phase_trial_does_not_freeze_quickly():
    params = UpdateParams(p_hold=0.25)
    crit = FrozenCriterion(max_steps=400, check_interval=10)
    assert run_until_frozen(params, 48, crit, RngStream(11).child(0)) is None


# --- sweep -----------------------------------------------------------------

def tiny_sweep_config():
    return SweepConfig(grid_side=16, p_values=(0.05, 0.30), trials_per_p=4,
                       criterion=FrozenCriterion(max_steps=400, check_interval=10))


def test_sweep_structure_and_determinism():
    config = tiny_sweep_config()
    points = sweep_frozen_probability(config, master_seed=42)
    assert [pt.p for pt in points] == [0.05, 0.30]
    for pt in points:
        assert pt.trials == 4
        assert pt.frozen_probability == pt.frozen_count / pt.trials
    again = sweep_frozen_probability(config, master_seed=42)
    assert points == again


def test_sweep_thread_count_does_not_change_results():
    config = tiny_sweep_config()
    serial = sweep_frozen_probability(config, master_seed=9, threads=1)
    pooled = sweep_frozen_probability(config, master_seed=9, threads=3)
    assert serial == pooled


def test_sweep_config_validation():
    with pytest.raises(ValueError):
        SweepConfig(p_values=())
    with pytest.raises(ValueError):
        SweepConfig(p_values=(0.2, 0.1))
    with pytest.raises(ValueError):
        SweepConfig(trials_per_p=0)


# --- decay -----------------------------------------------------------------

def test_decay_dead_soup_stays_dead():
    config = DecayConfig(grid_side=16, init_density=0.0, trials=2, steps=20)
    curve = measure_density_decay(config, master_seed=3)
    assert len(curve) == 21
    assert all(d == 0.0 for _, d in curve)


def test_decay_hold_one_is_constant():
    config = DecayConfig(grid_side=32, p_hold=1.0, init_density=0.59,
                         trials=2, steps=15)
    curve = measure_density_decay(config, master_seed=4)
    first = curve[0][1]
    assert all(d == first for _, d in curve)


def test_decay_initial_density_in_binomial_band():
    # binomial(64*64, 0.59) per trial, averaged over 4: sigma ~= 0.0038
    config = DecayConfig(grid_side=64, init_density=0.59, trials=4, steps=2)
    curve = measure_density_decay(config, master_seed=5)
    assert curve[0][0] == 0
    assert abs(curve[0][1] - 0.59) < 5 * 0.0038


def test_decay_threads_identical():
    config = DecayConfig(grid_side=16, trials=3, steps=30)
    a = measure_density_decay(config, master_seed=6, threads=1)
    b = measure_density_decay(config, master_seed=6, threads=2)
    assert a == b
