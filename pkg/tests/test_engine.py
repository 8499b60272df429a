import numpy as np
import pytest

from asynclife import engine
from asynclife.engine import (
    BoundaryMode,
    Grid,
    Rect,
    RuleVariant,
    UpdateParams,
    apply_noise,
    neighbor_sum,
    place_pattern,
    random_fill,
    step_async,
    step_sync,
    virtual_next,
)
from asynclife.patterns import BEEHIVE, BLINKER, BLOCK, GLIDER, LOAF
from asynclife.rng import RngStream

PERIODIC = BoundaryMode.PERIODIC
FIXED = BoundaryMode.FIXED_ZERO
CONWAY = RuleVariant.CONWAY_B3S23
PAPER = RuleVariant.PAPER_LITERAL


def random_grid(seed, h=32, w=32, density=0.5, boundary=PERIODIC):
    cells = (np.random.default_rng(seed).random((h, w)) < density).astype(np.uint8)
    return Grid(cells, boundary)


# --- grid basics -----------------------------------------------------------

def test_grid_validation():
    with pytest.raises(ValueError):
        Grid.empty(2, 5)
    with pytest.raises(ValueError):
        Grid.from_array(np.full((4, 4), 2))
    with pytest.raises(ValueError):
        Grid.from_array(np.zeros((4, 4, 2)))


def test_population_matches_sum():
    g = random_grid(0)
    assert g.population() == int(g.cells.sum())


# --- neighbor_sum ----------------------------------------------------------

def test_neighbor_sum_all_dead():
    g = Grid.empty(5, 5, FIXED)
    for i in range(5):
        for j in range(5):
            assert neighbor_sum(g, i, j) == 0


def test_neighbor_sum_block_corner():
    g = Grid.empty(4, 4, FIXED)
    g.cells[1:3, 1:3] = 1
    assert neighbor_sum(g, 1, 1) == 3


def test_neighbor_sum_saturated_periodic():
    g = Grid(np.ones((5, 5), dtype=np.uint8), PERIODIC)
    assert neighbor_sum(g, 0, 0) == 8
    assert neighbor_sum(g, 2, 2) == 8


def test_neighbor_sum_out_of_range():
    g = Grid.empty(4, 4)
    with pytest.raises(IndexError):
        neighbor_sum(g, 4, 0)
    with pytest.raises(IndexError):
        neighbor_sum(g, 0, -5)


def test_neighbor_sum_matches_block_sum_oracle():
    # 9-cell block sum minus the center, with explicit boundary handling.
    rng = np.random.default_rng(7)
    for _ in range(100):
        boundary = PERIODIC if rng.random() < 0.5 else FIXED
        h, w = int(rng.integers(3, 12)), int(rng.integers(3, 12))
        g = Grid((rng.random((h, w)) < 0.5).astype(np.uint8), boundary)
        for _ in range(100):
            i, j = int(rng.integers(h)), int(rng.integers(w))
            block = 0
            for di in (-1, 0, 1):
                for dj in (-1, 0, 1):
                    r, c = i + di, j + dj
                    if boundary is PERIODIC:
                        block += int(g.cells[r % h, c % w])
                    elif 0 <= r < h and 0 <= c < w:
                        block += int(g.cells[r, c])
            assert neighbor_sum(g, i, j) == block - int(g.cells[i, j])


# --- virtual_next ----------------------------------------------------------

def test_birth_on_three():
    g = Grid.empty(5, 5, FIXED)
    g.cells[1, 1] = g.cells[1, 3] = g.cells[3, 2] = 1
    assert neighbor_sum(g, 2, 2) == 3
    assert virtual_next(g, CONWAY).cells[2, 2] == 1
    assert virtual_next(g, PAPER).cells[2, 2] == 1


def _live_center_with_neighbors(n):
    g = Grid.empty(7, 7, FIXED)
    g.cells[3, 3] = 1
    spots = [(2, 2), (2, 3), (2, 4), (3, 2), (3, 4), (4, 2), (4, 3), (4, 4)]
    for r, c in spots[:n]:
        g.cells[r, c] = 1
    return g


def test_paper_literal_survival_on_five():
    g = _live_center_with_neighbors(5)
    assert virtual_next(g, PAPER).cells[3, 3] == 1
    assert virtual_next(g, CONWAY).cells[3, 3] == 0


def test_paper_literal_death_on_two():
    g = _live_center_with_neighbors(2)
    assert virtual_next(g, PAPER).cells[3, 3] == 0
    assert virtual_next(g, CONWAY).cells[3, 3] == 1


def test_virtual_next_reads_one_snapshot():
    # A blinker flips in one step only if all cells see the old grid.
    g = place_pattern(Grid.empty(5, 5, FIXED), BLINKER, (2, 1))
    nxt = virtual_next(g, CONWAY)
    expected = place_pattern(Grid.empty(5, 5, FIXED), BLINKER.T, (1, 2))
    assert nxt.equals(expected)


# --- step_sync -------------------------------------------------------------

def test_empty_grid_stays_empty():
    g = Grid.empty(6, 6)
    assert step_sync(g).population() == 0


def test_blinker_period_two():
    g = place_pattern(Grid.empty(7, 7, FIXED), BLINKER, (3, 2))
    g1 = step_sync(g)
    g2 = step_sync(g1)
    assert g1.population() == 3 and not g1.equals(g)
    assert g2.equals(g)


def test_glider_translates_one_diagonal_per_four_steps():
    g = place_pattern(Grid.empty(20, 20, FIXED), GLIDER, (3, 3))
    stepped = g
    for _ in range(4):
        stepped = step_sync(stepped)
    assert stepped.equals(place_pattern(Grid.empty(20, 20, FIXED), GLIDER, (4, 4)))


# --- step_async ------------------------------------------------------------

def test_hold_one_is_identity():
    rng = RngStream(3)
    params = UpdateParams(p_hold=1.0)
    for seed in range(5):
        g = random_grid(seed)
        assert step_async(g, params, rng.child(seed), 0).equals(g)


def test_hold_zero_matches_sync():
    rng = RngStream(4)
    for rule in (CONWAY, PAPER):
        params = UpdateParams(p_hold=0.0, rule=rule)
        for seed in range(20):
            g = random_grid(seed, boundary=PERIODIC if seed % 2 else FIXED)
            assert step_async(g, params, rng.child(seed), 0).equals(step_sync(g, rule))


@pytest.mark.parametrize("pattern", [BLOCK, BEEHIVE, LOAF])
def test_still_life_stable_under_async(pattern):
    g = place_pattern(Grid.empty(10, 10, FIXED), pattern, (4, 4))
    rng = RngStream(5).child(1)
    for p_hold in (0.0, 0.13, 0.5, 0.97):
        current = g
        for t in range(25):
            current = step_async(current, UpdateParams(p_hold=p_hold), rng, t)
        assert current.equals(g)


def _scalar_step_async_reference(grid, params, rng, step_index, order):
    """Independent per-cell evaluation in an arbitrary order."""
    h, w = grid.shape
    hold_u = rng.child(engine.HOLD_DRAW, step_index).uniforms((h, w))
    noise_u = rng.child(engine.NOISE_DRAW, step_index).uniforms((h, w))
    survival = (2, 3) if params.rule is CONWAY else (5, 6)
    new = np.zeros_like(grid.cells)
    for i, j in order:
        total = 0
        for di in (-1, 0, 1):
            for dj in (-1, 0, 1):
                if di == dj == 0:
                    continue
                r, c = i + di, j + dj
                if grid.boundary is PERIODIC:
                    total += int(grid.cells[r % h, c % w])
                elif 0 <= r < h and 0 <= c < w:
                    total += int(grid.cells[r, c])
        a = int(grid.cells[i, j])
        b = int(total == 3) if a == 0 else int(total in survival)
        v = a if hold_u[i, j] < params.p_hold else b
        if noise_u[i, j] < params.p_noise:
            v ^= 1
        new[i, j] = v
    return new


def test_order_independence_of_async_step():
    params = UpdateParams(p_hold=0.3, p_noise=0.05)
    g = random_grid(11, 12, 9, boundary=PERIODIC)
    rng = RngStream(77).child(0)
    result = step_async(g, params, rng, 5)
    indices = [(i, j) for i in range(12) for j in range(9)]
    orders = [
        indices,
        [(i, j) for j in range(9) for i in range(12)],
        list(np.random.default_rng(1).permutation(indices)),
    ]
    for order in orders:
        ref = _scalar_step_async_reference(g, params, rng, 5, [tuple(ij) for ij in order])
        assert np.array_equal(result.cells, ref)


def test_async_step_reproducible():
    params = UpdateParams(p_hold=0.13, p_noise=0.001)
    g = random_grid(0)
    a = step_async(g, params, RngStream(9).child(2), 17)
    b = step_async(g, params, RngStream(9).child(2), 17)
    assert a.equals(b)
    c = step_async(g, params, RngStream(9).child(2), 18)
    assert not c.equals(a)


# --- boundary behavior -----------------------------------------------------

def test_glider_wraps_on_periodic_grid():
    g = place_pattern(Grid.empty(12, 12, PERIODIC), GLIDER, (4, 4))
    current = g
    for _ in range(12 * 4):
        current = step_sync(current)
        assert current.population() == 5
    assert current.equals(g)


def test_glider_destroyed_at_fixed_wall():
    g = place_pattern(Grid.empty(12, 12, FIXED), GLIDER, (4, 4))
    current = g
    populations = []
    for _ in range(100):
        current = step_sync(current)
        populations.append(current.population())
    assert any(p != 5 for p in populations)
    assert populations[-1] != 5


# --- apply_noise -----------------------------------------------------------

def test_noise_zero_identity():
    g = random_grid(1)
    assert apply_noise(g, 0.0, RngStream(1).child(0), 0).equals(g)


def test_noise_one_complement():
    g = random_grid(2)
    flipped = apply_noise(g, 1.0, RngStream(1).child(0), 0)
    assert np.array_equal(flipped.cells, 1 - g.cells)


def test_noise_flip_count_in_binomial_band():
    # binomial(1e6, 1e-4): mean 100, sigma ~= 10, 5-sigma band [50, 150]
    g = Grid(np.zeros((1000, 1000), dtype=np.uint8), PERIODIC)
    out = apply_noise(g, 1e-4, RngStream(123).child(0), 0)
    flips = int(out.cells.sum())
    assert 50 <= flips <= 150


def test_noise_matches_step_async_noise():
    params = UpdateParams(p_hold=1.0, p_noise=0.2)
    g = random_grid(3)
    rng = RngStream(8).child(4)
    via_step = step_async(g, params, rng, 9)
    direct = apply_noise(g, 0.2, rng, 9)
    assert via_step.equals(direct)


def test_noise_invalid_probability():
    with pytest.raises(ValueError):
        apply_noise(random_grid(0), 1.5, RngStream(0), 0)


# --- random_fill -----------------------------------------------------------

def test_fill_density_extremes():
    g = Grid.empty(10, 10)
    rect = Rect(2, 3, 4, 5)
    empty = random_fill(g, rect, 0.0, RngStream(1).child(0))
    assert empty.population() == 0
    full = random_fill(g, rect, 1.0, RngStream(1).child(0))
    assert full.population() == rect.size
    assert full.cells[rect.slices].all()


def test_fill_binomial_band():
    # binomial(1089, 0.5): mean 544.5, sigma ~= 16.5, 5-sigma band [462, 627]
    g = Grid.empty(40, 40)
    out = random_fill(g, Rect(0, 0, 33, 33), 0.5, RngStream(321).child(0))
    assert 462 <= out.population() <= 627


def test_fill_leaves_outside_untouched():
    g = Grid(np.ones((8, 8), dtype=np.uint8), PERIODIC)
    out = random_fill(g, Rect(0, 0, 4, 4), 0.0, RngStream(2).child(0))
    assert out.cells[:4, :4].sum() == 0
    assert out.cells[4:, :].all() and out.cells[:4, 4:].all()
    assert g.cells.all()  # input untouched


def test_fill_region_out_of_range():
    g = Grid.empty(8, 8)
    with pytest.raises(ValueError):
        random_fill(g, Rect(5, 5, 4, 4), 0.5, RngStream(0))
    with pytest.raises(ValueError):
        random_fill(g, Rect(-1, 0, 3, 3), 0.5, RngStream(0))


# --- place_pattern ---------------------------------------------------------

def test_place_empty_pattern_is_noop():
    g = random_grid(4)
    out = place_pattern(g, np.zeros((0, 0), dtype=np.uint8), (2, 2))
    assert out.equals(g)


def test_place_glider_live_count():
    g = place_pattern(Grid.empty(10, 10), GLIDER, (3, 3))
    assert g.population() == 5


def test_place_then_read_back():
    g = place_pattern(random_grid(5, 10, 10), LOAF, (4, 3))
    assert np.array_equal(g.cells[4:8, 3:7], LOAF)


def test_place_overflow_errors():
    g = Grid.empty(6, 6)
    with pytest.raises(ValueError):
        place_pattern(g, GLIDER, (4, 4))
    with pytest.raises(ValueError):
        place_pattern(g, GLIDER, (-1, 0))


# --- params ----------------------------------------------------------------

def test_update_params_validation():
    with pytest.raises(ValueError):
        UpdateParams(p_hold=-0.1)
    with pytest.raises(ValueError):
        UpdateParams(p_hold=0.5, p_noise=1.0001)
