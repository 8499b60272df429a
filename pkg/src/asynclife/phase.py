"""Phase-transition and critical-decay experiments.

Sweeps the hold probability to locate the boundary between the frozen regime
(configurations settling onto short cycles) and the perpetually active one,
and measures how the live-cell density decays over time at the critical point.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .engine import (
    FILL_DRAW,
    BoundaryMode,
    Grid,
    Rect,
    RuleVariant,
    UpdateParams,
    random_fill,
    step_async,
    step_sync,
)
from .parallel import parallel_map
from .rng import RngStream

__all__ = [
    "FrozenCriterion",
    "SweepConfig",
    "SweepPoint",
    "DecayConfig",
    "default_sweep_p_values",
    "is_quiescent",
    "run_until_frozen",
    "sweep_frozen_probability",
    "measure_density_decay",
]


def default_sweep_p_values() -> tuple[float, ...]:
    """The default scan over the transition window: 0.095 to 0.155 step 0.005."""
    return tuple(round(0.095 + 0.005 * k, 3) for k in range(13))


@dataclass(frozen=True)
class FrozenCriterion:
    """When to declare a trial frozen and when to give up."""

    max_steps: int = 10_000
    check_interval: int = 10

    def __post_init__(self) -> None:
        if self.max_steps <= 0:
            raise ValueError("max_steps must be positive")
        if self.check_interval < 1:
            raise ValueError("check_interval must be >= 1")


@dataclass(frozen=True)
class SweepConfig:
    grid_side: int = 500
    p_values: tuple[float, ...] = field(default_factory=default_sweep_p_values)
    trials_per_p: int = 100
    init_density: float = 0.5
    criterion: FrozenCriterion = FrozenCriterion()
    rule: RuleVariant = RuleVariant.CONWAY_B3S23
    boundary: BoundaryMode = BoundaryMode.PERIODIC

    def __post_init__(self) -> None:
        object.__setattr__(self, "p_values", tuple(self.p_values))
        if not self.p_values:
            raise ValueError("p_values must not be empty")
        if any(b <= a for a, b in zip(self.p_values, self.p_values[1:])):
            raise ValueError("p_values must be strictly increasing")
        if not all(0.0 <= p <= 1.0 for p in self.p_values):
            raise ValueError("p_values must lie in [0, 1]")
        if self.trials_per_p <= 0:
            raise ValueError("trials_per_p must be positive")
        if not 0.0 <= self.init_density <= 1.0:
            raise ValueError("init_density must lie in [0, 1]")
        if self.grid_side < 3:
            raise ValueError("grid_side must be at least 3")


@dataclass(frozen=True)
class SweepPoint:
    p: float
    frozen_probability: float
    trials: int
    frozen_count: int


@dataclass(frozen=True)
class DecayConfig:
    grid_side: int = 150
    p_hold: float = 0.13
    init_density: float = 0.590
    trials: int = 20
    steps: int = 10_000
    rule: RuleVariant = RuleVariant.CONWAY_B3S23
    boundary: BoundaryMode = BoundaryMode.PERIODIC

    def __post_init__(self) -> None:
        if self.grid_side < 3 or self.trials <= 0 or self.steps <= 0:
            raise ValueError("grid_side, trials and steps must be positive")
        if not 0.0 <= self.init_density <= 1.0:
            raise ValueError("init_density must lie in [0, 1]")
        if not 0.0 <= self.p_hold <= 1.0:
            raise ValueError("p_hold must lie in [0, 1]")


def is_quiescent(grid: Grid, rule: RuleVariant = RuleVariant.CONWAY_B3S23) -> bool:
    """True iff the configuration lies on a synchronous cycle of length <= 2.

    Asynchronous trajectories that settle land exactly on such configurations
    (still lifes and period-2 oscillators), so this doubles as the frozen test.
    """
    g2 = step_sync(step_sync(grid, rule), rule)
    return np.array_equal(g2.cells, grid.cells)


def _seed_soup(side: int, density: float, boundary: BoundaryMode, rng: RngStream) -> Grid:
    grid = Grid.empty(side, side, boundary)
    return random_fill(grid, Rect(0, 0, side, side), density, rng.child(FILL_DRAW))


def run_until_frozen(params: UpdateParams, side: int, criterion: FrozenCriterion,
                     rng: RngStream, init_density: float = 0.5,
                     boundary: BoundaryMode = BoundaryMode.PERIODIC) -> int | None:
    """Evolve a random soup until it freezes; returns the freeze step or None.

    Quiescence is tested at step 0 and then after every ``check_interval``
    asynchronous steps, up to ``max_steps``.
    """
    if params.p_noise != 0.0:
        raise ValueError("freezing experiments require p_noise = 0")
    grid = _seed_soup(side, init_density, boundary, rng)
    if is_quiescent(grid, params.rule):
        return 0
    step = 0
    while step < criterion.max_steps:
        chunk = min(criterion.check_interval, criterion.max_steps - step)
        for k in range(chunk):
            grid = step_async(grid, params, rng, step + k)
        step += chunk
        if is_quiescent(grid, params.rule):
            return step
    return None


def _sweep_worker(task) -> bool:
    master_seed, config, p_index, trial = task
    params = UpdateParams(p_hold=config.p_values[p_index], p_noise=0.0, rule=config.rule)
    rng = RngStream(master_seed).child(p_index, trial)
    frozen_at = run_until_frozen(params, config.grid_side, config.criterion, rng,
                                 config.init_density, config.boundary)
    return frozen_at is not None


def sweep_frozen_probability(config: SweepConfig, master_seed: int,
                             threads: int = 1) -> list[SweepPoint]:
    """Frozen-state probability at every p value, over independent trials."""
    tasks = [(master_seed, config, ip, t)
             for ip in range(len(config.p_values))
             for t in range(config.trials_per_p)]
    outcomes = parallel_map(_sweep_worker, tasks, threads)
    points = []
    n = config.trials_per_p
    for ip, p in enumerate(config.p_values):
        frozen = sum(outcomes[ip * n:(ip + 1) * n])
        points.append(SweepPoint(p=p, frozen_probability=frozen / n,
                                 trials=n, frozen_count=frozen))
    return points


def _decay_worker(task) -> np.ndarray:
    master_seed, config, trial = task
    rng = RngStream(master_seed).child(trial)
    params = UpdateParams(p_hold=config.p_hold, p_noise=0.0, rule=config.rule)
    grid = _seed_soup(config.grid_side, config.init_density, config.boundary, rng)
    densities = np.empty(config.steps + 1)
    densities[0] = grid.density()
    for t in range(config.steps):
        grid = step_async(grid, params, rng, t)
        densities[t + 1] = grid.density()
    return densities


def measure_density_decay(config: DecayConfig, master_seed: int,
                          threads: int = 1) -> list[tuple[int, float]]:
    """Mean live-cell density per step (step 0 = initial soup), over trials."""
    tasks = [(master_seed, config, t) for t in range(config.trials)]
    curves = parallel_map(_decay_worker, tasks, threads)
    mean = np.mean(np.stack(curves), axis=0)
    return [(step, float(d)) for step, d in enumerate(mean)]
