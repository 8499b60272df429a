"""Directed-percolation reference model.

Water enters at the top of an N x N random pore field and falls: a wet pore
at (i, j) wets the pores at (i+1, j) and (i+1, j+1), with the column index
wrapping at the right edge (a clipped edge is selectable).  A trial succeeds
when any bottom-row pore gets wet.  The success-rate curve over porosity
anchors the critical-porosity estimate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fits import SigmoidFit, fit_sigmoid
from .parallel import parallel_map
from .rng import RngStream

__all__ = [
    "PORE_DRAW",
    "PercolationConfig",
    "PercolationResult",
    "percolate_once",
    "success_curve",
]

# Draw-kind label for the pore field (engine kinds are 0..2).
PORE_DRAW = 3


def default_porosities() -> tuple[float, ...]:
    return tuple(round(0.60 + 0.01 * k, 2) for k in range(21))


@dataclass(frozen=True)
class PercolationConfig:
    side: int = 500
    porosities: tuple[float, ...] = None  # type: ignore[assignment]
    trials: int = 200
    wrap: bool = True

    def __post_init__(self) -> None:
        if self.porosities is None:
            object.__setattr__(self, "porosities", default_porosities())
        object.__setattr__(self, "porosities", tuple(float(p) for p in self.porosities))
        if self.side < 2:
            raise ValueError("side must be at least 2")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.porosities:
            raise ValueError("porosities must not be empty")
        if not all(0.0 <= p <= 1.0 for p in self.porosities):
            raise ValueError("porosities must lie in [0, 1]")


@dataclass(frozen=True)
class PercolationResult:
    porosities: tuple[float, ...]
    trials: int
    success_counts: tuple[int, ...]
    success_rates: tuple[float, ...]
    estimated_threshold: float | None
    fit: SigmoidFit | None


def _propagate(pores: np.ndarray, wrap: bool) -> np.ndarray:
    """Wet mask of the bottom row; ``pores`` has rows along axis -2."""
    wet = pores[..., 0, :].copy()
    n = pores.shape[-2]
    for i in range(1, n):
        if wrap:
            shifted = np.roll(wet, 1, axis=-1)
        else:
            shifted = np.zeros_like(wet)
            shifted[..., 1:] = wet[..., :-1]
        wet = pores[..., i, :] & (wet | shifted)
        if not wet.any():
            break
    return wet


def percolate_once(n: int, porosity: float, rng: RngStream, wrap: bool = True) -> bool:
    """One trial: random pores at the given porosity; True when water gets through."""
    if not 0.0 <= porosity <= 1.0:
        raise ValueError("porosity must lie in [0, 1]")
    pores = rng.child(PORE_DRAW).uniforms((n, n)) < porosity
    return bool(_propagate(pores, wrap).any())


def _curve_worker(task) -> np.ndarray:
    master_seed, trial, side, porosities, wrap = task
    # One uniform field per trial, thresholded at every porosity: coupled
    # sampling makes the per-trial outcome monotone in porosity and keeps
    # each (trial, porosity) outcome equal to percolate_once on the same
    # trial stream.
    u = RngStream(master_seed).child(trial).child(PORE_DRAW).uniforms((side, side))
    pores = u[None, :, :] < np.asarray(porosities)[:, None, None]
    return _propagate(pores, wrap).any(axis=-1)


def success_curve(config: PercolationConfig, master_seed: int,
                  threads: int = 1) -> PercolationResult:
    """Monte Carlo success rate per porosity plus the sigmoid threshold estimate.

    The threshold is the porosity where a fitted sigmoid crosses 0.5; it is
    None when the rates carry no transition (all 0 or all 1).
    """
    tasks = [(master_seed, t, config.side, config.porosities, config.wrap)
             for t in range(config.trials)]
    outcomes = np.stack(parallel_map(_curve_worker, tasks, threads))
    counts = outcomes.sum(axis=0)
    rates = counts / config.trials
    try:
        fit = fit_sigmoid(np.asarray(config.porosities), rates)
        threshold = fit.b
    except ValueError:
        fit, threshold = None, None
    return PercolationResult(
        porosities=config.porosities,
        trials=config.trials,
        success_counts=tuple(int(c) for c in counts),
        success_rates=tuple(float(r) for r in rates),
        estimated_threshold=threshold,
        fit=fit,
    )
