"""Core cellular-automaton engine: grids, the two life rules, stepping.

The automaton state lives in a ``Grid`` (a dense uint8 array of 0/1 cells plus
a boundary mode).  Operations are functional: they take grids and return new
grids, so any number of trials can run concurrently as long as each owns its
grids and draws from its own ``RngStream``.

One asynchronous time step is: every cell independently keeps its old state
with probability ``p_hold``, otherwise adopts the deterministic rule's output;
afterwards every cell is independently inverted with probability ``p_noise``.
Both per-cell decisions are read from whole-grid uniform fields keyed by
(draw kind, step index) on the caller's stream, which makes the result
independent of cell evaluation order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .rng import RngStream

__all__ = [
    "BoundaryMode",
    "RuleVariant",
    "UpdateParams",
    "Rect",
    "Grid",
    "HOLD_DRAW",
    "NOISE_DRAW",
    "FILL_DRAW",
    "neighbor_counts",
    "neighbor_sum",
    "virtual_next",
    "step_sync",
    "step_async",
    "apply_noise",
    "random_fill",
    "place_pattern",
]

# Draw-kind labels used when deriving per-step random fields from a trial
# stream.  Kept stable: changing them changes every stochastic result.
HOLD_DRAW = 0
NOISE_DRAW = 1
FILL_DRAW = 2


class BoundaryMode(str, Enum):
    PERIODIC = "periodic"
    FIXED_ZERO = "fixed-zero"


class RuleVariant(str, Enum):
    """Deterministic transition rule.

    CONWAY_B3S23: birth on 3 neighbors, survival on 2 or 3.
    PAPER_LITERAL: birth on 3, survival on 5 or 6.
    """

    CONWAY_B3S23 = "conway-b3s23"
    PAPER_LITERAL = "paper-literal"


_SURVIVAL = {
    RuleVariant.CONWAY_B3S23: (2, 3),
    RuleVariant.PAPER_LITERAL: (5, 6),
}


@dataclass
class UpdateParams:
    """Per-step update probabilities and rule choice.

    p_hold is the probability a cell stays in its stationary phase (keeps its
    old state) this step; p_noise is the probability its resulting state is
    inverted afterwards.
    """

    p_hold: float
    p_noise: float = 0.0
    rule: RuleVariant = RuleVariant.CONWAY_B3S23

    def __post_init__(self) -> None:
        for name in ("p_hold", "p_noise"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")
        self.rule = RuleVariant(self.rule)


@dataclass(frozen=True)
class Rect:
    """A rectangular cell region: rows [row, row+height), cols [col, col+width)."""

    row: int
    col: int
    height: int
    width: int

    def __post_init__(self) -> None:
        if self.height < 0 or self.width < 0:
            raise ValueError("Rect dimensions must be non-negative")

    @property
    def size(self) -> int:
        return self.height * self.width

    @property
    def slices(self) -> tuple[slice, slice]:
        return (slice(self.row, self.row + self.height),
                slice(self.col, self.col + self.width))

    def within(self, height: int, width: int) -> bool:
        return (0 <= self.row and 0 <= self.col
                and self.row + self.height <= height
                and self.col + self.width <= width)


@dataclass
class Grid:
    """Binary cell field with a boundary mode.

    ``cells`` is a (height, width) uint8 array of 0/1 values.  Grids behave
    as values: engine operations never mutate their inputs.
    """

    cells: np.ndarray
    boundary: BoundaryMode = BoundaryMode.PERIODIC

    @classmethod
    def empty(cls, height: int, width: int,
              boundary: BoundaryMode = BoundaryMode.PERIODIC) -> "Grid":
        _check_dims(height, width)
        return cls(np.zeros((height, width), dtype=np.uint8), boundary)

    @classmethod
    def from_array(cls, cells, boundary: BoundaryMode = BoundaryMode.PERIODIC) -> "Grid":
        arr = np.asarray(cells, dtype=np.uint8)
        if arr.ndim != 2:
            raise ValueError("cells must be a 2-D array")
        _check_dims(*arr.shape)
        if not np.isin(arr, (0, 1)).all():
            raise ValueError("cell states must be 0 or 1")
        return cls(arr.copy(), boundary)

    @property
    def height(self) -> int:
        return self.cells.shape[0]

    @property
    def width(self) -> int:
        return self.cells.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.cells.shape

    def population(self) -> int:
        """Number of live cells."""
        return int(np.count_nonzero(self.cells))

    def density(self) -> float:
        return self.population() / self.cells.size

    def copy(self) -> "Grid":
        return Grid(self.cells.copy(), self.boundary)

    def equals(self, other: "Grid") -> bool:
        return self.boundary is other.boundary and np.array_equal(self.cells, other.cells)


def _check_dims(height: int, width: int) -> None:
    if height < 3 or width < 3:
        raise ValueError(f"grid must be at least 3x3, got {height}x{width}")


def _padded(cells: np.ndarray, boundary: BoundaryMode) -> np.ndarray:
    if boundary is BoundaryMode.PERIODIC:
        return np.pad(cells, 1, mode="wrap")
    return np.pad(cells, 1)


def neighbor_counts(grid: Grid) -> np.ndarray:
    """Moore-neighborhood live counts for every cell, as a uint8 array."""
    p = _padded(grid.cells, grid.boundary)
    return (p[:-2, :-2] + p[:-2, 1:-1] + p[:-2, 2:]
            + p[1:-1, :-2] + p[1:-1, 2:]
            + p[2:, :-2] + p[2:, 1:-1] + p[2:, 2:])


def neighbor_sum(grid: Grid, i: int, j: int) -> int:
    """Live-cell count among the 8 Moore neighbors of cell (i, j)."""
    h, w = grid.shape
    if not (0 <= i < h and 0 <= j < w):
        raise IndexError(f"cell index ({i}, {j}) outside {h}x{w} grid")
    cells = grid.cells
    total = 0
    periodic = grid.boundary is BoundaryMode.PERIODIC
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == 0 and dj == 0:
                continue
            r, c = i + di, j + dj
            if periodic:
                total += int(cells[r % h, c % w])
            elif 0 <= r < h and 0 <= c < w:
                total += int(cells[r, c])
    return total


def virtual_next(grid: Grid, rule: RuleVariant = RuleVariant.CONWAY_B3S23) -> Grid:
    """The field of states the deterministic rule would assign next.

    Every cell is computed from the same input grid; dead cells are born on a
    neighbor count of 3, live cells survive per the rule variant.
    """
    s = neighbor_counts(grid)
    alive = grid.cells == 1
    s_a, s_b = _SURVIVAL[RuleVariant(rule)]
    out = (~alive & (s == 3)) | (alive & ((s == s_a) | (s == s_b)))
    return Grid(out.view(np.uint8), grid.boundary)


def step_sync(grid: Grid, rule: RuleVariant = RuleVariant.CONWAY_B3S23) -> Grid:
    """One synchronous step: every cell adopts its virtual state."""
    return virtual_next(grid, rule)


def step_async(grid: Grid, params: UpdateParams, rng: RngStream, step_index: int) -> Grid:
    """One asynchronous step under ``params``, drawing from ``rng``.

    Per-cell hold decisions come from the uniform field at
    ``rng.child(HOLD_DRAW, step_index)`` and noise inversions from
    ``rng.child(NOISE_DRAW, step_index)``, so two calls with the same
    (stream, step_index) are bit-identical regardless of evaluation order
    or scheduling.
    """
    if params.p_hold >= 1.0:
        new = grid.cells.copy()
    else:
        b = virtual_next(grid, params.rule).cells
        if params.p_hold <= 0.0:
            new = b
        else:
            u = rng.child(HOLD_DRAW, step_index).uniforms(grid.shape)
            new = np.where(u < params.p_hold, grid.cells, b)
    out = Grid(new, grid.boundary)
    if params.p_noise > 0.0:
        out = apply_noise(out, params.p_noise, rng, step_index)
    return out


def apply_noise(grid: Grid, p_noise: float, rng: RngStream, step_index: int) -> Grid:
    """Invert every cell independently with probability ``p_noise``."""
    if not 0.0 <= p_noise <= 1.0:
        raise ValueError(f"p_noise must lie in [0, 1], got {p_noise}")
    if p_noise <= 0.0:
        return grid.copy()
    u = rng.child(NOISE_DRAW, step_index).uniforms(grid.shape)
    flips = (u < p_noise).view(np.uint8)
    return Grid(grid.cells ^ flips, grid.boundary)


def random_fill(grid: Grid, region: Rect, density: float, rng: RngStream) -> Grid:
    """Set each cell of ``region`` to 1 with probability ``density``.

    Cells outside the region are untouched.  The caller should pass a stream
    dedicated to this fill; draws are keyed by position within the region.
    """
    if not 0.0 <= density <= 1.0:
        raise ValueError(f"density must lie in [0, 1], got {density}")
    if not region.within(*grid.shape):
        raise ValueError(f"region {region} does not fit a {grid.height}x{grid.width} grid")
    out = grid.copy()
    u = rng.uniforms((region.height, region.width))
    out.cells[region.slices] = (u < density).view(np.uint8)
    return out


def place_pattern(grid: Grid, pattern, origin: tuple[int, int]) -> Grid:
    """Write a small 0/1 matrix into the grid at ``origin`` (top-left corner)."""
    pat = np.asarray(pattern, dtype=np.uint8)
    if pat.size == 0:
        return grid.copy()
    if pat.ndim != 2:
        raise ValueError("pattern must be a 2-D matrix")
    if not np.isin(pat, (0, 1)).all():
        raise ValueError("pattern states must be 0 or 1")
    r, c = origin
    rect = Rect(r, c, pat.shape[0], pat.shape[1])
    if not rect.within(*grid.shape):
        raise ValueError(f"pattern of shape {pat.shape} at {origin} overflows "
                         f"a {grid.height}x{grid.width} grid")
    out = grid.copy()
    out.cells[rect.slices] = pat
    return out
