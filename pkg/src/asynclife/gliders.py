"""Glider detection by exact template matching, and the occurrence census.

A detection requires a template's 3x3 bounding box to match the grid exactly
with an all-dead margin ring around it; free-flying gliders always satisfy
the margin, so the detector has no false positives at the cost of missing
gliders brushing debris.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .engine import (
    FILL_DRAW,
    BoundaryMode,
    Grid,
    Rect,
    UpdateParams,
    random_fill,
    step_async,
)
from .parallel import parallel_map
from .patterns import dihedral_transforms, glider_phases
from .rng import RngStream

__all__ = [
    "GliderTemplateSet",
    "DetectionResult",
    "OccurrenceCurve",
    "build_templates",
    "detect_gliders",
    "occurrence_sweep",
]

_BOX = 3  # all glider phases have a tight 3x3 bounding box


def _template_code(cells: np.ndarray) -> int:
    """Pack a 3x3 binary matrix into a 9-bit integer, row-major."""
    bits = 0
    for di in range(_BOX):
        for dj in range(_BOX):
            if cells[di, dj]:
                bits |= 1 << (_BOX * di + dj)
    return bits


@dataclass(frozen=True)
class GliderTemplateSet:
    """Deduplicated glider templates plus the required empty margin width."""

    templates: tuple[np.ndarray, ...]
    margin: int = 1
    codes: tuple[int, ...] = field(init=False)

    def __post_init__(self) -> None:
        if self.margin < 0:
            raise ValueError("margin must be non-negative")
        object.__setattr__(self, "codes",
                           tuple(_template_code(t) for t in self.templates))

    def __len__(self) -> int:
        return len(self.templates)

    def id_lookup(self) -> np.ndarray:
        """Map from 9-bit patch code to template id (-1 when no template)."""
        lut = np.full(1 << (_BOX * _BOX), -1, dtype=np.int16)
        for tid, code in enumerate(self.codes):
            lut[code] = tid
        return lut


def build_templates(margin: int = 1) -> GliderTemplateSet:
    """All distinct glider appearances: 4 phases under the 8 dihedral maps.

    Duplicates (phases that are transforms of each other) are removed; the
    result is ordered by packed code for stable template ids.
    """
    if margin < 0:
        raise ValueError("margin must be non-negative")
    seen: dict[int, np.ndarray] = {}
    for phase in glider_phases():
        for mat in dihedral_transforms(phase):
            arr = np.ascontiguousarray(mat, dtype=np.uint8)
            seen.setdefault(_template_code(arr), arr)
    ordered = tuple(seen[c] for c in sorted(seen))
    return GliderTemplateSet(templates=ordered, margin=margin)


@dataclass(frozen=True)
class DetectionResult:
    """Matched template placements; origins are bounding-box top-left cells."""

    placements: tuple[tuple[int, tuple[int, int]], ...]

    @property
    def count(self) -> int:
        return len(self.placements)


def detect_gliders(grid: Grid, templates: GliderTemplateSet) -> DetectionResult:
    """Scan every origin for an exact template match with an empty margin ring.

    The margin respects the boundary mode: fixed-zero treats out-of-range
    cells as dead, periodic wraps.
    """
    h, w = grid.shape
    m = templates.margin
    pad = m + _BOX
    if grid.boundary is BoundaryMode.PERIODIC:
        padded = np.pad(grid.cells, pad, mode="wrap")
    else:
        padded = np.pad(grid.cells, pad)

    # 9-bit patch code at every origin.
    code = np.zeros((h, w), dtype=np.int16)
    for di in range(_BOX):
        for dj in range(_BOX):
            code |= padded[pad + di:pad + di + h, pad + dj:pad + dj + w].astype(np.int16) \
                << (_BOX * di + dj)

    ids = templates.id_lookup()[code]
    matched = ids >= 0

    if m > 0:
        # Window sums via an inclusive integral image; ring is dead when the
        # (3+2m)^2 window sum equals the 3x3 box sum (= 5 on a match).
        ii = padded.astype(np.int32).cumsum(axis=0).cumsum(axis=1)

        def rect_sum(top: int, left: int, size: int) -> np.ndarray:
            b = top + size - 1
            r = left + size - 1
            return (ii[b:b + h, r:r + w] - ii[top - 1:top - 1 + h, r:r + w]
                    - ii[b:b + h, left - 1:left - 1 + w]
                    + ii[top - 1:top - 1 + h, left - 1:left - 1 + w])

        win = rect_sum(pad - m, pad - m, _BOX + 2 * m)
        box = rect_sum(pad, pad, _BOX)
        matched &= win == box

    rows, cols = np.nonzero(matched)
    placements = tuple((int(ids[i, j]), (int(i), int(j))) for i, j in zip(rows, cols))
    return DetectionResult(placements=placements)


@dataclass(frozen=True)
class OccurrenceCurve:
    """Gliders per cell per step as a function of the hold probability."""

    points: tuple[tuple[float, float], ...]
    totals: tuple[int, ...]
    window_steps: int
    trials: int
    grid_side: int


def _occurrence_worker(task):
    master_seed, p_hold, p_index, trial, side, window_steps, rule, margin, density, keep = task
    rng = RngStream(master_seed).child(p_index, trial)
    templates = build_templates(margin)
    params = UpdateParams(p_hold=p_hold, p_noise=0.0, rule=rule)
    grid = random_fill(Grid.empty(side, side, BoundaryMode.PERIODIC),
                       Rect(0, 0, side, side), density, rng.child(FILL_DRAW))
    total = 0
    placements = []
    for t in range(window_steps):
        grid = step_async(grid, params, rng, t)
        result = detect_gliders(grid, templates)
        total += result.count
        if keep:
            placements.extend((t + 1, tid, r, c) for tid, (r, c) in result.placements)
    return total, placements


def occurrence_sweep(p_values, side: int, window_steps: int, trials: int,
                     base: UpdateParams, master_seed: int, threads: int = 1,
                     margin: int = 1, init_density: float = 0.5,
                     record_placements: bool = False):
    """Glider occurrence rate per hold probability.

    Each trial evolves an ``init_density`` soup for ``window_steps``
    noise-free steps, detecting gliders after every step; the rate is total
    detections normalized by trials x steps x cells.  When
    ``record_placements`` is set, the placements of trial 0 at each p are
    returned alongside the curve as {p: [(step, template_id, row, col)]}.
    """
    if window_steps < 1:
        raise ValueError("window_steps must be >= 1")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    p_values = [float(p) for p in p_values]
    tasks = [(master_seed, p, ip, t, side, window_steps, base.rule, margin,
              init_density, record_placements and t == 0)
             for ip, p in enumerate(p_values) for t in range(trials)]
    results = parallel_map(_occurrence_worker, tasks, threads)
    cells = side * side
    points = []
    totals = []
    placements = {}
    for ip, p in enumerate(p_values):
        chunk = results[ip * trials:(ip + 1) * trials]
        total = sum(c for c, _ in chunk)
        totals.append(total)
        points.append((p, total / (trials * window_steps * cells)))
        if record_placements:
            placements[p] = chunk[0][1]
    curve = OccurrenceCurve(points=tuple(points), totals=tuple(totals),
                            window_steps=window_steps, trials=trials, grid_side=side)
    return (curve, placements) if record_placements else curve
