"""Probabilistic AND/OR gates driven by noisy critical-regime evolution.

The grid is split into an input corner S(A), an opposite input corner S(B)
and a central output square S(C).  Input bits seed their regions with random
soup; the automaton then runs at the critical hold probability under a tuned
inversion noise, and the output bit is read from the live coverage of S(C)
at the horizon.  The same geometry acts as an AND gate at low noise and as
an OR gate at ten times that noise.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum

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
)
from .parallel import parallel_map
from .rng import RngStream

__all__ = [
    "GateKind",
    "Regions",
    "GateConfig",
    "InputPair",
    "TrialRecord",
    "PairStats",
    "TruthTableEstimate",
    "CoverHistogram",
    "TruthTableResult",
    "make_regions",
    "encode_inputs",
    "readout",
    "run_gate_trial",
    "estimate_truth_table",
]

DEFAULT_NOISE = {"and": 1e-4, "or": 1e-3}


class GateKind(str, Enum):
    AND = "and"
    OR = "or"


@dataclass(frozen=True)
class Regions:
    """Input corners and output center of an N x N gate grid."""

    input_a: Rect
    input_b: Rect
    output: Rect
    grid_side: int


def make_regions(n: int) -> Regions:
    """Corner/center split of an N x N grid into S(A), S(B) and S(C).

    With 1-based indices: S(A) = [1..floor(N/3)]^2, S(B) = [ceil(2N/3)..N]^2,
    S(C) = [floor(N/3)+1 .. ceil(2N/3)-1]^2; the floor/ceil pair reduces to
    exact thirds when 3 divides N.
    """
    if n < 9:
        raise ValueError(f"gate grid side must be at least 9, got {n}")
    a_end = n // 3               # 1-based inclusive end of S(A)
    b_start = math.ceil(2 * n / 3)  # 1-based start of S(B)
    return Regions(
        input_a=Rect(0, 0, a_end, a_end),
        input_b=Rect(b_start - 1, b_start - 1, n - b_start + 1, n - b_start + 1),
        output=Rect(a_end, a_end, b_start - 1 - a_end, b_start - 1 - a_end),
        grid_side=n,
    )


@dataclass(frozen=True)
class GateConfig:
    """Gate geometry and run parameters; defaults are the reference setup."""

    kind: GateKind
    grid_side: int = 100
    horizon: int = 1500
    threshold: float = 0.1
    p_hold: float = 0.13
    p_noise: float | None = None
    input_density: float = 0.5
    rule: RuleVariant = RuleVariant.CONWAY_B3S23
    boundary: BoundaryMode = BoundaryMode.FIXED_ZERO
    regions: Regions = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", GateKind(self.kind))
        if self.p_noise is None:
            object.__setattr__(self, "p_noise", DEFAULT_NOISE[self.kind.value])
        if not 0.0 < self.threshold < 1.0:
            raise ValueError("threshold must lie strictly inside (0, 1)")
        if not 0.0 <= self.p_hold <= 1.0:
            raise ValueError("p_hold must lie in [0, 1]")
        if not 0.0 <= self.p_noise <= 1.0:
            raise ValueError("p_noise must lie in [0, 1]")
        if not 0.0 <= self.input_density <= 1.0:
            raise ValueError("input_density must lie in [0, 1]")
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        object.__setattr__(self, "regions", make_regions(self.grid_side))

    def params(self) -> UpdateParams:
        return UpdateParams(p_hold=self.p_hold, p_noise=self.p_noise, rule=self.rule)


@dataclass(frozen=True)
class InputPair:
    a: int
    b: int

    def __post_init__(self) -> None:
        if self.a not in (0, 1) or self.b not in (0, 1):
            raise ValueError("input bits must be 0 or 1")

    @property
    def label(self) -> str:
        return f"{self.a}{self.b}"

    @property
    def index(self) -> int:
        return 2 * self.a + self.b

    @classmethod
    def all_pairs(cls) -> tuple["InputPair", ...]:
        return (cls(0, 0), cls(0, 1), cls(1, 0), cls(1, 1))


@dataclass(frozen=True)
class TrialRecord:
    inputs: InputPair
    cover: int
    output: int
    seed_path: tuple[int, ...]
    snapshots: tuple[tuple[int, np.ndarray], ...] | None = None


@dataclass(frozen=True)
class PairStats:
    trials: int
    ones: int

    @property
    def probability_of_one(self) -> float:
        return self.ones / self.trials


@dataclass(frozen=True)
class TruthTableEstimate:
    """P(output = 1) per input pair, keyed by '00'/'01'/'10'/'11'."""

    per_pair: dict[str, PairStats]

    def probability(self, label: str) -> float:
        return self.per_pair[label].probability_of_one


@dataclass(frozen=True)
class CoverHistogram:
    """Left-closed histogram of output-region cover, bins of ``bin_width`` cells."""

    pair: str
    bin_width: int
    bins: tuple[tuple[int, int], ...]  # (bin index, frequency)


@dataclass(frozen=True)
class TruthTableResult:
    estimate: TruthTableEstimate
    histograms: tuple[CoverHistogram, ...]
    records: tuple[TrialRecord, ...]


def encode_inputs(grid: Grid, inputs: InputPair, config: GateConfig,
                  rng: RngStream) -> Grid:
    """Seed the input regions of an all-dead gate grid.

    A 1 bit fills its region at ``input_density``; a 0 bit leaves its region
    (and everything else) dead.
    """
    n = config.grid_side
    if grid.shape != (n, n):
        raise ValueError(f"grid must be {n}x{n}, got {grid.shape}")
    if grid.population() != 0:
        raise ValueError("encode_inputs requires an all-dead starting grid")
    out = grid.copy()
    if inputs.a:
        out = random_fill(out, config.regions.input_a, config.input_density,
                          rng.child(FILL_DRAW, 0))
    if inputs.b:
        out = random_fill(out, config.regions.input_b, config.input_density,
                          rng.child(FILL_DRAW, 1))
    return out


def readout(cover: int, region_size: int, threshold: float) -> int:
    """1 iff the cover strictly exceeds threshold x region_size."""
    if not 0 <= cover <= region_size:
        raise ValueError(f"cover {cover} outside [0, {region_size}]")
    return 1 if cover > threshold * region_size else 0


def run_gate_trial(config: GateConfig, inputs: InputPair, trial_index: int,
                   master_seed: int,
                   snapshot_steps: tuple[int, ...] | None = None) -> TrialRecord:
    """One gate evaluation: encode, evolve for the horizon, read out S(C).

    The trial stream is keyed by (input pair, trial index), so identical
    arguments reproduce the record exactly under any scheduling.
    """
    rng = RngStream(master_seed).child(inputs.index, trial_index)
    grid = Grid.empty(config.grid_side, config.grid_side, config.boundary)
    grid = encode_inputs(grid, inputs, config, rng)
    params = config.params()
    wanted = set(snapshot_steps or ())
    snaps = []
    if 0 in wanted:
        snaps.append((0, grid.cells.copy()))
    for t in range(config.horizon):
        grid = step_async(grid, params, rng, t)
        if (t + 1) in wanted:
            snaps.append((t + 1, grid.cells.copy()))
    cover = int(grid.cells[config.regions.output.slices].sum())
    output = readout(cover, config.regions.output.size, config.threshold)
    return TrialRecord(inputs=inputs, cover=cover, output=output,
                       seed_path=rng.path,
                       snapshots=tuple(snaps) if snapshot_steps else None)


def _gate_worker(task) -> TrialRecord:
    config, pair, trial, master_seed = task
    return run_gate_trial(config, pair, trial, master_seed)


def estimate_truth_table(config: GateConfig, trials: int, master_seed: int,
                         threads: int = 1, bin_width: int = 20) -> TruthTableResult:
    """Run ``trials`` independent trials for each input pair and tally outputs."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    pairs = InputPair.all_pairs()
    tasks = [(config, pair, t, master_seed) for pair in pairs for t in range(trials)]
    records = parallel_map(_gate_worker, tasks, threads)

    per_pair: dict[str, PairStats] = {}
    histograms = []
    for k, pair in enumerate(pairs):
        chunk = records[k * trials:(k + 1) * trials]
        ones = sum(r.output for r in chunk)
        per_pair[pair.label] = PairStats(trials=trials, ones=ones)
        counts = Counter(r.cover // bin_width for r in chunk)
        histograms.append(CoverHistogram(
            pair=pair.label, bin_width=bin_width,
            bins=tuple(sorted(counts.items()))))
    return TruthTableResult(estimate=TruthTableEstimate(per_pair=per_pair),
                            histograms=tuple(histograms),
                            records=tuple(records))
