"""Experiment configuration: defaults, TOML loading, validation.

Every experiment variant has a dataclass whose defaults are the reference
parameters, so running a bare subcommand reproduces the reference setup.
Config files are TOML documents with one table per experiment variant;
validation errors name the offending field as ``table.key``.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .engine import BoundaryMode, RuleVariant
from .gates import GateConfig, GateKind
from .percolation import PercolationConfig, default_porosities
from .phase import DecayConfig, FrozenCriterion, SweepConfig, default_sweep_p_values

__all__ = [
    "ConfigError",
    "SweepPhaseExperiment",
    "DecayExperiment",
    "GliderSweepExperiment",
    "GateExperiment",
    "PercolateExperiment",
    "GliderDemoExperiment",
    "EXPERIMENTS",
    "experiment_from_table",
    "load_config_file",
    "default_glider_p_values",
]


class ConfigError(ValueError):
    """Invalid configuration; ``field`` is the dotted path of the bad value."""

    def __init__(self, field_path: str, message: str):
        self.field = field_path
        super().__init__(f"{field_path}: {message}")


class _Reader:
    """Typed, range-checked access to one experiment table."""

    def __init__(self, table: dict, prefix: str):
        self.table = dict(table)
        self.prefix = prefix
        self.seen: set[str] = set()

    def _fetch(self, key, default):
        self.seen.add(key)
        return self.table.get(key, default)

    def error(self, key: str, message: str):
        raise ConfigError(f"{self.prefix}.{key}", message)

    def number(self, key, default, lo=None, hi=None, integer=False):
        value = self._fetch(key, default)
        if value is None:
            return None
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            self.error(key, f"expected a number, got {value!r}")
        if integer:
            if float(value) != int(value):
                self.error(key, f"expected an integer, got {value!r}")
            value = int(value)
        else:
            value = float(value)
        if lo is not None and value < lo:
            self.error(key, f"must be >= {lo}, got {value}")
        if hi is not None and value > hi:
            self.error(key, f"must be <= {hi}, got {value}")
        return value

    def integer(self, key, default, lo=None, hi=None):
        return self.number(key, default, lo, hi, integer=True)

    def boolean(self, key, default):
        value = self._fetch(key, default)
        if not isinstance(value, bool):
            self.error(key, f"expected true/false, got {value!r}")
        return value

    def choice(self, key, default, choices):
        value = self._fetch(key, default)
        if value not in choices:
            self.error(key, f"expected one of {sorted(choices)}, got {value!r}")
        return value

    def number_list(self, key, default, lo=None, hi=None):
        value = self._fetch(key, default)
        if value is None:
            return None
        if not isinstance(value, (list, tuple)) or \
                any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in value):
            self.error(key, f"expected a list of numbers, got {value!r}")
        out = []
        for v in value:
            if lo is not None and v < lo:
                self.error(key, f"all entries must be >= {lo}, got {v}")
            if hi is not None and v > hi:
                self.error(key, f"all entries must be <= {hi}, got {v}")
            out.append(float(v))
        return tuple(out)

    def integer_list(self, key, default):
        value = self._fetch(key, default)
        if value is None:
            return None
        if not isinstance(value, (list, tuple)) or \
                any(isinstance(v, bool) or not isinstance(v, int) for v in value):
            self.error(key, f"expected a list of integers, got {value!r}")
        return tuple(int(v) for v in value)

    def rule(self):
        name = self.choice("rule", RuleVariant.CONWAY_B3S23.value,
                           {r.value for r in RuleVariant})
        return RuleVariant(name)

    def boundary(self, default: BoundaryMode):
        name = self.choice("boundary", default.value,
                           {b.value for b in BoundaryMode})
        return BoundaryMode(name)

    def grid(self, key, start_key, stop_key, step_key, default):
        """A probability grid: an explicit list, or a start/stop/step trio."""
        explicit = self.number_list(key, None, lo=0.0, hi=1.0)
        has_trio = any(k in self.table for k in (start_key, stop_key, step_key))
        if explicit is not None:
            if has_trio:
                self.error(key, f"give either {key} or {start_key}/{stop_key}/{step_key}")
            return explicit
        if has_trio:
            start = self.number(start_key, None, lo=0.0, hi=1.0)
            stop = self.number(stop_key, None, lo=0.0, hi=1.0)
            step = self.number(step_key, None)
            if start is None or stop is None or step is None:
                self.error(key, f"{start_key}, {stop_key} and {step_key} must all be set")
            if step <= 0 or stop < start:
                self.error(step_key, "step must be > 0 and stop >= start")
            count = int(round((stop - start) / step)) + 1
            return tuple(round(start + k * step, 10) for k in range(count))
        return default

    def finish(self):
        unknown = set(self.table) - self.seen
        if unknown:
            key = sorted(unknown)[0]
            self.error(key, "unknown configuration key")


def default_glider_p_values() -> tuple[float, ...]:
    """Coarse 0..0.40 scan, denser inside the transition window."""
    coarse = {round(0.02 * k, 3) for k in range(21)}
    dense = {round(0.09 + 0.005 * k, 3) for k in range(17)}
    return tuple(sorted(coarse | dense))


@dataclass(frozen=True)
class SweepPhaseExperiment:
    name = "sweep-phase"

    grid_side: int = 500
    p_values: tuple[float, ...] = field(default_factory=default_sweep_p_values)
    trials_per_p: int = 100
    init_density: float = 0.5
    max_steps: int = 10_000
    check_interval: int = 10
    rule: RuleVariant = RuleVariant.CONWAY_B3S23
    boundary: BoundaryMode = BoundaryMode.PERIODIC

    @classmethod
    def from_table(cls, table: dict, prefix: str = "sweep-phase"):
        r = _Reader(table, prefix)
        obj = cls(
            grid_side=r.integer("grid_side", 500, lo=3),
            p_values=r.grid("p_values", "p_start", "p_stop", "p_step",
                            default_sweep_p_values()),
            trials_per_p=r.integer("trials_per_p", 100, lo=1),
            init_density=r.number("init_density", 0.5, lo=0.0, hi=1.0),
            max_steps=r.integer("max_steps", 10_000, lo=1),
            check_interval=r.integer("check_interval", 10, lo=1),
            rule=r.rule(),
            boundary=r.boundary(BoundaryMode.PERIODIC),
        )
        r.finish()
        return obj

    def build(self) -> SweepConfig:
        try:
            return SweepConfig(
                grid_side=self.grid_side, p_values=self.p_values,
                trials_per_p=self.trials_per_p, init_density=self.init_density,
                criterion=FrozenCriterion(self.max_steps, self.check_interval),
                rule=self.rule, boundary=self.boundary)
        except ValueError as exc:
            raise ConfigError(f"{self.name}.p_values", str(exc)) from exc

    def to_table(self) -> dict:
        return {"grid_side": self.grid_side, "p_values": list(self.p_values),
                "trials_per_p": self.trials_per_p, "init_density": self.init_density,
                "max_steps": self.max_steps, "check_interval": self.check_interval,
                "rule": self.rule.value, "boundary": self.boundary.value}


@dataclass(frozen=True)
class DecayExperiment:
    name = "decay"

    grid_side: int = 150
    p_hold: float = 0.13
    init_density: float = 0.590
    trials: int = 20
    steps: int = 10_000
    fit_window: tuple[float, float] = (100.0, 10_000.0)
    rule: RuleVariant = RuleVariant.CONWAY_B3S23
    boundary: BoundaryMode = BoundaryMode.PERIODIC

    @classmethod
    def from_table(cls, table: dict, prefix: str = "decay"):
        r = _Reader(table, prefix)
        window = r.number_list("fit_window", (100.0, 10_000.0), lo=0.0)
        if window is not None and len(window) != 2:
            r.error("fit_window", "expected [t_min, t_max]")
        obj = cls(
            grid_side=r.integer("grid_side", 150, lo=3),
            p_hold=r.number("p_hold", 0.13, lo=0.0, hi=1.0),
            init_density=r.number("init_density", 0.590, lo=0.0, hi=1.0),
            trials=r.integer("trials", 20, lo=1),
            steps=r.integer("steps", 10_000, lo=1),
            fit_window=tuple(window),
            rule=r.rule(),
            boundary=r.boundary(BoundaryMode.PERIODIC),
        )
        r.finish()
        return obj

    def build(self) -> DecayConfig:
        return DecayConfig(grid_side=self.grid_side, p_hold=self.p_hold,
                           init_density=self.init_density, trials=self.trials,
                           steps=self.steps, rule=self.rule, boundary=self.boundary)

    def to_table(self) -> dict:
        return {"grid_side": self.grid_side, "p_hold": self.p_hold,
                "init_density": self.init_density, "trials": self.trials,
                "steps": self.steps, "fit_window": list(self.fit_window),
                "rule": self.rule.value, "boundary": self.boundary.value}


@dataclass(frozen=True)
class GliderSweepExperiment:
    name = "gliders"

    grid_side: int = 150
    p_values: tuple[float, ...] = field(default_factory=default_glider_p_values)
    window_steps: int = 100
    trials: int = 20
    init_density: float = 0.5
    margin: int = 1
    fit_degree: int = 4
    record_placements: bool = False
    rule: RuleVariant = RuleVariant.CONWAY_B3S23

    @classmethod
    def from_table(cls, table: dict, prefix: str = "gliders"):
        r = _Reader(table, prefix)
        obj = cls(
            grid_side=r.integer("grid_side", 150, lo=3),
            p_values=r.grid("p_values", "p_start", "p_stop", "p_step",
                            default_glider_p_values()),
            window_steps=r.integer("window_steps", 100, lo=1),
            trials=r.integer("trials", 20, lo=1),
            init_density=r.number("init_density", 0.5, lo=0.0, hi=1.0),
            margin=r.integer("margin", 1, lo=0),
            fit_degree=r.integer("fit_degree", 4, lo=0),
            record_placements=r.boolean("record_placements", False),
            rule=r.rule(),
        )
        r.finish()
        return obj

    def to_table(self) -> dict:
        return {"grid_side": self.grid_side, "p_values": list(self.p_values),
                "window_steps": self.window_steps, "trials": self.trials,
                "init_density": self.init_density, "margin": self.margin,
                "fit_degree": self.fit_degree,
                "record_placements": self.record_placements,
                "rule": self.rule.value}


@dataclass(frozen=True)
class GateExperiment:
    name = "gate"

    kind: GateKind = GateKind.AND
    grid_side: int = 100
    horizon: int = 1500
    threshold: float = 0.1
    p_hold: float = 0.13
    p_noise: float | None = None  # None resolves to the kind's default noise
    input_density: float = 0.5
    trials: int = 100
    bin_width: int = 20
    snapshot_steps: tuple[int, ...] = (0, 100, 500, 1000, 1500)
    save_snapshots: bool = True
    rule: RuleVariant = RuleVariant.CONWAY_B3S23

    def __post_init__(self):
        object.__setattr__(self, "kind", GateKind(self.kind))
        if self.p_noise is None:
            from .gates import DEFAULT_NOISE
            object.__setattr__(self, "p_noise", DEFAULT_NOISE[self.kind.value])

    @classmethod
    def from_table(cls, table: dict, prefix: str = "gate"):
        r = _Reader(table, prefix)
        kind = GateKind(r.choice("kind", "and", {k.value for k in GateKind}))
        p_noise = r.number("p_noise", None, lo=0.0, hi=1.0)
        snapshot_steps = r.integer_list("snapshot_steps", (0, 100, 500, 1000, 1500))
        obj = cls(
            kind=kind,
            grid_side=r.integer("grid_side", 100, lo=9),
            horizon=r.integer("horizon", 1500, lo=1),
            threshold=r.number("threshold", 0.1),
            p_hold=r.number("p_hold", 0.13, lo=0.0, hi=1.0),
            p_noise=p_noise,
            input_density=r.number("input_density", 0.5, lo=0.0, hi=1.0),
            trials=r.integer("trials", 100, lo=1),
            bin_width=r.integer("bin_width", 20, lo=1),
            snapshot_steps=snapshot_steps,
            save_snapshots=r.boolean("save_snapshots", True),
            rule=r.rule(),
        )
        r.finish()
        return obj

    def build(self) -> GateConfig:
        try:
            return GateConfig(kind=self.kind, grid_side=self.grid_side,
                              horizon=self.horizon, threshold=self.threshold,
                              p_hold=self.p_hold, p_noise=self.p_noise,
                              input_density=self.input_density, rule=self.rule)
        except ValueError as exc:
            raise ConfigError(f"{self.name}.threshold", str(exc)) from exc

    def to_table(self) -> dict:
        return {"kind": self.kind.value, "grid_side": self.grid_side,
                "horizon": self.horizon, "threshold": self.threshold,
                "p_hold": self.p_hold,
                "p_noise": self.p_noise,
                "input_density": self.input_density, "trials": self.trials,
                "bin_width": self.bin_width,
                "snapshot_steps": list(self.snapshot_steps),
                "save_snapshots": self.save_snapshots,
                "rule": self.rule.value}


@dataclass(frozen=True)
class PercolateExperiment:
    name = "percolate"

    side: int = 500
    porosities: tuple[float, ...] = field(default_factory=default_porosities)
    trials: int = 200
    wrap: bool = True

    @classmethod
    def from_table(cls, table: dict, prefix: str = "percolate"):
        r = _Reader(table, prefix)
        obj = cls(
            side=r.integer("side", 500, lo=2),
            porosities=r.grid("porosities", "p_start", "p_stop", "p_step",
                              default_porosities()),
            trials=r.integer("trials", 200, lo=1),
            wrap=r.boolean("wrap", True),
        )
        r.finish()
        return obj

    def build(self) -> PercolationConfig:
        return PercolationConfig(side=self.side, porosities=self.porosities,
                                 trials=self.trials, wrap=self.wrap)

    def to_table(self) -> dict:
        return {"side": self.side, "porosities": list(self.porosities),
                "trials": self.trials, "wrap": self.wrap}


@dataclass(frozen=True)
class GliderDemoExperiment:
    name = "glider-demo"

    grid_side: int = 100
    steps: int = 500
    noise_onset: int = 200
    p_noise: float = 1e-4
    snapshot_every: int = 100

    @classmethod
    def from_table(cls, table: dict, prefix: str = "glider-demo"):
        r = _Reader(table, prefix)
        obj = cls(
            grid_side=r.integer("grid_side", 100, lo=8),
            steps=r.integer("steps", 500, lo=1),
            noise_onset=r.integer("noise_onset", 200, lo=0),
            p_noise=r.number("p_noise", 1e-4, lo=0.0, hi=1.0),
            snapshot_every=r.integer("snapshot_every", 100, lo=1),
        )
        r.finish()
        return obj

    def to_table(self) -> dict:
        return {"grid_side": self.grid_side, "steps": self.steps,
                "noise_onset": self.noise_onset, "p_noise": self.p_noise,
                "snapshot_every": self.snapshot_every}


EXPERIMENTS = {
    cls.name: cls
    for cls in (SweepPhaseExperiment, DecayExperiment, GliderSweepExperiment,
                GateExperiment, PercolateExperiment, GliderDemoExperiment)
}


def experiment_from_table(name: str, table: dict):
    if name not in EXPERIMENTS:
        raise ConfigError(name, f"unknown experiment (expected one of {sorted(EXPERIMENTS)})")
    return EXPERIMENTS[name].from_table(table, prefix=name)


def load_config_file(path: str | Path, name: str):
    """Experiment config from the named table of a TOML file (defaults if absent)."""
    raw = Path(path).read_bytes()
    try:
        document = tomllib.loads(raw.decode("utf-8"))
    except (tomllib.TOMLDecodeError, UnicodeDecodeError) as exc:
        raise ConfigError(str(path), f"not valid TOML: {exc}") from exc
    table = document.get(name, {})
    if not isinstance(table, dict):
        raise ConfigError(name, "expected a table")
    return experiment_from_table(name, table)
