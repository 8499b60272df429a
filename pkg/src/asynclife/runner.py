"""Experiment dispatch: run a configured experiment, emit files, write a manifest.

Every run produces CSV/JSON data files plus ``manifest.json`` recording the
experiment name, the fully resolved configuration, the master seed and the
produced files; re-running from a manifest reproduces the data files
byte-for-byte.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .config import (
    ConfigError,
    DecayExperiment,
    GateExperiment,
    GliderDemoExperiment,
    GliderSweepExperiment,
    PercolateExperiment,
    SweepPhaseExperiment,
    experiment_from_table,
)
from .engine import BoundaryMode, Grid, RuleVariant, UpdateParams, place_pattern, step_async
from .fits import fit_polynomial, fit_power_law, fit_sigmoid
from .gates import InputPair, estimate_truth_table, run_gate_trial
from .gliders import occurrence_sweep
from .patterns import GLIDER, format_cells
from .percolation import success_curve
from .phase import measure_density_decay, sweep_frozen_probability
from .rng import RngStream
from .svg import render_curve, render_grid, render_histogram

__all__ = ["RunManifest", "run_experiment", "parse_manifest", "glider_demo"]


@dataclass(frozen=True)
class RunManifest:
    experiment: str
    config: dict
    master_seed: int
    rule: str
    boundary: str
    code_version: str
    numpy_version: str
    threads: int
    started_at: str
    finished_at: str
    outputs: tuple[str, ...]

    def to_json(self) -> str:
        payload = {
            "experiment": self.experiment,
            "config": self.config,
            "master_seed": self.master_seed,
            "rule": self.rule,
            "boundary": self.boundary,
            "code_version": self.code_version,
            "numpy_version": self.numpy_version,
            "threads": self.threads,
            "started_at": self.started_at,
            "finished_at": self.finished_at,
            "outputs": list(self.outputs),
        }
        return json.dumps(payload, indent=2) + "\n"


def parse_manifest(path: str | Path):
    """(experiment config, master seed) from a previously written manifest."""
    try:
        payload = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(str(path), f"not valid manifest JSON: {exc}") from exc
    for key in ("experiment", "config", "master_seed"):
        if key not in payload:
            raise ConfigError(str(path), f"manifest is missing {key!r}")
    experiment = experiment_from_table(payload["experiment"], payload["config"])
    return experiment, int(payload["master_seed"])


class _OutputDir:
    """Collects written files so the manifest can list them."""

    def __init__(self, root: Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.files: list[str] = []

    def write_text(self, name: str, text: str) -> None:
        (self.root / name).write_text(text)
        self.files.append(name)

    def write_csv(self, name: str, header: list[str], rows) -> None:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(row)
        self.write_text(name, buf.getvalue())

    def write_json(self, name: str, payload: dict) -> None:
        self.write_text(name, json.dumps(payload, indent=2) + "\n")


# --- glider demo -----------------------------------------------------------

def glider_demo(config: GliderDemoExperiment, master_seed: int):
    """A synchronous glider flight with noise switched on at ``noise_onset``.

    Returns (live_counts, snapshots): the live-cell count at every step
    (index 0 = initial grid) and [(step, cells)] snapshots every
    ``snapshot_every`` steps.
    """
    rng = RngStream(master_seed).child("glider-demo")
    side = config.grid_side
    grid = place_pattern(Grid.empty(side, side, BoundaryMode.PERIODIC),
                         GLIDER, (side // 3, side // 3))
    quiet = UpdateParams(p_hold=0.0, p_noise=0.0)
    noisy = UpdateParams(p_hold=0.0, p_noise=config.p_noise)
    counts = [grid.population()]
    snapshots = [(0, grid.cells.copy())]
    for t in range(config.steps):
        params = noisy if t >= config.noise_onset else quiet
        grid = step_async(grid, params, rng, t)
        counts.append(grid.population())
        if (t + 1) % config.snapshot_every == 0:
            snapshots.append((t + 1, grid.cells.copy()))
    return counts, snapshots


# --- per-experiment runners --------------------------------------------------

def _run_sweep_phase(exp: SweepPhaseExperiment, seed: int, out: _OutputDir, threads: int):
    points = sweep_frozen_probability(exp.build(), seed, threads=threads)
    out.write_csv("sweep.csv", ["p", "trials", "frozen_count", "frozen_probability"],
                  [(pt.p, pt.trials, pt.frozen_count, pt.frozen_probability)
                   for pt in points])
    xs = [pt.p for pt in points]
    ys = [pt.frozen_probability for pt in points]
    overlay = None
    try:
        fit = fit_sigmoid(xs, ys)
        out.write_json("sigmoid_fit.json", fit.to_dict())
        dense = np.linspace(min(xs), max(xs), 200)
        overlay = list(zip(dense, fit.evaluate(dense)))
    except ValueError:
        out.write_json("sigmoid_fit.json",
                       {"error": "degenerate data: no transition in sweep window"})
    out.write_text("sweep.svg", render_curve(
        list(zip(xs, ys)), overlay=overlay, x_label="hold probability p",
        y_label="frozen probability", title="frozen-state probability"))


def _run_decay(exp: DecayExperiment, seed: int, out: _OutputDir, threads: int):
    curve = measure_density_decay(exp.build(), seed, threads=threads)
    out.write_csv("decay.csv", ["step", "mean_density", "trials"],
                  [(step, dens, exp.trials) for step, dens in curve])
    xs = np.array([s for s, _ in curve], dtype=float)
    ys = np.array([d for _, d in curve], dtype=float)
    overlay = None
    try:
        fit = fit_power_law(xs, ys, exp.fit_window)
        out.write_json("power_fit.json", fit.to_dict())
        lo, hi = exp.fit_window
        dense = np.geomspace(max(lo, 1.0), hi, 200)
        overlay = list(zip(dense, fit.evaluate(dense)))
    except ValueError as exc:
        out.write_json("power_fit.json", {"error": str(exc)})
    points = [(x, y) for x, y in zip(xs, ys) if x > 0 and y > 0]
    if points:
        out.write_text("decay.svg", render_curve(
            points, overlay=overlay, log_x=True, log_y=True, markers=False,
            x_label="step", y_label="mean density", title="density decay"))


def _run_gliders(exp: GliderSweepExperiment, seed: int, out: _OutputDir, threads: int):
    base = UpdateParams(p_hold=0.0, p_noise=0.0, rule=exp.rule)
    result = occurrence_sweep(
        exp.p_values, side=exp.grid_side, window_steps=exp.window_steps,
        trials=exp.trials, base=base, master_seed=seed, threads=threads,
        margin=exp.margin, init_density=exp.init_density,
        record_placements=exp.record_placements)
    if exp.record_placements:
        curve, placements = result
        for p, rows in placements.items():
            out.write_csv(f"placements_p{p:g}.csv",
                          ["step", "template_id", "row", "col"], rows)
    else:
        curve = result
    out.write_csv("occurrence.csv",
                  ["p", "total_detections", "trials", "window_steps",
                   "grid_side", "rate"],
                  [(p, tot, curve.trials, curve.window_steps, curve.grid_side, rate)
                   for (p, rate), tot in zip(curve.points, curve.totals)])
    xs = [p for p, _ in curve.points]
    ys = [rate for _, rate in curve.points]
    overlay = None
    if len(xs) > exp.fit_degree:
        fit = fit_polynomial(xs, ys, degree=exp.fit_degree)
        out.write_json("polynomial_fit.json", fit.to_dict())
        dense = np.linspace(min(xs), max(xs), 200)
        overlay = list(zip(dense, fit.evaluate(dense)))
    out.write_text("occurrence.svg", render_curve(
        list(zip(xs, ys)), overlay=overlay, x_label="hold probability p",
        y_label="gliders per cell per step", title="glider occurrence"))


def _run_gate(exp: GateExperiment, seed: int, out: _OutputDir, threads: int):
    config = exp.build()
    result = estimate_truth_table(config, exp.trials, seed, threads=threads,
                                  bin_width=exp.bin_width)
    gate = config.kind.value
    out.write_csv("trials.csv",
                  ["gate", "input_a", "input_b", "trial", "cover", "output"],
                  [(gate, rec.inputs.a, rec.inputs.b, t % exp.trials, rec.cover,
                    rec.output)
                   for t, rec in enumerate(result.records)])
    out.write_json("truth_table.json", {
        "gate": gate,
        "trials": exp.trials,
        "pairs": {label: {"trials": stats.trials, "ones": stats.ones,
                          "probability_of_one": stats.probability_of_one}
                  for label, stats in result.estimate.per_pair.items()},
    })
    out.write_csv("histograms.csv",
                  ["gate", "pair", "bin", "frequency", "bin_width"],
                  [(gate, hist.pair, b, freq, hist.bin_width)
                   for hist in result.histograms for b, freq in hist.bins])
    threshold_cover = config.threshold * config.regions.output.size
    for hist in result.histograms:
        out.write_text(f"hist_{hist.pair}.svg", render_histogram(
            [(b, f) for b, f in hist.bins], bar_width=1.0,
            marker=threshold_cover / hist.bin_width,
            x_label=f"cover / {hist.bin_width}",
            title=f"{gate.upper()} gate, inputs {hist.pair}"))
    labels = sorted(result.estimate.per_pair)
    out.write_text("truth_table.svg", render_histogram(
        [(k, result.estimate.per_pair[lab].probability_of_one)
         for k, lab in enumerate(labels)],
        bar_width=0.8, x_label="input pair (00, 01, 10, 11)",
        y_label="P(output = 1)", title=f"{gate.upper()} gate truth table"))
    if exp.save_snapshots:
        steps = tuple(s for s in exp.snapshot_steps if s <= config.horizon)
        regions = (config.regions.input_a, config.regions.input_b,
                   config.regions.output)
        for pair in InputPair.all_pairs():
            record = run_gate_trial(config, pair, 0, seed, snapshot_steps=steps)
            for step, cells in record.snapshots:
                out.write_text(f"snapshot_{pair.label}_t{step:04d}.svg",
                               render_grid(cells, cell_size=4, regions=regions,
                                           title=f"{gate.upper()} {pair.label} t={step}"))


def _run_percolate(exp: PercolateExperiment, seed: int, out: _OutputDir, threads: int):
    result = success_curve(exp.build(), seed, threads=threads)
    out.write_csv("percolation.csv",
                  ["porosity", "trials", "success_count", "success_rate"],
                  [(p, result.trials, c, r)
                   for p, c, r in zip(result.porosities, result.success_counts,
                                      result.success_rates)])
    summary = {"trials": result.trials,
               "estimated_threshold": result.estimated_threshold}
    if result.fit is not None:
        summary["fit"] = result.fit.to_dict()
    out.write_json("percolation_summary.json", summary)
    overlay = None
    if result.fit is not None:
        dense = np.linspace(min(result.porosities), max(result.porosities), 200)
        overlay = list(zip(dense, result.fit.evaluate(dense)))
    out.write_text("percolation.svg", render_curve(
        list(zip(result.porosities, result.success_rates)), overlay=overlay,
        x_label="porosity", y_label="success rate", title="directed percolation"))


def _run_glider_demo(exp: GliderDemoExperiment, seed: int, out: _OutputDir, threads: int):
    counts, snapshots = glider_demo(exp, seed)
    out.write_csv("live_counts.csv", ["step", "live_count"],
                  list(enumerate(counts)))
    for step, cells in snapshots:
        out.write_text(f"snapshot_t{step:04d}.txt", format_cells(cells, header=True))
        out.write_text(f"snapshot_t{step:04d}.svg",
                       render_grid(cells, cell_size=4, title=f"t={step}"))
    out.write_text("live_counts.svg", render_curve(
        list(enumerate(counts)), markers=False, x_label="step",
        y_label="live cells", title="glider under noise"))


_RUNNERS = {
    SweepPhaseExperiment: _run_sweep_phase,
    DecayExperiment: _run_decay,
    GliderSweepExperiment: _run_gliders,
    GateExperiment: _run_gate,
    PercolateExperiment: _run_percolate,
    GliderDemoExperiment: _run_glider_demo,
}


def _rule_of(exp) -> str:
    return getattr(exp, "rule", RuleVariant.CONWAY_B3S23).value


def _boundary_of(exp) -> str:
    if isinstance(exp, GateExperiment):
        return BoundaryMode.FIXED_ZERO.value
    return getattr(exp, "boundary", BoundaryMode.PERIODIC).value


def run_experiment(experiment, master_seed: int, out_dir: str | Path,
                   threads: int = 1) -> RunManifest:
    """Run one configured experiment, writing outputs and a manifest."""
    runner = _RUNNERS.get(type(experiment))
    if runner is None:
        raise ConfigError("experiment", f"unsupported experiment {experiment!r}")
    out = _OutputDir(Path(out_dir))
    started = datetime.now(timezone.utc).isoformat()
    runner(experiment, master_seed, out, threads)
    manifest = RunManifest(
        experiment=experiment.name,
        config=experiment.to_table(),
        master_seed=master_seed,
        rule=_rule_of(experiment),
        boundary=_boundary_of(experiment),
        code_version=__version__,
        numpy_version=np.__version__,
        threads=threads,
        started_at=started,
        finished_at=datetime.now(timezone.utc).isoformat(),
        outputs=tuple(out.files),
    )
    (out.root / "manifest.json").write_text(manifest.to_json())
    return manifest
