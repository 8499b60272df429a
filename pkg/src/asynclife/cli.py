"""Command-line front end.

Subcommands: sweep-phase, decay, gliders, gate, percolate, glider-demo,
render.  Global flags: --seed, --threads, --out, --config.  Exit codes:
0 success, 2 configuration/validation error, 1 runtime error.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from pathlib import Path

from .config import EXPERIMENTS, ConfigError, load_config_file
from .patterns import load_grid
from .runner import parse_manifest, run_experiment
from .svg import render_curve, render_grid, render_histogram

OUT_ENV_VAR = "ASYNCLIFE_OUT"

# Per-experiment CLI overrides: flag -> config key.
_OVERRIDES = {
    "sweep-phase": {"grid-side": "grid_side", "trials": "trials_per_p",
                    "max-steps": "max_steps", "rule": "rule"},
    "decay": {"grid-side": "grid_side", "trials": "trials", "steps": "steps",
              "p-hold": "p_hold", "rule": "rule"},
    "gliders": {"grid-side": "grid_side", "trials": "trials",
                "window-steps": "window_steps", "rule": "rule"},
    "gate": {"kind": "kind", "trials": "trials", "noise": "p_noise",
             "horizon": "horizon", "rule": "rule"},
    "percolate": {"side": "side", "trials": "trials"},
    "glider-demo": {"steps": "steps", "noise": "p_noise",
                    "noise-onset": "noise_onset"},
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="asynclife",
        description="Asynchronous Game of Life laboratory: critical-point "
                    "experiments and probabilistic logic gates.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--seed", type=int, default=None,
                       help="master seed (default 0, or the manifest's seed "
                            "when rerunning one)")
        p.add_argument("--threads", type=int, default=1,
                       help="worker processes for trial-level parallelism")
        p.add_argument("--out", type=Path, default=None,
                       help=f"output directory (default ${OUT_ENV_VAR} or ./runs/<command>)")
        p.add_argument("--config", type=Path, default=None,
                       help="TOML config file or manifest.json to rerun")

    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        add_common(p)
        for flag, key in _OVERRIDES.get(name, {}).items():
            p.add_argument(f"--{flag}", dest=f"ov_{key}", default=None,
                           help=f"override {key}")

    render = sub.add_parser("render", help="render a file to SVG")
    render.add_argument("kind", choices=["grid", "curve", "histogram"])
    render.add_argument("input", type=Path, help="pattern text or CSV file")
    render.add_argument("--out", type=Path, default=None)
    render.add_argument("--out-file", default=None, help="output SVG name")
    render.add_argument("--x-col", default=None, help="CSV column for x")
    render.add_argument("--y-col", default=None, help="CSV column for y")
    render.add_argument("--log-x", action="store_true")
    render.add_argument("--log-y", action="store_true")
    render.add_argument("--log-log", action="store_true")
    render.add_argument("--cell-size", type=int, default=6)
    render.add_argument("--title", default="")
    return parser


def _out_dir(args, command: str) -> Path:
    if args.out is not None:
        return args.out
    env = os.environ.get(OUT_ENV_VAR)
    if env:
        return Path(env)
    return Path("runs") / command


def _coerce(raw: str, reference):
    if isinstance(reference, bool):
        return raw.lower() in ("1", "true", "yes", "on")
    if isinstance(reference, int) and not isinstance(reference, bool):
        return int(raw)
    if isinstance(reference, float):
        return float(raw)
    return raw


def _load_experiment(command: str, args) -> tuple[object, int | None]:
    """Resolve config file, manifest and per-flag overrides into an experiment."""
    manifest_seed = None
    if args.config is not None:
        if args.config.suffix == ".json":
            experiment, manifest_seed = parse_manifest(args.config)
            if experiment.name != command:
                raise ConfigError(str(args.config),
                                  f"manifest is for {experiment.name!r}, not {command!r}")
        else:
            experiment = load_config_file(args.config, command)
    else:
        experiment = EXPERIMENTS[command].from_table({}, command)

    table = experiment.to_table()
    overridden = False
    for key in _OVERRIDES.get(command, {}).values():
        raw = getattr(args, f"ov_{key}", None)
        if raw is None:
            continue
        reference = table.get(key)
        try:
            table[key] = _coerce(raw, reference)
        except ValueError as exc:
            raise ConfigError(f"{command}.{key}", str(exc)) from exc
        overridden = True
    if overridden:
        experiment = EXPERIMENTS[command].from_table(table, command)
    return experiment, manifest_seed


def _read_csv_columns(path: Path, x_col: str | None, y_col: str | None):
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or len(reader.fieldnames) < 2:
            raise ConfigError(str(path), "CSV must have a header with >= 2 columns")
        x_name = x_col or reader.fieldnames[0]
        y_name = y_col or reader.fieldnames[1]
        for name in (x_name, y_name):
            if name not in reader.fieldnames:
                raise ConfigError(str(path), f"no column {name!r} in CSV header")
        points = []
        for row in reader:
            try:
                points.append((float(row[x_name]), float(row[y_name])))
            except ValueError as exc:
                raise ConfigError(str(path), f"non-numeric value in row {row}") from exc
    return points, x_name, y_name


def _run_render(args) -> int:
    out_dir = _out_dir(args, "render")
    out_dir.mkdir(parents=True, exist_ok=True)
    log_x = args.log_x or args.log_log
    log_y = args.log_y or args.log_log
    if args.kind == "grid":
        grid = load_grid(args.input)
        svg = render_grid(grid, cell_size=args.cell_size, title=args.title)
    else:
        points, x_name, y_name = _read_csv_columns(args.input, args.x_col, args.y_col)
        if not points:
            raise ConfigError(str(args.input), "CSV has no data rows")
        if args.kind == "curve":
            svg = render_curve(points, log_x=log_x, log_y=log_y,
                               x_label=x_name, y_label=y_name, title=args.title)
        else:
            svg = render_histogram(points, x_label=x_name, y_label=y_name,
                                   title=args.title)
    name = args.out_file or f"{args.input.stem}.svg"
    (out_dir / name).write_text(svg)
    print(out_dir / name)
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "render":
            return _run_render(args)
        experiment, manifest_seed = _load_experiment(args.command, args)
        if args.seed is not None:
            seed = args.seed
        elif manifest_seed is not None:
            seed = manifest_seed
        else:
            seed = 0
        out_dir = _out_dir(args, args.command)
        manifest = run_experiment(experiment, seed, out_dir, threads=max(args.threads, 1))
        print(f"{args.command}: wrote {len(manifest.outputs)} files to {out_dir}")
        return 0
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
