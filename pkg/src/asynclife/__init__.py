"""Asynchronous Game of Life laboratory.

Simulation engine for stochastic (alpha-asynchronous) Game of Life, phase
transition and critical-decay experiments, glider census, probabilistic
AND/OR logic gates, and a directed-percolation reference model, with
reproducible seeded runs and CSV/JSON/SVG outputs.
"""

from .engine import (
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
from .fits import fit_polynomial, fit_power_law, fit_sigmoid
from .gates import estimate_truth_table, make_regions, readout, run_gate_trial
from .gliders import build_templates, detect_gliders, occurrence_sweep
from .percolation import percolate_once, success_curve
from .phase import (
    is_quiescent,
    measure_density_decay,
    run_until_frozen,
    sweep_frozen_probability,
)
from .rng import RngStream

__version__ = "0.1.0"

__all__ = [
    "BoundaryMode",
    "Grid",
    "Rect",
    "RngStream",
    "RuleVariant",
    "UpdateParams",
    "apply_noise",
    "build_templates",
    "detect_gliders",
    "estimate_truth_table",
    "fit_polynomial",
    "fit_power_law",
    "fit_sigmoid",
    "is_quiescent",
    "make_regions",
    "measure_density_decay",
    "neighbor_sum",
    "occurrence_sweep",
    "percolate_once",
    "place_pattern",
    "random_fill",
    "readout",
    "run_gate_trial",
    "run_until_frozen",
    "step_async",
    "step_sync",
    "success_curve",
    "sweep_frozen_probability",
    "virtual_next",
    "__version__",
]
