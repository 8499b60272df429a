"""Pattern text format, canonical small patterns, and grid transforms.

Pattern files are plain text: one grid row per line of '0'/'1' characters,
optionally preceded by a "width height" header line.  Grid snapshots are
exported in the same format.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .engine import BoundaryMode, Grid, RuleVariant, step_sync

__all__ = [
    "parse_cells",
    "format_cells",
    "load_grid",
    "save_grid",
    "dihedral_transforms",
    "crop_to_content",
    "glider_phases",
    "GLIDER",
    "BLINKER",
    "BLOCK",
    "BEEHIVE",
    "LOAF",
]


def parse_cells(text: str) -> np.ndarray:
    """Parse '0'/'1' rows into a uint8 matrix; a leading "w h" header is allowed."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty pattern text")
    header: tuple[int, int] | None = None
    first = lines[0].split()
    if len(first) == 2 and all(tok.isdigit() for tok in first):
        # Rows never contain whitespace, so two tokens can only be a header.
        header = (int(first[0]), int(first[1]))
        lines = lines[1:]
        if not lines:
            raise ValueError("pattern header without body")
    rows = []
    width = None
    for ln in lines:
        if not ln or not set(ln) <= {"0", "1"}:
            raise ValueError(f"invalid pattern row: {ln!r}")
        if width is None:
            width = len(ln)
        elif len(ln) != width:
            raise ValueError("pattern rows have unequal lengths")
        rows.append([1 if ch == "1" else 0 for ch in ln])
    arr = np.array(rows, dtype=np.uint8)
    if header is not None and (header[0] != arr.shape[1] or header[1] != arr.shape[0]):
        raise ValueError(f"header {header} does not match body shape {arr.shape[::-1]}")
    return arr


def format_cells(cells: np.ndarray, header: bool = False) -> str:
    """Render a 0/1 matrix as pattern text (optionally with a "w h" header)."""
    arr = np.asarray(cells, dtype=np.uint8)
    lines = ["".join("1" if v else "0" for v in row) for row in arr]
    if header:
        lines.insert(0, f"{arr.shape[1]} {arr.shape[0]}")
    return "\n".join(lines) + "\n"


def load_grid(path: str | Path, boundary: BoundaryMode = BoundaryMode.PERIODIC) -> Grid:
    return Grid.from_array(parse_cells(Path(path).read_text()), boundary)


def save_grid(grid: Grid, path: str | Path, header: bool = True) -> None:
    Path(path).write_text(format_cells(grid.cells, header=header))


def dihedral_transforms(cells: np.ndarray) -> list[np.ndarray]:
    """All 8 rotations/reflections of a matrix (with duplicates when symmetric)."""
    out = []
    m = np.asarray(cells)
    for _ in range(4):
        out.append(m.copy())
        out.append(np.fliplr(m).copy())
        m = np.rot90(m)
    return out


def crop_to_content(cells: np.ndarray) -> np.ndarray:
    """Tight bounding box of the live cells (errors on an all-dead matrix)."""
    arr = np.asarray(cells)
    rows = np.flatnonzero(arr.any(axis=1))
    cols = np.flatnonzero(arr.any(axis=0))
    if rows.size == 0:
        raise ValueError("cannot crop an empty pattern")
    return arr[rows[0]:rows[-1] + 1, cols[0]:cols[-1] + 1].copy()


GLIDER = parse_cells("""
010
001
111
""")

BLINKER = parse_cells("111")

BLOCK = parse_cells("""
11
11
""")

BEEHIVE = parse_cells("""
0110
1001
0110
""")

LOAF = parse_cells("""
0110
1001
0101
0010
""")


def glider_phases() -> list[np.ndarray]:
    """The four synchronous glider phases, each cropped to its bounding box."""
    grid = Grid.empty(12, 12, BoundaryMode.FIXED_ZERO)
    grid.cells[4:7, 4:7] = GLIDER
    phases = []
    for _ in range(4):
        phases.append(crop_to_content(grid.cells))
        grid = step_sync(grid, RuleVariant.CONWAY_B3S23)
    return phases
