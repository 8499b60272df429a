"""Static SVG rendering for grids, curves and histograms.

Pure string building, no plotting dependency: identical inputs produce
byte-identical documents, which keeps rendered artifacts diffable in tests.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

from .engine import Grid, Rect

__all__ = ["render_grid", "render_curve", "render_histogram"]


def _fmt(x: float) -> str:
    if isinstance(x, float) and x.is_integer():
        return str(int(x))
    return f"{x:.6g}"


def _esc(text: str) -> str:
    return (str(text).replace("&", "&amp;").replace("<", "&lt;")
            .replace(">", "&gt;").replace('"', "&quot;"))


def _document(width: float, height: float, body: list[str]) -> str:
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" '
            f'width="{_fmt(width)}" height="{_fmt(height)}" '
            f'viewBox="0 0 {_fmt(width)} {_fmt(height)}">')
    return "\n".join([head, *body, "</svg>"]) + "\n"


def _text(x: float, y: float, s: str, size: int = 11, anchor: str = "middle",
          cls: str = "label") -> str:
    return (f'<text class="{cls}" x="{_fmt(x)}" y="{_fmt(y)}" '
            f'font-size="{size}" font-family="sans-serif" '
            f'text-anchor="{anchor}">{_esc(s)}</text>')


def render_grid(grid: Grid | np.ndarray, cell_size: int = 6,
                detections: Iterable[tuple[int, int]] = (),
                regions: Iterable[Rect] = (),
                title: str = "") -> str:
    """Grid snapshot: filled squares for live cells.

    ``detections`` are bounding-box origins drawn as red 3x3 outlines;
    ``regions`` are drawn as dashed rectangles.
    """
    cells = grid.cells if isinstance(grid, Grid) else np.asarray(grid)
    h, w = cells.shape
    pad = 1
    top = 18 if title else 1
    width = w * cell_size + 2 * pad
    height = h * cell_size + pad + top
    body = [f'<rect x="0" y="0" width="{_fmt(width)}" height="{_fmt(height)}" '
            f'fill="#ffffff" stroke="#888888"/>']
    if title:
        body.append(_text(width / 2, 13, title))
    for i, j in zip(*np.nonzero(cells)):
        body.append(f'<rect class="cell" x="{_fmt(pad + int(j) * cell_size)}" '
                    f'y="{_fmt(top + int(i) * cell_size)}" '
                    f'width="{cell_size}" height="{cell_size}" fill="#222222"/>')
    for rect in regions:
        body.append(f'<rect class="region" x="{_fmt(pad + rect.col * cell_size)}" '
                    f'y="{_fmt(top + rect.row * cell_size)}" '
                    f'width="{_fmt(rect.width * cell_size)}" '
                    f'height="{_fmt(rect.height * cell_size)}" '
                    f'fill="none" stroke="#3366cc" stroke-dasharray="4,3"/>')
    for r, c in detections:
        body.append(f'<rect class="detection" x="{_fmt(pad + (c - 0.5) * cell_size)}" '
                    f'y="{_fmt(top + (r - 0.5) * cell_size)}" '
                    f'width="{_fmt(4 * cell_size)}" height="{_fmt(4 * cell_size)}" '
                    f'fill="none" stroke="#cc0000" stroke-width="1.5"/>')
    return _document(width, height, body)


def _ticks_linear(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10.0 ** math.floor(math.log10(raw))
    step = min((m for m in (1.0, 2.0, 2.5, 5.0, 10.0)), key=lambda m: abs(m * mag - raw)) * mag
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-12 * step:
        ticks.append(round(t, 12))
        t += step
    return ticks or [lo, hi]


def _ticks_log(lo: float, hi: float) -> list[float]:
    lo_e = math.floor(math.log10(lo))
    hi_e = math.ceil(math.log10(hi))
    return [10.0 ** e for e in range(lo_e, hi_e + 1) if lo <= 10.0 ** e <= hi]


class _Axes:
    """Maps data coordinates onto the plot rectangle."""

    def __init__(self, xs, ys, width, height, log_x, log_y):
        self.ml, self.mr, self.mt, self.mb = 56, 16, 24, 42
        self.width, self.height = width, height
        self.log_x, self.log_y = log_x, log_y
        self.x_lo, self.x_hi = self._bounds(xs, log_x)
        self.y_lo, self.y_hi = self._bounds(ys, log_y)

    @staticmethod
    def _bounds(values, log_scale):
        arr = np.asarray(values, dtype=float)
        if log_scale:
            arr = arr[arr > 0]
            if arr.size == 0:
                raise ValueError("log-scale axis needs positive values")
        lo, hi = float(arr.min()), float(arr.max())
        if lo == hi:
            pad = abs(lo) * 0.05 + (0.5 if lo == 0 else 0.0)
            lo, hi = lo - pad, hi + pad
            if log_scale:
                lo = max(lo, hi / 10.0)
        return lo, hi

    def x(self, v: float) -> float:
        lo, hi = self.x_lo, self.x_hi
        if self.log_x:
            frac = (math.log10(v) - math.log10(lo)) / (math.log10(hi) - math.log10(lo))
        else:
            frac = (v - lo) / (hi - lo)
        return self.ml + frac * (self.width - self.ml - self.mr)

    def y(self, v: float) -> float:
        lo, hi = self.y_lo, self.y_hi
        if self.log_y:
            frac = (math.log10(v) - math.log10(lo)) / (math.log10(hi) - math.log10(lo))
        else:
            frac = (v - lo) / (hi - lo)
        return self.height - self.mb - frac * (self.height - self.mt - self.mb)

    def frame(self, x_label, y_label, title) -> list[str]:
        x0, x1 = self.ml, self.width - self.mr
        y0, y1 = self.mt, self.height - self.mb
        body = [f'<rect x="0" y="0" width="{_fmt(self.width)}" height="{_fmt(self.height)}" fill="#ffffff"/>',
                f'<line class="axis" x1="{x0}" y1="{y1}" x2="{x1}" y2="{y1}" stroke="#000000"/>',
                f'<line class="axis" x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="#000000"/>']
        if title:
            body.append(_text(self.width / 2, 15, title, size=12))
        if x_label:
            body.append(_text((x0 + x1) / 2, self.height - 6, x_label))
        if y_label:
            body.append(f'<g transform="rotate(-90 12 {_fmt((y0 + y1) / 2)})">'
                        + _text(12, (y0 + y1) / 2, y_label) + "</g>")
        x_ticks = _ticks_log(self.x_lo, self.x_hi) if self.log_x \
            else _ticks_linear(self.x_lo, self.x_hi)
        for t in x_ticks:
            px = self.x(t)
            body.append(f'<line class="tick" x1="{_fmt(px)}" y1="{y1}" '
                        f'x2="{_fmt(px)}" y2="{y1 + 4}" stroke="#000000"/>')
            body.append(_text(px, y1 + 16, _fmt(t), size=10))
        y_ticks = _ticks_log(self.y_lo, self.y_hi) if self.log_y \
            else _ticks_linear(self.y_lo, self.y_hi)
        for t in y_ticks:
            py = self.y(t)
            body.append(f'<line class="tick" x1="{x0 - 4}" y1="{_fmt(py)}" '
                        f'x2="{x0}" y2="{_fmt(py)}" stroke="#000000"/>')
            body.append(_text(x0 - 7, py + 3, _fmt(t), size=10, anchor="end"))
        return body


def render_curve(points: Sequence[tuple[float, float]], *, width: int = 520,
                 height: int = 360, log_x: bool = False, log_y: bool = False,
                 x_label: str = "", y_label: str = "", title: str = "",
                 overlay: Sequence[tuple[float, float]] | None = None,
                 markers: bool = True) -> str:
    """Polyline plot of (x, y) points with axes; ``overlay`` adds a fit curve."""
    pts = [(float(x), float(y)) for x, y in points]
    if not pts:
        raise ValueError("no curve data to render")
    if log_x:
        pts = [(x, y) for x, y in pts if x > 0]
    if log_y:
        pts = [(x, y) for x, y in pts if y > 0]
    if not pts:
        raise ValueError("no positive curve data for log axes")
    all_pts = list(pts) + [(float(x), float(y)) for x, y in (overlay or ())]
    ax = _Axes([p[0] for p in all_pts], [p[1] for p in all_pts],
               width, height, log_x, log_y)
    body = ax.frame(x_label, y_label, title)
    coords = " ".join(f"{_fmt(ax.x(x))},{_fmt(ax.y(y))}" for x, y in pts)
    body.append(f'<polyline class="curve" points="{coords}" '
                f'fill="none" stroke="#117733" stroke-width="1.5"/>')
    if markers and len(pts) <= 200:
        for x, y in pts:
            body.append(f'<circle class="marker" cx="{_fmt(ax.x(x))}" '
                        f'cy="{_fmt(ax.y(y))}" r="2.5" fill="#117733"/>')
    if overlay:
        ov = [(float(x), float(y)) for x, y in overlay]
        if log_x:
            ov = [(x, y) for x, y in ov if x > 0]
        if log_y:
            ov = [(x, y) for x, y in ov if y > 0]
        coords = " ".join(f"{_fmt(ax.x(x))},{_fmt(ax.y(y))}" for x, y in ov)
        body.append(f'<polyline class="fit" points="{coords}" '
                    f'fill="none" stroke="#882255" stroke-width="1.2" '
                    f'stroke-dasharray="5,3"/>')
    return _document(width, height, body)


def render_histogram(bins: Sequence[tuple[float, float]], *, width: int = 420,
                     height: int = 300, bar_width: float = 1.0,
                     x_label: str = "", y_label: str = "frequency",
                     title: str = "", marker: float | None = None) -> str:
    """Bar chart over (position, frequency) pairs.

    ``marker`` draws a vertical reference line (threshold marker) at the
    given x position.
    """
    data = [(float(b), float(f)) for b, f in bins]
    if not data:
        raise ValueError("no histogram data to render")
    xs = [b for b, _ in data]
    ys = [f for _, f in data]
    x_candidates = xs + [x + bar_width for x in xs] + ([marker] if marker is not None else [])
    ax = _Axes(x_candidates, ys + [0.0], width, height, False, False)
    body = ax.frame(x_label, y_label, title)
    base = ax.y(0.0)
    for b, f in data:
        x0 = ax.x(b)
        x1 = ax.x(b + bar_width)
        y0 = ax.y(f)
        body.append(f'<rect class="bar" x="{_fmt(x0)}" y="{_fmt(y0)}" '
                    f'width="{_fmt(x1 - x0)}" height="{_fmt(max(base - y0, 0.0))}" '
                    f'fill="#4477aa" stroke="#ffffff" stroke-width="0.5"/>')
    if marker is not None:
        mx = ax.x(marker)
        body.append(f'<line class="threshold" x1="{_fmt(mx)}" y1="{_fmt(ax.y(max(ys)))}" '
                    f'x2="{_fmt(mx)}" y2="{_fmt(base)}" stroke="#cc0000" '
                    f'stroke-width="1.5"/>')
    return _document(width, height, body)
