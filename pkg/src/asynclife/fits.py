"""Deterministic curve fitters shared by the experiment modules.

Three fit families: a unit-amplitude sigmoid ``y = 1 / (1 + exp(a*(x - b)))``
for locating transition midpoints, an offset power law ``y = a * (x - b)**c``
for critical density decay, and ordinary least-squares polynomials.  All
fitters are pure functions of their inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "SigmoidFit",
    "PowerLawFit",
    "PolynomialFit",
    "fit_sigmoid",
    "fit_power_law",
    "fit_polynomial",
]


@dataclass(frozen=True)
class SigmoidFit:
    """Parameters of y = 1 / (1 + exp(a*(x - b))); b is the 0.5-crossing."""

    a: float
    b: float
    residual: float

    def evaluate(self, x) -> np.ndarray:
        return _sigmoid(np.asarray(x, dtype=float), self.a, self.b)

    def to_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "residual": self.residual}


@dataclass(frozen=True)
class PowerLawFit:
    """Parameters of y = a * (x - b)**c fitted over ``fit_window``.

    ``residual`` is the sum of squared errors of log(y) within the window.
    """

    a: float
    b: float
    c: float
    fit_window: tuple[float, float]
    residual: float

    def evaluate(self, x) -> np.ndarray:
        return self.a * np.power(np.asarray(x, dtype=float) - self.b, self.c)

    def to_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "c": self.c,
                "window": list(self.fit_window), "residual": self.residual}


@dataclass(frozen=True)
class PolynomialFit:
    """OLS polynomial; coefficients ordered from highest degree to constant."""

    coefficients: tuple[float, ...]
    degree: int
    residual: float

    def evaluate(self, x) -> np.ndarray:
        return np.polyval(self.coefficients, np.asarray(x, dtype=float))

    def to_dict(self) -> dict:
        return {"coefficients": list(self.coefficients), "degree": self.degree,
                "residual": self.residual}


def _sigmoid(x: np.ndarray, a: float, b: float) -> np.ndarray:
    z = np.clip(a * (x - b), -500.0, 500.0)
    return 1.0 / (1.0 + np.exp(z))


def _crossing_init(xs: np.ndarray, ys: np.ndarray) -> tuple[float, float]:
    """Initial (a, b) from the first 0.5-crossing of step-like data."""
    order = np.argsort(xs)
    sx, sy = xs[order], ys[order]
    sign = 1.0 if sy[0] >= sy[-1] else -1.0  # decreasing data needs a > 0
    for k in range(len(sx) - 1):
        if (sy[k] - 0.5) * (sy[k + 1] - 0.5) <= 0.0 and sy[k] != sy[k + 1]:
            gap = max(sx[k + 1] - sx[k], 1e-12)
            return sign * 4.0 / gap, 0.5 * (sx[k] + sx[k + 1])
    span = max(sx[-1] - sx[0], 1e-12)
    return sign * 4.0 / span, 0.5 * (sx[0] + sx[-1])


def fit_sigmoid(x, y, max_iter: int = 200) -> SigmoidFit:
    """Least-squares fit of y = 1 / (1 + exp(a*(x - b))).

    Initialization is a logit-transform linear regression over points strictly
    inside (0, 1); points at exactly 0 or 1 join only the damped Gauss-Newton
    refinement on the untransformed residuals.  Raises ValueError when the
    data carry no transition (all values identical).
    """
    xs = np.asarray(x, dtype=float)
    ys = np.asarray(y, dtype=float)
    if xs.ndim != 1 or xs.shape != ys.shape:
        raise ValueError("x and y must be 1-D arrays of equal length")
    if xs.size < 2:
        raise ValueError("need at least 2 points to fit a sigmoid")
    if np.all(ys == ys[0]):
        raise ValueError("degenerate data: all responses identical, no transition to fit")

    interior = (ys > 0.0) & (ys < 1.0)
    if interior.sum() >= 2:
        lx = xs[interior]
        ly = np.log(1.0 / ys[interior] - 1.0)
        slope, intercept = np.polyfit(lx, ly, 1)
        if abs(slope) < 1e-12:
            a0, b0 = _crossing_init(xs, ys)
        else:
            a0, b0 = float(slope), float(-intercept / slope)
    else:
        a0, b0 = _crossing_init(xs, ys)

    a, b, sse = _refine_sigmoid(xs, ys, a0, b0, max_iter)
    return SigmoidFit(a=a, b=b, residual=sse)


def _refine_sigmoid(xs, ys, a, b, max_iter):
    f = _sigmoid(xs, a, b)
    sse = float(np.sum((f - ys) ** 2))
    for _ in range(max_iter):
        w = f * (1.0 - f)
        jac_a = -(xs - b) * w
        jac_b = a * w
        r = f - ys
        jtj = np.array([[jac_a @ jac_a, jac_a @ jac_b],
                        [jac_a @ jac_b, jac_b @ jac_b]])
        g = np.array([jac_a @ r, jac_b @ r])
        ridge = 1e-12 * (1.0 + jtj.trace())
        try:
            delta = np.linalg.solve(jtj + ridge * np.eye(2), -g)
        except np.linalg.LinAlgError:
            break
        step = 1.0
        improved = False
        for _ in range(40):
            na, nb = a + step * delta[0], b + step * delta[1]
            nf = _sigmoid(xs, na, nb)
            nsse = float(np.sum((nf - ys) ** 2))
            if nsse < sse:
                a, b, f, sse = float(na), float(nb), nf, nsse
                improved = True
                break
            step *= 0.5
        if not improved:
            break
        if np.abs(step * delta).max() < 1e-12 * (1.0 + abs(a) + abs(b)):
            break
    return a, b, sse


def _loglog_regression(xs, ys, b):
    u = np.log(xs - b)
    v = np.log(ys)
    c, k = np.polyfit(u, v, 1)
    sse = float(np.sum((v - (c * u + k)) ** 2))
    return float(c), float(k), sse


def fit_power_law(x, y, window: tuple[float, float]) -> PowerLawFit:
    """Fit y = a * (x - b)**c over the points with window[0] <= x <= window[1].

    The offset b is scanned over [0, window_start) in 200 uniform steps, with
    (log a, c) solved by linear regression on log(y) vs log(x - b) for each
    candidate; the best candidate is then refined by golden-section search.
    """
    t_min, t_max = float(window[0]), float(window[1])
    if not 0.0 < t_min < t_max:
        raise ValueError(f"fit window must satisfy 0 < t_min < t_max, got {window}")
    xs = np.asarray(x, dtype=float)
    ys = np.asarray(y, dtype=float)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise ValueError("x and y must be 1-D arrays of equal length")
    mask = (xs >= t_min) & (xs <= t_max)
    xs, ys = xs[mask], ys[mask]
    if xs.size < 3:
        raise ValueError("need at least 3 points inside the fit window")
    if np.any(ys <= 0.0):
        raise ValueError("power-law fit requires positive values inside the window")

    candidates = t_min * np.arange(200) / 200.0
    sses = np.array([_loglog_regression(xs, ys, b)[2] for b in candidates])
    best = int(np.argmin(sses))

    lo = candidates[best - 1] if best > 0 else 0.0
    hi = candidates[best + 1] if best + 1 < len(candidates) else t_min * (1.0 - 1e-9)
    b_star = _golden_section(lambda b: _loglog_regression(xs, ys, b)[2], lo, hi)

    c, k, sse = _loglog_regression(xs, ys, b_star)
    return PowerLawFit(a=float(np.exp(k)), b=float(b_star), c=c,
                       fit_window=(t_min, t_max), residual=sse)


def _golden_section(fn, lo, hi, tol=1e-12, max_iter=120):
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - invphi * (hi - lo)
    x2 = lo + invphi * (hi - lo)
    f1, f2 = fn(x1), fn(x2)
    for _ in range(max_iter):
        if hi - lo < tol * (1.0 + abs(lo) + abs(hi)):
            break
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - invphi * (hi - lo)
            f1 = fn(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + invphi * (hi - lo)
            f2 = fn(x2)
    return 0.5 * (lo + hi)


def fit_polynomial(x, y, degree: int = 4) -> PolynomialFit:
    """Ordinary least-squares polynomial fit of the given degree."""
    xs = np.asarray(x, dtype=float)
    ys = np.asarray(y, dtype=float)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise ValueError("x and y must be 1-D arrays of equal length")
    if degree < 0:
        raise ValueError("degree must be non-negative")
    if xs.size <= degree:
        raise ValueError(f"underdetermined fit: {xs.size} points for degree {degree}")
    coeffs = np.polyfit(xs, ys, degree)
    residual = float(np.sum((np.polyval(coeffs, xs) - ys) ** 2))
    return PolynomialFit(coefficients=tuple(float(c) for c in coeffs),
                         degree=degree, residual=residual)
