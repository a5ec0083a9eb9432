"""Independent ground-truth generators used by the acceptance suite.

These deliberately avoid the solver's code paths: an analytic box solution,
an exhaustive grid search over low-dimensional feasible sets, and the closed
form projection onto a ball.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import OracleError

_CHUNK = 1 << 18  # grid rows are evaluated in batches to bound memory


@dataclass(frozen=True)
class GridSpec:
    lower: np.ndarray
    upper: np.ndarray
    points_per_axis: int

    def __post_init__(self):
        lower = np.atleast_1d(np.asarray(self.lower, dtype=float))
        upper = np.atleast_1d(np.asarray(self.upper, dtype=float))
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        if lower.shape != upper.shape:
            raise ValueError("bounds must have matching shapes")
        if not np.all(np.isfinite(lower)) or not np.all(np.isfinite(upper)):
            raise ValueError("bounds must be finite")
        if not np.all(lower < upper):
            raise ValueError("need lower < upper per coordinate")
        if self.points_per_axis < 3:
            raise ValueError("points_per_axis must be >= 3")

    @property
    def dim(self) -> int:
        return self.lower.size

    def axes(self):
        return [
            np.linspace(self.lower[i], self.upper[i], self.points_per_axis)
            for i in range(self.dim)
        ]


def analytic_box_solution(c, b) -> np.ndarray:
    """Minimizer of 0.5||x - c||^2 subject to x <= b: the componentwise min."""
    c = np.asarray(c, dtype=float)
    b = np.asarray(b, dtype=float)
    if c.shape != b.shape:
        raise ValueError("dimension mismatch")
    return np.minimum(c, b)


def grid_bruteforce(objective, feasible, grid: GridSpec):
    """Exhaustive search over the grid, skipping infeasible nodes.

    ``objective`` and ``feasible`` are batched callables taking an (N, d)
    array of points.  Ties are broken toward the smallest row-major node
    index, so the result is deterministic and chunk-size independent.
    Accuracy is limited by the grid spacing times a local Lipschitz bound.
    """
    if grid.dim > 3:
        raise ValueError("grid search is limited to dimension <= 3")
    axes = grid.axes()
    mesh = np.meshgrid(*axes, indexing="ij")
    points = np.stack([m.ravel() for m in mesh], axis=1)

    best_val = np.inf
    best_idx = -1
    for start in range(0, points.shape[0], _CHUNK):
        chunk = points[start : start + _CHUNK]
        mask = np.asarray(feasible(chunk), dtype=bool)
        if not mask.any():
            continue
        vals = np.asarray(objective(chunk[mask]), dtype=float)
        j = int(np.argmin(vals))
        if vals[j] < best_val:
            best_val = float(vals[j])
            best_idx = start + int(np.flatnonzero(mask)[j])
    if best_idx < 0:
        raise OracleError("no feasible grid node")
    return points[best_idx].copy(), best_val


def exact_ball_projection(z, w, R) -> np.ndarray:
    """Closed-form projection of z onto the ball B(w, R)."""
    if not R > 0:
        raise ValueError("radius must be positive")
    z = np.asarray(z, dtype=float)
    w = np.asarray(w, dtype=float)
    gap = z - w
    dist = float(np.linalg.norm(gap))
    if dist <= R:
        return z.copy()
    return w + (R / dist) * gap
