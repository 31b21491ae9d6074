"""The tied-down normalized counting process underlying all the trend
statistics, plus numerical-quadrature functionals of it used as oracles
for the closed forms.

For a series with N events at times T_i on (0, tau], the path is

    B(s) = (N(s*tau) - s*N) / (gamma * sqrt(N)),   0 <= s <= 1,

which is 0 at both endpoints and, under the renewal null, approximately
a Brownian bridge. Between jumps the path is linear in s, which the
quadrature exploits by aligning integration break points with the jumps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .data import EventSeries

FUNCTIONAL_KINDS = ("signed_area", "sup_abs", "l2", "weighted_l2", "split_area")


@dataclass(frozen=True)
class BridgePath:
    """Evaluable step-plus-drift path with jumps at s_i = T_i / tau."""

    jump_points: np.ndarray
    n_events: int
    gamma: float

    def __call__(self, s):
        """Evaluate the path; events at exactly s*tau are counted."""
        s = np.asarray(s, dtype=float)
        count = np.searchsorted(self.jump_points, s, side="right")
        value = (count - s * self.n_events) / (self.gamma * math.sqrt(self.n_events))
        return value if value.ndim else float(value)


def build_bridge(series: EventSeries, gamma: float) -> BridgePath:
    if gamma <= 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    if series.n_events < 1:
        raise ValueError("bridge needs at least one event")
    jumps = series.times / series.censoring_time
    return BridgePath(jump_points=jumps, n_events=series.n_events, gamma=float(gamma))


def _segments(path: BridgePath, grid_size: int, extra: tuple[float, ...] = (),
              lo: float = 0.0, hi: float = 1.0):
    """Break [lo, hi] at grid points and at jumps; return segment bounds
    and the event count on each (the path is linear within segments)."""
    pts = np.concatenate([
        np.linspace(0.0, 1.0, grid_size + 1),
        path.jump_points,
        np.asarray(extra, dtype=float),
    ])
    pts = np.unique(np.clip(pts, lo, hi))
    a, b = pts[:-1], pts[1:]
    keep = b > a
    a, b = a[keep], b[keep]
    counts = np.searchsorted(path.jump_points, (a + b) / 2, side="right")
    return a, b, counts


def _linear_values(path: BridgePath, s: np.ndarray, counts: np.ndarray) -> np.ndarray:
    return (counts - s * path.n_events) / (path.gamma * math.sqrt(path.n_events))


def quad_functional(path: BridgePath, kind: str, grid_size: int = 10_000, a: float | None = None) -> float:
    """Numerically evaluate a functional of the path over [0, 1].

    Kinds: ``signed_area`` (plain integral), ``sup_abs``, ``l2``
    (integral of the square), ``weighted_l2`` (square weighted by
    1/(s(1-s)), clipped to [eps, 1-eps] with eps = 1/(10*grid_size)) and
    ``split_area`` (integral over [0, a] minus integral over [a, 1]).
    """
    if grid_size < 1000:
        raise ValueError(f"grid_size must be at least 1000, got {grid_size}")
    if kind not in FUNCTIONAL_KINDS:
        raise ValueError(f"unknown functional kind {kind!r}")

    if kind == "sup_abs":
        lo, hi, counts = _segments(path, grid_size)
        vals = np.maximum(np.abs(_linear_values(path, lo, counts)),
                          np.abs(_linear_values(path, hi, counts)))
        return float(vals.max())

    if kind == "split_area":
        if a is None or not 0.0 <= a <= 1.0:
            raise ValueError(f"split_area needs a split point in [0, 1], got {a!r}")
        lo, hi, counts = _segments(path, grid_size, extra=(a,))
        seg = (hi - lo) * (_linear_values(path, lo, counts) + _linear_values(path, hi, counts)) / 2
        sign = np.where(hi <= a, 1.0, -1.0)
        return float(np.sum(sign * seg))

    if kind == "signed_area":
        lo, hi, counts = _segments(path, grid_size)
        seg = (hi - lo) * (_linear_values(path, lo, counts) + _linear_values(path, hi, counts)) / 2
        return float(np.sum(seg))

    if kind == "l2":
        lo, hi, counts = _segments(path, grid_size)
        fl = _linear_values(path, lo, counts) ** 2
        fm = _linear_values(path, (lo + hi) / 2, counts) ** 2
        fh = _linear_values(path, hi, counts) ** 2
        # Simpson is exact for the piecewise-quadratic integrand
        return float(np.sum((hi - lo) / 6 * (fl + 4 * fm + fh)))

    # weighted_l2
    eps = 1.0 / (10.0 * grid_size)
    lo, hi, counts = _segments(path, grid_size, lo=eps, hi=1.0 - eps)
    mid = (lo + hi) / 2

    def f(s, c):
        return _linear_values(path, s, c) ** 2 / (s * (1.0 - s))

    return float(np.sum((hi - lo) / 6 * (f(lo, counts) + 4 * f(mid, counts) + f(hi, counts))))
