"""Trend-renewal process simulation.

A trend-renewal process with trend function lambda(t) and renewal
distribution F is a point process whose time-warped event times
Lambda(T_1), Lambda(T_2), ... form a renewal process with gap
distribution F. A constant trend gives a plain renewal process; a unit
exponential F gives a non-homogeneous Poisson process.

The renewal distribution here is a Weibull scaled to mean 1, so the
expected number of events by time tau is approximately Lambda(tau).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import gamma as gamma_fn

from .data import EventSeries


@dataclass(frozen=True)
class PowerLawTrend:
    """lambda(t) = b * t^(b-1); b < 1 decreasing, b = 1 flat, b > 1 increasing."""

    b: float

    def __post_init__(self):
        if self.b <= 0:
            raise ValueError(f"power-law exponent must be positive, got {self.b}")

    def rate(self, t):
        return self.b * np.asarray(t, dtype=float) ** (self.b - 1.0)

    def cumulative(self, t):
        return np.asarray(t, dtype=float) ** self.b

    def inverse(self, u):
        u = np.asarray(u, dtype=float)
        if np.any(u < 0):
            raise ValueError("cumulative trend is only invertible for u >= 0")
        return u ** (1.0 / self.b)


@dataclass(frozen=True)
class ConstantTrend:
    """lambda(t) = d: no trend, the renewal-process special case."""

    d: float

    def __post_init__(self):
        if self.d <= 0:
            raise ValueError(f"rate must be positive, got {self.d}")

    def rate(self, t):
        return np.full_like(np.asarray(t, dtype=float), self.d)

    def cumulative(self, t):
        return self.d * np.asarray(t, dtype=float)

    def inverse(self, u):
        u = np.asarray(u, dtype=float)
        if np.any(u < 0):
            raise ValueError("cumulative trend is only invertible for u >= 0")
        return u / self.d


@dataclass(frozen=True)
class BathtubTrend:
    """Symmetric piecewise-linear bathtub rate on the window [0, tau].

    Three phases: linear decrease on [0, e] from level+c down to level,
    flat at level on [e, tau-e], mirrored linear increase on
    [tau-e, tau]. The base level is fixed so that the average of the
    rate over the window equals d; c = 0 gives the flat no-trend rate d.
    """

    c: float
    d: float
    e: float
    tau: float

    def __post_init__(self):
        if self.d <= 0:
            raise ValueError(f"average rate d must be positive, got {self.d}")
        if self.c < 0:
            raise ValueError(f"bathtub depth c must be nonnegative, got {self.c}")
        if not 0.0 < self.e < self.tau / 2.0:
            raise ValueError(f"phase boundary e must lie in (0, tau/2), got e={self.e}, tau={self.tau}")
        if self.level < 0:
            raise ValueError(
                f"rate would be negative in the flat phase (level {self.level:.6g}); reduce c or e"
            )

    @property
    def level(self) -> float:
        # flat-phase level implied by the average-d constraint
        return self.d - self.c * self.e / self.tau

    def rate(self, t):
        t = np.asarray(t, dtype=float)
        m, c, e, tau = self.level, self.c, self.e, self.tau
        down = m + c * (1.0 - t / e)
        up = m + c * (t - (tau - e)) / e
        return np.where(t < e, down, np.where(t <= tau - e, m, up))

    def cumulative(self, t):
        t = np.asarray(t, dtype=float)
        m, c, e, tau = self.level, self.c, self.e, self.tau
        lam_e = m * e + c * e / 2.0
        phase1 = (m + c) * t - c * t**2 / (2.0 * e)
        phase2 = lam_e + m * (t - e)
        s = t - (tau - e)
        phase3 = lam_e + m * (tau - 2.0 * e) + m * s + c * s**2 / (2.0 * e)
        return np.where(t < e, phase1, np.where(t <= tau - e, phase2, phase3))

    def inverse(self, u):
        u = np.asarray(u, dtype=float)
        m, c, e, tau = self.level, self.c, self.e, self.tau
        total = self.cumulative(np.array(tau)).item()
        if np.any(u < 0) or np.any(u > total + 1e-9 * max(total, 1.0)):
            raise ValueError(f"cumulative trend is only invertible on [0, {total:.6g}]")
        u = np.minimum(u, total)
        lam_e = m * e + c * e / 2.0
        lam_flat_end = lam_e + m * (tau - 2.0 * e)
        if c == 0:
            return u / m
        # phase 1: solve c t^2/(2e) - (m+c) t + u = 0, smaller root
        p1 = (
            (m + c) - np.sqrt(np.maximum((m + c) ** 2 - 2.0 * c * u / e, 0.0))
        ) * e / c
        p2 = e + (u - lam_e) / m if m > 0 else np.full_like(u, e)
        u3 = u - lam_flat_end
        p3 = (tau - e) + (
            -m + np.sqrt(np.maximum(m**2 + 2.0 * c * u3 / e, 0.0))
        ) * e / c
        return np.where(u < lam_e, p1, np.where(u <= lam_flat_end, p2, p3))


Trend = PowerLawTrend | ConstantTrend | BathtubTrend


@dataclass(frozen=True)
class TrpModel:
    """A trend function plus a Weibull renewal distribution with mean 1."""

    trend: Trend
    shape: float

    def __post_init__(self):
        if self.shape <= 0:
            raise ValueError(f"Weibull shape must be positive, got {self.shape}")

    @property
    def renewal_scale(self) -> float:
        return 1.0 / gamma_fn(1.0 + 1.0 / self.shape)


def lambda_inverse(trend: Trend, u) -> np.ndarray | float:
    """Invert the cumulative trend function."""
    out = trend.inverse(u)
    return out if np.ndim(out) else float(out)


def simulate_trp(model: TrpModel, tau: float, seed) -> EventSeries:
    """Simulate one time-censored realization: draw unit-mean Weibull
    gaps for the warped clock, keep the partial sums up to
    Lambda(tau), and map them back through the inverse trend.
    Deterministic given the seed (a seed sequence or Generator)."""
    if tau <= 0:
        raise ValueError(f"censoring time must be positive, got {tau}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    total = float(np.asarray(model.trend.cumulative(tau)))
    scale = model.renewal_scale
    chunk = max(16, int(total + 4.0 * math.sqrt(total) + 10.0))
    warped = np.array([])
    running = 0.0
    while running <= total:
        gaps = scale * rng.weibull(model.shape, size=chunk)
        warped = np.concatenate([warped, running + np.cumsum(gaps)])
        running = warped[-1]
    warped = warped[warped <= total]
    times = np.minimum(np.asarray(model.trend.inverse(warped), dtype=float), tau)
    return EventSeries(tuple(times), tau)


def simulate_trp_raw(model: TrpModel, tau: float, rng: np.random.Generator) -> np.ndarray:
    """Like :func:`simulate_trp` but returning a bare times array with
    no EventSeries validation; used by the study harness."""
    total = float(np.asarray(model.trend.cumulative(tau)))
    scale = model.renewal_scale
    chunk = max(16, int(total + 4.0 * math.sqrt(total) + 10.0))
    warped = np.array([])
    running = 0.0
    while running <= total:
        gaps = scale * rng.weibull(model.shape, size=chunk)
        warped = np.concatenate([warped, running + np.cumsum(gaps)])
        running = warped[-1]
    warped = warped[warped <= total]
    return np.minimum(np.asarray(model.trend.inverse(warped), dtype=float), tau)


def solve_tau_for_expected_n(trend: Trend, n: float) -> float:
    """Censoring time with Lambda(tau) = n, so roughly n expected events."""
    if n <= 0:
        raise ValueError(f"expected count must be positive, got {n}")
    if isinstance(trend, PowerLawTrend):
        return float(n ** (1.0 / trend.b))
    if isinstance(trend, ConstantTrend):
        return n / trend.d
    total = float(np.asarray(trend.cumulative(trend.tau)))
    if n > total:
        raise ValueError(f"a bathtub trend on [0, {trend.tau}] yields at most {total:.6g} expected events")
    return float(brentq(lambda t: float(np.asarray(trend.cumulative(t))) - n, 0.0, trend.tau))


def bathtub_equal_phases(c: float, per_phase: float, d: float = 1.0) -> BathtubTrend:
    """Bathtub trend whose window and phase boundary are solved so that
    the expected event counts in the decreasing, flat and increasing
    phases are all equal to ``per_phase``."""
    if per_phase <= 0:
        raise ValueError(f"per-phase count must be positive, got {per_phase}")
    tau = 3.0 * per_phase / d
    if c == 0:
        return BathtubTrend(c=0.0, d=d, e=tau / 3.0, tau=tau)

    def flat_count(e: float) -> float:
        return (d - c * e / tau) * (tau - 2.0 * e) - per_phase

    # at e -> 0 the flat phase holds almost everything; find where it
    # shrinks to exactly one third
    lo, hi = 1e-9 * tau, tau / 2.0 - 1e-9 * tau
    if flat_count(lo) < 0 or flat_count(hi) > 0:
        raise ValueError(f"no equal-phase bathtub exists for c={c}, d={d}")
    e = brentq(flat_count, lo, hi)
    return BathtubTrend(c=c, d=d, e=float(e), tau=tau)
