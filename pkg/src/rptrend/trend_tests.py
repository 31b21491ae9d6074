"""Trend test statistics for time-censored recurrent event data, in
closed form, for one process (Lewis-Robinson, Kolmogorov-Smirnov,
Cramer-von Mises, Anderson-Darling, extended Lewis-Robinson) and for
several processes (weighted Lewis-Robinson, generalized Laplace,
weighted Cramer-von Mises sum).

All statistics are functionals of the tied-down normalized counting
process (see :mod:`rptrend.bridge`); the closed forms below are exact
piecewise integrals of that path. Array-level ``*_value`` functions
operate on raw event-time arrays and are what the permutation and
simulation loops call; the public ``*_statistic`` functions wrap them
with validation and p-values.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import nulldist
from .data import EventSeries, MultiProcessData
from .estimators import Estimates

SIGNED_TESTS = ("lr", "elr", "lrm", "gl", "elrm")
SINGLE_TESTS = ("lr", "ks", "cvm", "ad", "elr")
MULTI_TESTS = ("lrm", "gl", "cvmm", "elrm")


class InfiniteStatisticError(ValueError):
    """The statistic is infinite on this data (log singularity)."""


@dataclass(frozen=True)
class TestResult:
    test: str
    statistic: float
    p_value: float
    p_method: str
    sidedness: str | None
    n_effective: int

    def to_dict(self) -> dict:
        return {
            "test": self.test,
            "statistic": self.statistic,
            "p_value": self.p_value,
            "p_method": self.p_method,
            "sidedness": self.sidedness,
            "n_effective": self.n_effective,
        }


def _check_gamma(gamma: float) -> None:
    if gamma <= 0:
        raise ValueError(f"coefficient of variation must be positive, got {gamma}")


def laplace_value(times: np.ndarray, tau: float) -> float:
    """The gamma-free core of the Lewis-Robinson statistic."""
    n = len(times)
    return math.sqrt(12.0) / (tau * math.sqrt(n)) * (times.sum() - n * tau / 2.0)


def lr_value(times: np.ndarray, tau: float, gamma: float) -> float:
    return laplace_value(times, tau) / gamma


def ks_value(times: np.ndarray, tau: float, gamma: float) -> float:
    n = len(times)
    i = np.arange(1, n + 1)
    dev = n * times / tau
    m = max(np.max(np.abs(i - dev)), np.max(np.abs(i - 1 - dev)))
    return m / (gamma * math.sqrt(n))


def cvm_value(times: np.ndarray, tau: float, gamma: float) -> float:
    # exact integral of the squared path, segment by segment
    n = len(times)
    lo = np.concatenate([[0.0], times])
    hi = np.concatenate([times, [tau]])
    i = np.arange(0, n + 1)
    integral = np.sum(
        i**2 * (hi - lo)
        - i * n * (hi**2 - lo**2) / tau
        + n**2 * (hi**3 - lo**3) / (3.0 * tau**2)
    )
    return integral / (tau * gamma**2 * n)


def ad_value(times: np.ndarray, tau: float, gamma: float) -> float:
    n = len(times)
    if times[-1] >= tau:
        raise InfiniteStatisticError(
            "Anderson-Darling statistic is infinite when the last event falls exactly at the censoring time"
        )
    i = np.arange(1, n)
    inner = np.sum(
        (n - i) ** 2 * np.log((tau - times[:-1]) / (tau - times[1:]))
        + i**2 * np.log(times[1:] / times[:-1])
    )
    tail = n**2 * (math.log(tau / (tau - times[0])) + math.log(tau / times[-1]) - 1.0)
    return (inner + tail) / (gamma**2 * n)


def elr_norm_constant(a: float) -> float:
    return math.sqrt(1.0 / 12.0 - a**2 * (1.0 - a) ** 2)


def elr_value(times: np.ndarray, tau: float, gamma: float, a: float) -> float:
    if not 0.0 <= a <= 1.0:
        raise ValueError(f"split point a must lie in [0, 1], got {a}")
    n = len(times)
    core = np.sum(np.abs(times - a * tau)) - (0.5 - a * (1.0 - a)) * tau * n
    return core / (gamma * tau * math.sqrt(n) * elr_norm_constant(a))


def lrm_value(series_list: list[tuple[np.ndarray, float]], gammas: list[float]) -> float:
    num = 0.0
    denom = 0.0
    for (times, tau), gamma in zip(series_list, gammas):
        n = len(times)
        num += times.sum() - n * tau / 2.0
        denom += gamma**2 * tau**2 * n
    return math.sqrt(12.0) * num / math.sqrt(denom)


def gl_value(series_list: list[tuple[np.ndarray, float]]) -> float:
    u = np.array([times.sum() - len(times) * tau / 2.0 for times, tau in series_list])
    ss = np.sum(u**2)
    if ss == 0:
        raise ValueError("generalized Laplace statistic is undefined: every process centroid is exactly balanced")
    return float(np.sum(u) / math.sqrt(ss))


def elrm_value(series_list: list[tuple[np.ndarray, float]], gammas: list[float], a: float) -> float:
    # weighted combination of per-process standardized statistics, with
    # the same weights as the multi-process Lewis-Robinson test
    w = np.array([g * tau * math.sqrt(len(t)) for (t, tau), g in zip(series_list, gammas)])
    w = w / math.sqrt(np.sum(w**2))
    per = np.array([elr_value(t, tau, g, a) for (t, tau), g in zip(series_list, gammas)])
    return float(np.sum(w * per))


def _resolve_estimates(data: MultiProcessData, ests, pooled: bool) -> list[Estimates]:
    if isinstance(ests, Estimates):
        return [ests] * len(data)
    ests = list(ests)
    if pooled and len(ests) == 1:
        return ests * len(data)
    if len(ests) != len(data):
        raise ValueError(f"got {len(ests)} estimates for {len(data)} processes")
    return ests


def _drop_empty(data: MultiProcessData, ests: list[Estimates]):
    kept = [(pid, s, e) for (pid, s), e in zip(data.processes, ests) if s.n_events > 0]
    dropped = [pid for pid, s in data.processes if s.n_events == 0]
    if dropped:
        warnings.warn(f"dropping processes with no events: {', '.join(dropped)}")
    if not kept:
        raise ValueError("all processes are empty")
    return kept


def lr_statistic(series: EventSeries, est: Estimates, sidedness: str = "two_sided") -> TestResult:
    """Lewis-Robinson test. Positive values indicate increasing trend."""
    _check_gamma(est.gamma)
    stat = lr_value(series.times, series.censoring_time, est.gamma)
    return TestResult(
        test="lr", statistic=stat,
        p_value=nulldist.normal_one_sided_p(stat, sidedness),
        p_method="asymptotic_normal", sidedness=sidedness,
        n_effective=series.n_events,
    )


def ks_statistic(series: EventSeries, est: Estimates) -> TestResult:
    """Kolmogorov-Smirnov type test (sup deviation of the path)."""
    _check_gamma(est.gamma)
    stat = ks_value(series.times, series.censoring_time, est.gamma)
    return TestResult(
        test="ks", statistic=stat,
        p_value=1.0 - nulldist.kolmogorov_cdf(stat),
        p_method="kolmogorov_series", sidedness=None,
        n_effective=series.n_events,
    )


def cvm_statistic(series: EventSeries, est: Estimates,
                  table: nulldist.LimitTable | None = None) -> TestResult:
    """Cramer-von Mises type test (integrated squared path)."""
    _check_gamma(est.gamma)
    stat = cvm_value(series.times, series.censoring_time, est.gamma)
    return TestResult(
        test="cvm", statistic=stat,
        p_value=nulldist.limit_pvalue("cvm", stat, table),
        p_method="mc_limit", sidedness=None,
        n_effective=series.n_events,
    )


def ad_statistic(series: EventSeries, est: Estimates,
                 table: nulldist.LimitTable | None = None) -> TestResult:
    """Anderson-Darling type test (endpoint-weighted squared path)."""
    _check_gamma(est.gamma)
    stat = ad_value(series.times, series.censoring_time, est.gamma)
    return TestResult(
        test="ad", statistic=stat,
        p_value=nulldist.limit_pvalue("ad", stat, table),
        p_method="mc_limit", sidedness=None,
        n_effective=series.n_events,
    )


def elr_statistic(series: EventSeries, est: Estimates, a: float = 0.5,
                  sidedness: str = "two_sided") -> TestResult:
    """Extended Lewis-Robinson test: contrasts the signed area before
    and after the split point a, picking up trends that reverse there.
    a=0 reduces exactly to the Lewis-Robinson test."""
    _check_gamma(est.gamma)
    stat = elr_value(series.times, series.censoring_time, est.gamma, a)
    return TestResult(
        test="elr", statistic=stat,
        p_value=nulldist.normal_one_sided_p(stat, sidedness),
        p_method="asymptotic_normal", sidedness=sidedness,
        n_effective=series.n_events,
    )


def lr_multi(data: MultiProcessData, ests, pooled: bool = False,
             sidedness: str = "two_sided") -> TestResult:
    """Lewis-Robinson test for several processes, with weights
    proportional to gamma_j * tau_j * sqrt(N_j). Pass a single pooled
    Estimates (or pooled=True with one element) to test the
    common-distribution null."""
    kept = _drop_empty(data, _resolve_estimates(data, ests, pooled))
    for _, _, e in kept:
        _check_gamma(e.gamma)
    stat = lrm_value(
        [(s.times, s.censoring_time) for _, s, _ in kept],
        [e.gamma for _, _, e in kept],
    )
    return TestResult(
        test="lrm", statistic=stat,
        p_value=nulldist.normal_one_sided_p(stat, sidedness),
        p_method="asymptotic_normal", sidedness=sidedness,
        n_effective=sum(s.n_events for _, s, _ in kept),
    )


def gl_statistic(data: MultiProcessData, sidedness: str = "two_sided") -> TestResult:
    """Generalized Laplace test; asymptotics are in the number of
    processes, so m=1 degenerates to a sign. Needs no dispersion
    estimate. Empty processes contribute a zero term."""
    series_list = [(s.times, s.censoring_time) for s in data.series]
    stat = gl_value(series_list)
    return TestResult(
        test="gl", statistic=stat,
        p_value=nulldist.normal_one_sided_p(stat, sidedness),
        p_method="asymptotic_normal", sidedness=sidedness,
        n_effective=sum(s.n_events for s in data.series),
    )


def elr_multi(data: MultiProcessData, ests, a: float = 0.5, pooled: bool = False,
              sidedness: str = "two_sided") -> TestResult:
    """Extended Lewis-Robinson test for several processes: the weighted
    sum of per-process standardized statistics, with the multi-process
    Lewis-Robinson weights."""
    kept = _drop_empty(data, _resolve_estimates(data, ests, pooled))
    for _, _, e in kept:
        _check_gamma(e.gamma)
    stat = elrm_value(
        [(s.times, s.censoring_time) for _, s, _ in kept],
        [e.gamma for _, _, e in kept],
        a,
    )
    return TestResult(
        test="elrm", statistic=stat,
        p_value=nulldist.normal_one_sided_p(stat, sidedness),
        p_method="asymptotic_normal", sidedness=sidedness,
        n_effective=sum(s.n_events for _, s, _ in kept),
    )


# mean and variance of the single-process Cramer-von Mises limit law,
# used for the large-m normal approximation
_CVM_LIMIT_MEAN = 1.0 / 6.0
_CVM_LIMIT_VAR = 1.0 / 45.0
_CVMM_NORMAL_M = 30
_CVMM_DEFAULT_MC = 20_000
_CVMM_DEFAULT_GRID = 4096


def cvm_multi(data: MultiProcessData, ests, weights: str = "tau", pooled: bool = False,
              mc_size: int = _CVMM_DEFAULT_MC, seed: int = 0,
              grid_n: int = _CVMM_DEFAULT_GRID) -> TestResult:
    """Weighted sum of per-process Cramer-von Mises statistics.

    ``weights`` is ``tau`` (proportional to the censoring times, the
    natural choice under a common gap distribution) or
    ``gamma_tau_sqrt_n`` (the multi-process Lewis-Robinson weights).
    The p-value conditions on the realized weights: Monte Carlo over
    sums of independent limit draws for small m, normal approximation
    for m >= 30. With one process this is exactly the single-process
    test, shipped table included.
    """
    kept = _drop_empty(data, _resolve_estimates(data, ests, pooled))
    for _, _, e in kept:
        _check_gamma(e.gamma)
    if weights == "tau":
        w = np.array([s.censoring_time for _, s, _ in kept])
    elif weights == "gamma_tau_sqrt_n":
        w = np.array([e.gamma * s.censoring_time * math.sqrt(s.n_events) for _, s, _ in kept])
    else:
        raise ValueError(f"unknown weight scheme {weights!r}")
    w = w / w.sum()
    per = np.array([cvm_value(s.times, s.censoring_time, e.gamma) for _, s, e in kept])
    stat = float(np.sum(w * per))
    n_eff = sum(s.n_events for _, s, _ in kept)

    if len(kept) == 1:
        return TestResult(
            test="cvmm", statistic=stat,
            p_value=nulldist.limit_pvalue("cvm", stat),
            p_method="mc_limit", sidedness=None, n_effective=n_eff,
        )
    if len(kept) >= _CVMM_NORMAL_M:
        mean = _CVM_LIMIT_MEAN * np.sum(w)
        sd = math.sqrt(_CVM_LIMIT_VAR * np.sum(w**2))
        p = 0.5 * math.erfc((stat - mean) / (sd * math.sqrt(2.0)))
        return TestResult(
            test="cvmm", statistic=stat, p_value=p,
            p_method="asymptotic_normal", sidedness=None, n_effective=n_eff,
        )
    table = nulldist.build_limit_table(
        "weighted_sum", m=mc_size, grid_n=grid_n, seed=seed, weights=w,
    )
    return TestResult(
        test="cvmm", statistic=stat, p_value=table.p_value(stat),
        p_method="mc_sum", sidedness=None, n_effective=n_eff,
    )


def compute_statistic(series_list: list[tuple[np.ndarray, float]], test: str,
                      gammas: list[float], a: float = 0.5,
                      weights: str = "tau") -> float:
    """Statistic value on raw (times, tau) arrays; the fast path used by
    permutation and simulation loops."""
    if test in SINGLE_TESTS:
        if len(series_list) != 1:
            raise ValueError(f"test {test!r} is a single-process test")
        times, tau = series_list[0]
        gamma = gammas[0]
        if test == "lr":
            return lr_value(times, tau, gamma)
        if test == "ks":
            return ks_value(times, tau, gamma)
        if test == "cvm":
            return cvm_value(times, tau, gamma)
        if test == "ad":
            return ad_value(times, tau, gamma)
        return elr_value(times, tau, gamma, a)
    if test == "lrm":
        return lrm_value(series_list, gammas)
    if test == "gl":
        return gl_value(series_list)
    if test == "elrm":
        return elrm_value(series_list, gammas, a)
    if test == "cvmm":
        if weights == "tau":
            w = np.array([tau for _, tau in series_list])
        else:
            w = np.array([g * tau * math.sqrt(len(t)) for (t, tau), g in zip(series_list, gammas)])
        w = w / w.sum()
        per = np.array([cvm_value(t, tau, g) for (t, tau), g in zip(series_list, gammas)])
        return float(np.sum(w * per))
    raise ValueError(f"unknown test {test!r}")
