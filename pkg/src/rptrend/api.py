"""Shared application logic behind the CLI and the HTTP service."""

from __future__ import annotations

import numpy as np

from . import nulldist, trend_tests
from .data import DataError, EventSeries, MultiProcessData
from .estimators import Estimates, Method, estimate, pooled_estimate
from .trend_tests import MULTI_TESTS, SIGNED_TESTS, SINGLE_TESTS, TestResult
from .trp import (
    BathtubTrend,
    ConstantTrend,
    PowerLawTrend,
    Trend,
    TrpModel,
    simulate_trp,
    solve_tau_for_expected_n,
)


def single_series(data: MultiProcessData) -> EventSeries:
    if len(data) != 1:
        raise DataError(f"expected exactly one process, got {len(data)}")
    return data.series[0]


def run_named_test(
    data: MultiProcessData,
    test: str,
    estimator: Method | str = Method.SAMPLE,
    a: float = 0.5,
    pooled: bool = False,
    sidedness: str = "two_sided",
    pvalue: str = "asymptotic",
    permutations: int = 999,
    seed: int = 0,
) -> TestResult:
    """Dispatch a test by name, with asymptotic or permutation p-values."""
    estimator = Method(estimator)
    if test in SINGLE_TESTS:
        series = single_series(data)
        est = estimate(series, estimator)
        if test == "lr":
            result = trend_tests.lr_statistic(series, est, sidedness)
        elif test == "ks":
            result = trend_tests.ks_statistic(series, est)
        elif test == "cvm":
            result = trend_tests.cvm_statistic(series, est)
        elif test == "ad":
            result = trend_tests.ad_statistic(series, est)
        else:
            result = trend_tests.elr_statistic(series, est, a, sidedness)
    elif test in MULTI_TESTS:
        if test == "gl":
            result = trend_tests.gl_statistic(data, sidedness)
        else:
            if pooled:
                ests: Estimates | list[Estimates] = pooled_estimate(data, estimator)
            else:
                ests = [estimate(s, estimator) for s in data.series]
            if test == "lrm":
                result = trend_tests.lr_multi(data, ests, sidedness=sidedness)
            elif test == "elrm":
                result = trend_tests.elr_multi(data, ests, a=a, sidedness=sidedness)
            else:
                result = trend_tests.cvm_multi(data, ests, seed=seed)
    else:
        raise ValueError(f"unknown test {test!r}")

    if pvalue == "permutation":
        p = nulldist.permutation_pvalue(
            data, test, b=permutations, seed=seed, a=a,
            estimator=estimator, sidedness=sidedness, pooled=pooled,
        )
        result = TestResult(
            test=result.test, statistic=result.statistic, p_value=p,
            p_method="permutation",
            sidedness=sidedness if test in SIGNED_TESTS else None,
            n_effective=result.n_effective,
        )
    elif pvalue != "asymptotic":
        raise ValueError(f"unknown p-value method {pvalue!r}")
    return result


def build_trend(kind: str, b: float = 1.0, c: float = 0.0, d: float = 1.0,
                e: float | None = None, tau: float | None = None) -> Trend:
    if kind == "powerlaw":
        return PowerLawTrend(b)
    if kind == "constant":
        return ConstantTrend(d)
    if kind == "bathtub":
        if e is None or tau is None:
            raise ValueError("a bathtub trend needs both e and tau")
        return BathtubTrend(c=c, d=d, e=e, tau=tau)
    raise ValueError(f"unknown trend kind {kind!r}")


def resolve_tau(trend: Trend, tau: float | None, expected_n: float | None) -> float:
    if (tau is None) == (expected_n is None):
        raise ValueError("provide exactly one of tau or expected_n")
    if tau is not None:
        return tau
    return solve_tau_for_expected_n(trend, expected_n)


def simulate_batch(model: TrpModel, tau: float, seed: int, reps: int) -> MultiProcessData:
    processes = tuple(
        (f"sim{r + 1}", simulate_trp(model, tau, np.random.default_rng([seed, r])))
        for r in range(reps)
    )
    return MultiProcessData(processes)


def bridge_points(series: EventSeries, gamma: float) -> list[tuple[float, float]]:
    """(s, path value) pairs at 0, just after each jump, and 1."""
    from .bridge import build_bridge

    path = build_bridge(series, gamma)
    pts = [(0.0, 0.0)]
    for s in path.jump_points:
        pts.append((float(s), float(path(s))))
    if pts[-1][0] != 1.0:
        pts.append((1.0, 0.0))
    return pts
