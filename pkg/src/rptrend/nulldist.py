"""p-value engines: normal tails, the Kolmogorov distribution, Monte
Carlo tables for Brownian-bridge functionals, and gap permutation.

The Cramer-von Mises and Anderson-Darling type statistics have limit
laws without convenient closed forms here; both (and arbitrary weighted
sums, needed for multi-process tests) are handled by one mechanism:
sorted Monte Carlo samples of the limit functional, simulated from
discretized Brownian bridges. Tables for the two standard laws are
shipped with the package (M = 10^6 draws, grid 2^14, fixed seed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources

import numpy as np

TABLE_FORMAT_VERSION = 1
SHIPPED_M = 1_000_000
SHIPPED_GRID = 2**14
SHIPPED_SEED = 20240813
# fixed internal batch so tables are bit-reproducible regardless of how
# the build is chunked or parallelized
_BATCH = 2000

_KIND_CODES = {"cvm": 0, "ad": 1, "weighted_sum": 2}


def normal_two_sided_p(z: float) -> float:
    """2 * (1 - Phi(|z|))."""
    return math.erfc(abs(z) / math.sqrt(2.0))


def normal_one_sided_p(z: float, sidedness: str) -> float:
    if sidedness == "greater":
        return 0.5 * math.erfc(z / math.sqrt(2.0))
    if sidedness == "less":
        return 0.5 * math.erfc(-z / math.sqrt(2.0))
    return normal_two_sided_p(z)


def kolmogorov_cdf(x: float) -> float:
    """CDF of sup |Brownian bridge| by its alternating series."""
    if x <= 0:
        return 0.0
    total = 0.0
    sign = 1.0
    k = 1
    while True:
        term = math.exp(-2.0 * k * k * x * x)
        total += sign * term
        if term < 1e-12:
            break
        sign = -sign
        k += 1
    return max(0.0, min(1.0, 1.0 - 2.0 * total))


@dataclass(frozen=True)
class LimitTable:
    """Sorted Monte Carlo sample of a limiting null distribution."""

    kind: str
    draws: np.ndarray  # sorted ascending
    m: int
    grid_n: int
    seed: int
    weights: tuple[float, ...] | None = None

    def p_value(self, statistic: float) -> float:
        """Upper-tail p with the add-one rule, so p is never 0."""
        n_ge = self.m - np.searchsorted(self.draws, statistic, side="left")
        return float((1 + n_ge) / (self.m + 1))

    def save(self, path) -> None:
        meta = np.array(
            [TABLE_FORMAT_VERSION, _KIND_CODES[self.kind], self.m, self.grid_n, self.seed],
            dtype=np.int64,
        )
        weights = np.asarray(self.weights if self.weights is not None else [], dtype=float)
        np.savez_compressed(path, meta=meta, weights=weights, draws=self.draws)

    @classmethod
    def load(cls, path) -> "LimitTable":
        with np.load(path) as npz:
            meta = npz["meta"]
            if int(meta[0]) != TABLE_FORMAT_VERSION:
                raise ValueError(f"unsupported table format version {int(meta[0])}")
            kind = {v: k for k, v in _KIND_CODES.items()}[int(meta[1])]
            weights = tuple(float(w) for w in npz["weights"])
            return cls(
                kind=kind,
                draws=npz["draws"],
                m=int(meta[2]),
                grid_n=int(meta[3]),
                seed=int(meta[4]),
                weights=weights or None,
            )


def _batch_draws(kind: str, batch_size: int, grid_n: int, rng: np.random.Generator,
                 weights: np.ndarray | None) -> np.ndarray:
    s = np.arange(1, grid_n) / grid_n
    n_bridges = 1 if weights is None else len(weights)
    incr = rng.standard_normal((batch_size, n_bridges, grid_n)) / math.sqrt(grid_n)
    w_path = np.cumsum(incr, axis=2)
    b = w_path[:, :, :-1] - s[None, None, :] * w_path[:, :, -1:]
    b2 = b * b
    if kind == "cvm":
        return b2[:, 0, :].mean(axis=1)
    if kind == "ad":
        # integrand evaluated at s in [1/grid_n, 1 - 1/grid_n]
        return (b2[:, 0, :] / (s * (1.0 - s))[None, :]).mean(axis=1)
    if kind == "weighted_sum":
        per = b2.mean(axis=2)
        return per @ weights
    raise ValueError(f"unknown table kind {kind!r}")


def build_limit_table(kind: str, m: int, grid_n: int, seed: int,
                      weights=None) -> LimitTable:
    """Simulate m draws of the limit functional on discretized Brownian
    bridges. Deterministic given the seed: replicate batch i uses the
    stream seeded by (seed, i), so batches may be computed in any order
    or in parallel."""
    if m < 1000:
        raise ValueError(f"m must be at least 1000, got {m}")
    if grid_n < 1000:
        raise ValueError(f"grid_n must be at least 1000, got {grid_n}")
    if kind == "weighted_sum":
        if weights is None or len(weights) < 1:
            raise ValueError("weighted_sum tables need weights")
        weights = np.asarray(weights, dtype=float)
    elif weights is not None:
        raise ValueError(f"weights are only meaningful for weighted_sum, not {kind!r}")
    draws = np.empty(m)
    for i, start in enumerate(range(0, m, _BATCH)):
        size = min(_BATCH, m - start)
        rng = np.random.default_rng([seed, i])
        draws[start:start + size] = _batch_draws(kind, size, grid_n, rng, weights)[:size]
    draws.sort()
    return LimitTable(
        kind=kind, draws=draws, m=m, grid_n=grid_n, seed=seed,
        weights=tuple(float(w) for w in weights) if weights is not None else None,
    )


_shipped_cache: dict[str, LimitTable] = {}


def shipped_table_path(kind: str):
    return resources.files("rptrend").joinpath(f"tables/{kind}_limit.npz")


def get_limit_table(kind: str) -> LimitTable:
    """Load (and cache) the shipped table for ``cvm`` or ``ad``."""
    if kind not in ("cvm", "ad"):
        raise ValueError(f"no shipped table for kind {kind!r}")
    if kind not in _shipped_cache:
        path = shipped_table_path(kind)
        if not path.is_file():
            raise FileNotFoundError(
                f"shipped limit table for {kind!r} not found; build it with 'rptrend tables'"
            )
        with resources.as_file(path) as p:
            _shipped_cache[kind] = LimitTable.load(p)
    return _shipped_cache[kind]


def limit_pvalue(kind: str, statistic: float, table: LimitTable | None = None) -> float:
    """Upper-tail p-value of a statistic against a limit table."""
    if table is None:
        table = get_limit_table(kind)
    elif table.kind != kind:
        raise ValueError(f"table kind {table.kind!r} does not match requested {kind!r}")
    return table.p_value(statistic)


def permutation_pvalue(data, test: str, b: int, seed: int, a: float = 0.5,
                       estimator="sample", sidedness: str = "two_sided",
                       pooled: bool = False) -> float:
    """Permutation p-value: shuffle the complete gaps (per process,
    independently), keep the censored remainder as the final interval,
    rebuild the event times and recompute the statistic with the
    coefficient of variation re-estimated on each replicate.

    Signed statistics are compared two-sided on absolute value by
    default; the nonnegative statistics (ks/cvm/ad) upper-tailed.
    """
    from .data import EventSeries, MultiProcessData, interevent_times
    from .estimators import gamma_from_arrays
    from .trend_tests import SIGNED_TESTS, compute_statistic

    if b < 99:
        raise ValueError(f"need at least 99 permutation replicates, got {b}")
    if isinstance(data, EventSeries):
        data = MultiProcessData.single(data)
    gap_sets = []
    raw = []
    for series in data.series:
        gaps, _ = interevent_times(series)
        if len(gaps) < 2:
            raise ValueError("permutation needs at least 2 complete gaps per process")
        gap_sets.append((gaps, series.censoring_time))
        raw.append((series.times, series.censoring_time))

    def estimate_gammas(series_list):
        if pooled:
            pooled_gaps = np.concatenate([np.diff(t, prepend=0.0) for t, _ in series_list])
            mu = pooled_gaps.mean()
            g = math.sqrt(np.sum((pooled_gaps - mu) ** 2) / (len(pooled_gaps) - 1)) / mu
            return [g] * len(series_list)
        return [gamma_from_arrays(t, tau, estimator) for t, tau in series_list]

    observed = compute_statistic(raw, test, estimate_gammas(raw), a=a)
    signed = test in SIGNED_TESTS

    count = 0
    for rep in range(b):
        rng = np.random.default_rng([seed, rep])
        perm = []
        for gaps, tau in gap_sets:
            # the censored remainder stays in final position; only the
            # complete gaps are exchanged
            times = np.minimum(np.cumsum(rng.permutation(gaps)), tau)
            perm.append((times, tau))
        stat = compute_statistic(perm, test, estimate_gammas(perm), a=a)
        if signed and sidedness == "two_sided":
            hit = abs(stat) >= abs(observed)
        elif signed and sidedness == "greater":
            hit = stat >= observed
        elif signed and sidedness == "less":
            hit = stat <= observed
        else:
            hit = stat >= observed
        count += bool(hit)
    return (1 + count) / (b + 1)
