import numpy as np
import pytest

from rptrend import EventSeries, load_dataset, sample_estimates


@pytest.fixture(scope="session")
def lhd():
    return load_dataset("lhd")


@pytest.fixture(scope="session")
def lhd_series(lhd):
    return lhd.series[0]


@pytest.fixture(scope="session")
def lhd_sample_est(lhd_series):
    return sample_estimates(lhd_series)


def random_series(rng: np.random.Generator, n_min: int = 3, n_max: int = 60) -> EventSeries:
    """A valid random event series with gaps from a lognormal."""
    n = int(rng.integers(n_min, n_max + 1))
    gaps = rng.lognormal(mean=0.0, sigma=0.7, size=n + 1)
    times = np.cumsum(gaps)
    return EventSeries(tuple(times[:-1]), float(times[-1]) + float(rng.uniform(0, 1)))
