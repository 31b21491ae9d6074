"""Bundled example datasets, loadable by name."""

from __future__ import annotations

from .data import DataError, EventSeries, MultiProcessData

# Failure times (hours) of a load-haul-dump machine in a Swedish mine,
# time censored at 2000 hours.
_LHD_TIMES = (
    16.0, 39.0, 71.0, 95.0, 98.0, 110.0, 114.0, 226.0, 294.0, 344.0,
    555.0, 599.0, 757.0, 822.0, 963.0, 1077.0, 1167.0, 1202.0, 1257.0,
    1317.0, 1345.0, 1372.0, 1402.0, 1536.0, 1625.0, 1643.0, 1675.0,
    1726.0, 1736.0, 1772.0, 1796.0, 1799.0, 1814.0, 1868.0, 1894.0,
    1970.0,
)
_LHD_TAU = 2000.0


def load_dataset(name: str) -> MultiProcessData:
    """Load a bundled dataset by id. Currently available: ``lhd``."""
    if name == "lhd":
        return MultiProcessData.single(EventSeries(_LHD_TIMES, _LHD_TAU), pid="lhd")
    raise DataError(f"unknown dataset {name!r} (available: {', '.join(available_datasets())})")


def available_datasets() -> list[str]:
    return ["lhd"]
