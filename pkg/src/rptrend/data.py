"""Data model and ingestion for time-censored recurrent event data.

An :class:`EventSeries` holds the ordered event times of one process
observed on ``(0, tau]``; a :class:`MultiProcessData` bundles several
independent processes. Both are immutable and validated on construction.
Ingestion supports a long CSV format and a JSON format, see
:func:`parse_events`.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

import numpy as np


class DataError(ValueError):
    """Input data violate the event-series contract."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


@dataclass(frozen=True)
class EventSeries:
    """Event times of one process, time censored at ``censoring_time``.

    Event times must be strictly increasing, strictly positive and not
    exceed the censoring time. An event exactly at the censoring time is
    allowed (the final censored gap is then 0). Equal event times are
    rejected, never jittered: the renewal null assumes continuous gap
    distributions, so ties are a data problem the caller must resolve.
    """

    event_times: tuple[float, ...]
    censoring_time: float

    def __post_init__(self):
        tau = float(self.censoring_time)
        if not np.isfinite(tau) or tau <= 0:
            raise DataError(f"censoring time must be a positive finite number, got {tau!r}")
        times = tuple(float(t) for t in self.event_times)
        prev = 0.0
        for t in times:
            if not np.isfinite(t):
                raise DataError(f"non-finite event time {t!r}")
            if t <= prev:
                if t == prev and prev > 0.0:
                    raise DataError(f"duplicate event time {t}")
                raise DataError(f"event times must be strictly increasing and positive, got {t} after {prev}")
            prev = t
        if times and times[-1] > tau:
            raise DataError(f"event after censoring time: {times[-1]} > tau={tau}")
        object.__setattr__(self, "event_times", times)
        object.__setattr__(self, "censoring_time", tau)

    @property
    def n_events(self) -> int:
        return len(self.event_times)

    @property
    def times(self) -> np.ndarray:
        return np.asarray(self.event_times, dtype=float)


@dataclass(frozen=True)
class MultiProcessData:
    """A collection of independently observed processes with unique ids."""

    processes: tuple[tuple[str, EventSeries], ...]

    def __post_init__(self):
        procs = tuple((str(pid), series) for pid, series in self.processes)
        if not procs:
            raise DataError("at least one process is required")
        ids = [pid for pid, _ in procs]
        if len(set(ids)) != len(ids):
            dup = sorted({i for i in ids if ids.count(i) > 1})
            raise DataError(f"duplicate process ids: {', '.join(dup)}")
        object.__setattr__(self, "processes", procs)

    @property
    def ids(self) -> list[str]:
        return [pid for pid, _ in self.processes]

    @property
    def series(self) -> list[EventSeries]:
        return [s for _, s in self.processes]

    def __len__(self) -> int:
        return len(self.processes)

    def __getitem__(self, pid: str) -> EventSeries:
        for p, s in self.processes:
            if p == pid:
                return s
        raise KeyError(pid)

    @classmethod
    def single(cls, series: EventSeries, pid: str = "p1") -> "MultiProcessData":
        return cls(((pid, series),))


def interevent_times(series: EventSeries) -> tuple[np.ndarray, float]:
    """Gap times ``X_i = T_i - T_{i-1}`` and the censored final remainder.

    The gaps plus the remainder partition ``(0, tau]``, so their sum
    equals the censoring time up to rounding.
    """
    times = series.times
    gaps = np.diff(times, prepend=0.0)
    remainder = series.censoring_time - (times[-1] if len(times) else 0.0)
    return gaps, float(remainder)


def _parse_float(value: str, what: str, line: int) -> float:
    try:
        return float(value)
    except ValueError:
        raise DataError(f"non-numeric {what}: {value!r}", line=line) from None


def _parse_long_csv(text: str, default_tau: float | None) -> MultiProcessData:
    events: dict[str, list[tuple[float, int]]] = {}
    taus: dict[str, float] = {}
    order: list[str] = []
    in_censoring = False
    reader = csv.reader(io.StringIO(text))
    for lineno, row in enumerate(reader, start=1):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        first = row[0].strip()
        if first.startswith("#"):
            if first == "#censoring":
                in_censoring = True
            continue
        if lineno == 1 and first == "process_id":
            continue
        if len(row) != 2:
            raise DataError(f"expected two fields, got {len(row)}", line=lineno)
        pid = first
        if in_censoring:
            taus[pid] = _parse_float(row[1], "censoring time", lineno)
        else:
            if pid not in events:
                events[pid] = []
                order.append(pid)
            events[pid].append((_parse_float(row[1], "event time", lineno), lineno))
    if not events:
        raise DataError("no event rows found")

    processes = []
    for pid in order:
        rows = sorted(events[pid])
        for (t1, l1), (t2, l2) in zip(rows, rows[1:]):
            if t1 == t2:
                raise DataError(f"duplicate event time {t2} in process {pid!r}", line=l2)
        tau = taus.get(pid, default_tau)
        if tau is None:
            raise DataError(f"censoring time missing for process {pid!r} (add a #censoring section or pass a shared tau)")
        for t, lineno in rows:
            if t > tau:
                raise DataError(f"event after censoring time: {t} > tau={tau} in process {pid!r}", line=lineno)
        try:
            series = EventSeries(tuple(t for t, _ in rows), tau)
        except DataError as exc:
            raise DataError(f"process {pid!r}: {exc}", line=rows[0][1]) from None
        processes.append((pid, series))
    return MultiProcessData(tuple(processes))


def _parse_json(text: str) -> MultiProcessData:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DataError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict) or "processes" not in doc:
        raise DataError("JSON document must be an object with a 'processes' list")
    processes = []
    for entry in doc["processes"]:
        try:
            pid = entry["id"]
            tau = entry["tau"]
            times = entry["events"]
        except (KeyError, TypeError) as exc:
            raise DataError(f"malformed process entry: {exc}") from None
        series = EventSeries(tuple(sorted(float(t) for t in times)), float(tau))
        if len(set(series.event_times)) != len(series.event_times):
            raise DataError(f"duplicate event time in process {pid!r}")
        processes.append((str(pid), series))
    return MultiProcessData(tuple(processes))


def parse_events(text: str, format: str = "csv", default_tau: float | None = None) -> MultiProcessData:
    """Parse recurrent event data from long CSV or JSON text.

    Long CSV has a ``process_id,event_time`` header, one event per row,
    and censoring times either in a trailing section introduced by a
    ``#censoring`` line (rows ``process_id,tau``) or through
    ``default_tau`` when all processes share one censoring time. The
    JSON format mirrors the data model::

        {"processes": [{"id": "p1", "tau": 2000.0, "events": [16, 39]}]}

    Inputs violating the data contract are rejected with line numbers
    where available; nothing is silently repaired.
    """
    if format == "csv":
        return _parse_long_csv(text, default_tau)
    if format == "json":
        return _parse_json(text)
    raise DataError(f"unknown format {format!r} (expected 'csv' or 'json')")


def to_json(data: MultiProcessData) -> str:
    doc = {
        "processes": [
            {"id": pid, "tau": s.censoring_time, "events": list(s.event_times)}
            for pid, s in data.processes
        ]
    }
    return json.dumps(doc, indent=2)


def to_long_csv(data: MultiProcessData) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["process_id", "event_time"])
    for pid, series in data.processes:
        for t in series.event_times:
            writer.writerow([pid, repr(t)])
    writer.writerow(["#censoring"])
    for pid, series in data.processes:
        writer.writerow([pid, repr(series.censoring_time)])
    return out.getvalue()
