import numpy as np
import pytest
from hypothesis import given, strategies as st

from rptrend import (
    DataError,
    EventSeries,
    MultiProcessData,
    interevent_times,
    parse_events,
    to_json,
    to_long_csv,
)

CSV_SINGLE = """process_id,event_time
p1,16
p1,39
#censoring
p1,2000
"""

JSON_SINGLE = '{"processes": [{"id": "p1", "tau": 2000.0, "events": [16, 39]}]}'


class TestEventSeries:
    def test_direct_construction(self):
        s = EventSeries((16.0, 39.0), 2000.0)
        assert s.n_events == 2
        assert s.censoring_time == 2000.0

    def test_event_at_tau_allowed(self):
        s = EventSeries((1.0, 5.0), 5.0)
        _, remainder = interevent_times(s)
        assert remainder == 0.0

    @pytest.mark.parametrize(
        "times, tau",
        [
            ((5.0, 5.0), 10.0),      # tie
            ((3.0, 2.0), 10.0),      # out of order
            ((0.0, 2.0), 10.0),      # non-positive time
            ((-1.0, 2.0), 10.0),     # negative time
            ((2.0, 11.0), 10.0),     # beyond tau
        ],
    )
    def test_invalid_series_rejected(self, times, tau):
        with pytest.raises(DataError):
            EventSeries(times, tau)

    def test_invalid_tau(self):
        with pytest.raises(DataError):
            EventSeries((1.0,), 0.0)


class TestMultiProcessData:
    def test_duplicate_ids_rejected(self):
        s = EventSeries((1.0,), 2.0)
        with pytest.raises(DataError, match="duplicate process ids"):
            MultiProcessData((("a", s), ("a", s)))

    def test_empty_rejected(self):
        with pytest.raises(DataError):
            MultiProcessData(())

    def test_lookup(self):
        s = EventSeries((1.0,), 2.0)
        data = MultiProcessData.single(s, pid="x")
        assert data["x"] is s
        with pytest.raises(KeyError):
            data["y"]


class TestInterevents:
    def test_simple_subtraction(self):
        s = EventSeries((16.0, 39.0), 2000.0)
        gaps, remainder = interevent_times(s)
        assert gaps.tolist() == [16.0, 23.0]
        assert remainder == 1961.0

    def test_lhd_remainder(self, lhd_series):
        gaps, remainder = interevent_times(lhd_series)
        assert len(gaps) == 36
        assert remainder == 30.0

    def test_gaps_sum_to_tau(self, lhd_series):
        gaps, remainder = interevent_times(lhd_series)
        assert gaps.sum() + remainder == pytest.approx(lhd_series.censoring_time, abs=1e-9)


class TestParsing:
    def test_csv_single(self):
        data = parse_events(CSV_SINGLE, format="csv")
        assert data.ids == ["p1"]
        assert data["p1"].event_times == (16.0, 39.0)
        assert data["p1"].censoring_time == 2000.0

    def test_csv_shared_tau(self):
        text = "process_id,event_time\np1,16\np1,39\n"
        data = parse_events(text, format="csv", default_tau=2000.0)
        assert data["p1"].censoring_time == 2000.0

    def test_csv_missing_tau(self):
        with pytest.raises(DataError, match="censoring time missing"):
            parse_events("process_id,event_time\np1,16\n", format="csv")

    def test_csv_event_after_tau_reports_line(self):
        text = "process_id,event_time\np1,2500\n#censoring\np1,2000\n"
        with pytest.raises(DataError, match="line 2.*after censoring"):
            parse_events(text, format="csv")

    def test_csv_duplicate_event_reports_line(self):
        text = "process_id,event_time\np1,10\np1,10\n#censoring\np1,100\n"
        with pytest.raises(DataError, match="duplicate event time"):
            parse_events(text, format="csv")

    def test_csv_non_numeric_reports_line(self):
        text = "process_id,event_time\np1,abc\n#censoring\np1,100\n"
        with pytest.raises(DataError, match="line 2.*non-numeric"):
            parse_events(text, format="csv")

    def test_csv_unsorted_rows_are_sorted(self):
        text = "process_id,event_time\np1,39\np1,16\n#censoring\np1,2000\n"
        data = parse_events(text, format="csv")
        assert data["p1"].event_times == (16.0, 39.0)

    def test_json(self):
        data = parse_events(JSON_SINGLE, format="json")
        assert data["p1"].event_times == (16.0, 39.0)

    def test_json_malformed(self):
        with pytest.raises(DataError):
            parse_events("{not json", format="json")

    def test_lhd_shape(self, lhd_series):
        assert lhd_series.n_events == 36
        assert lhd_series.event_times[-1] == 1970.0
        assert lhd_series.censoring_time == 2000.0


@st.composite
def multi_process_data(draw):
    n_procs = draw(st.integers(1, 4))
    processes = []
    for j in range(n_procs):
        n = draw(st.integers(0, 8))
        gaps = draw(
            st.lists(st.floats(0.01, 100.0, allow_nan=False), min_size=n + 1, max_size=n + 1)
        )
        times = np.cumsum(np.asarray(gaps))
        processes.append((f"p{j}", EventSeries(tuple(times[:-1]), float(times[-1]))))
    return MultiProcessData(tuple(processes))


class TestRoundTrip:
    @given(multi_process_data())
    def test_json_round_trip(self, data):
        assert parse_events(to_json(data), format="json") == data

    @given(multi_process_data())
    def test_csv_round_trip(self, data):
        if all(s.n_events > 0 for s in data.series):
            assert parse_events(to_long_csv(data), format="csv") == data

    @given(multi_process_data())
    def test_gap_partition(self, data):
        for s in data.series:
            if s.n_events:
                gaps, remainder = interevent_times(s)
                assert gaps.sum() + remainder == pytest.approx(s.censoring_time, rel=1e-12)
