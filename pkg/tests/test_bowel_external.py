"""Golden tests for the 19-person small-bowel motility case study.

The underlying measurements are not redistributable with this package,
so these tests ship disabled. To enable them, place the data as a long
CSV at tests/data/small_bowel_motility.csv:

    process_id,event_time
    p1,112.0
    ...
    #censoring
    p1,533.0
    ...

one row per observed cycle end per person, censoring times in the
#censoring section. The suite then checks the published pooled
estimates and multi-process test results.
"""

from pathlib import Path

import pytest

from rptrend import parse_events, pooled_estimate
from rptrend.api import run_named_test

DATA_PATH = Path(__file__).parent / "data" / "small_bowel_motility.csv"

pytestmark = pytest.mark.skipif(
    not DATA_PATH.is_file(),
    reason=f"external dataset not present; drop it in at {DATA_PATH}",
)


@pytest.fixture(scope="module")
def bowel():
    return parse_events(DATA_PATH.read_text(), format="csv")


def test_shape(bowel):
    assert len(bowel) == 19
    complete = sum(s.n_events for s in bowel.series)
    assert complete == 80


def test_pooled_estimates(bowel):
    est = pooled_estimate(bowel, "sample")
    assert est.mu == pytest.approx(98.76, abs=0.01)
    assert est.sigma == pytest.approx(52.62, abs=0.01)
    assert est.gamma == pytest.approx(0.533, abs=0.001)


def test_multi_process_lr(bowel):
    result = run_named_test(bowel, "lrm", pooled=True)
    assert result.statistic == pytest.approx(3.67, abs=0.01)
    assert result.p_value == pytest.approx(0.00024, abs=0.00005)


def test_generalized_laplace(bowel):
    result = run_named_test(bowel, "gl")
    assert result.p_value == pytest.approx(0.007, abs=0.001)
