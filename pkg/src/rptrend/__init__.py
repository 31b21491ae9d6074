"""Trend tests for time-censored recurrent event data under the null
hypothesis of a renewal process."""

from .bridge import BridgePath, build_bridge, quad_functional
from .data import (
    DataError,
    EventSeries,
    MultiProcessData,
    interevent_times,
    parse_events,
    to_json,
    to_long_csv,
)
from .datasets import available_datasets, load_dataset
from .estimators import (
    Estimates,
    EstimatorError,
    Method,
    WeibullFit,
    censored_estimates,
    diff_variance,
    estimate,
    fit_weibull_rp,
    pooled_estimate,
    sample_estimates,
)
from .nulldist import (
    LimitTable,
    build_limit_table,
    get_limit_table,
    kolmogorov_cdf,
    limit_pvalue,
    normal_two_sided_p,
    permutation_pvalue,
)
from .study import StudyConfig, StudyResult, emit_results, run_study
from .trend_tests import (
    InfiniteStatisticError,
    TestResult,
    ad_statistic,
    cvm_multi,
    cvm_statistic,
    elr_multi,
    elr_statistic,
    gl_statistic,
    ks_statistic,
    lr_multi,
    lr_statistic,
)
from .trp import (
    BathtubTrend,
    ConstantTrend,
    PowerLawTrend,
    TrpModel,
    bathtub_equal_phases,
    lambda_inverse,
    simulate_trp,
    solve_tau_for_expected_n,
)

__version__ = "0.1.0"
