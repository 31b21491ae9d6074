"""Command-line interface: a thin client over the library core.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric error.
Every numeric subcommand takes a --seed and is bit-reproducible.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import __version__, api
from .data import DataError, MultiProcessData, parse_events, to_long_csv
from .datasets import available_datasets, load_dataset
from .estimators import EstimatorError, Method, estimate, pooled_estimate
from .nulldist import SHIPPED_GRID, SHIPPED_M, SHIPPED_SEED, build_limit_table, shipped_table_path
from .study import StudyConfig, emit_results, run_study
from .trend_tests import InfiniteStatisticError
from .trp import TrpModel

_ESTIMATOR_CHOICE = click.Choice(["sample", "censored", "diff", "weibull"])
_TEST_CHOICE = click.Choice(["lr", "ks", "cvm", "ad", "elr", "lrm", "gl", "cvmm", "elrm"])


def _load_data(data: str, fmt: str | None, tau: float | None) -> MultiProcessData:
    if data in available_datasets():
        return load_dataset(data)
    path = Path(data)
    if not path.is_file():
        raise DataError(f"{data!r} is neither a bundled dataset ({', '.join(available_datasets())}) nor a file")
    if fmt is None:
        fmt = "json" if path.suffix.lower() == ".json" else "csv"
    return parse_events(path.read_text(), format=fmt, default_tau=tau)


data_options = [
    click.option("--data", required=True, help="Bundled dataset name (e.g. 'lhd') or a data file path."),
    click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default=None,
                 help="Input format; inferred from the file extension when omitted."),
    click.option("--tau", type=float, default=None,
                 help="Shared censoring time for CSV inputs without a #censoring section."),
]


def _with_options(opts):
    def wrap(fn):
        for opt in reversed(opts):
            fn = opt(fn)
        return fn
    return wrap


@click.group()
@click.version_option(__version__)
def cli():
    """Trend tests for time-censored recurrent event data."""


@cli.command(name="estimate")
@_with_options(data_options)
@click.option("--estimator", type=_ESTIMATOR_CHOICE, default="sample", show_default=True)
@click.option("--pooled", is_flag=True, help="Pool all processes into one common-distribution estimate.")
@click.option("--json", "as_json", is_flag=True, help="Emit machine-readable JSON.")
def estimate_cmd(data, fmt, tau, estimator, pooled, as_json):
    """Estimate the gap mean, standard deviation and coefficient of variation."""
    mpd = _load_data(data, fmt, tau)
    if pooled or len(mpd) > 1:
        est = pooled_estimate(mpd, estimator)
    else:
        est = estimate(mpd.series[0], estimator)
    if as_json:
        click.echo(json.dumps({"mu": est.mu, "sigma": est.sigma, "gamma": est.gamma,
                               "method": est.method.value}))
    else:
        click.echo(f"estimator: {est.method.value}")
        click.echo(f"mu    = {est.mu:.6g}")
        click.echo(f"sigma = {est.sigma:.6g}")
        click.echo(f"gamma = {est.gamma:.6g}")


@cli.command(name="test")
@_with_options(data_options)
@click.option("--test", "test_name", type=_TEST_CHOICE, default="lr", show_default=True)
@click.option("--a", type=click.FloatRange(0.0, 1.0), default=0.5, show_default=True,
              help="Split point of the extended Lewis-Robinson statistic.")
@click.option("--estimator", type=_ESTIMATOR_CHOICE, default="sample", show_default=True)
@click.option("--pooled", is_flag=True, help="Common-distribution mode for multi-process tests.")
@click.option("--sided", type=click.Choice(["two", "greater", "less"]), default="two", show_default=True)
@click.option("--pvalue", type=click.Choice(["asymptotic", "permutation"]), default="asymptotic",
              show_default=True)
@click.option("-B", "--permutations", type=click.IntRange(min=99), default=999, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--json", "as_json", is_flag=True, help="Emit the TestResult as JSON.")
def test_cmd(data, fmt, tau, test_name, a, estimator, pooled, sided, pvalue, permutations, seed, as_json):
    """Run a trend test and report the statistic and p-value."""
    mpd = _load_data(data, fmt, tau)
    sidedness = {"two": "two_sided", "greater": "greater", "less": "less"}[sided]
    result = api.run_named_test(
        mpd, test_name, estimator=estimator, a=a, pooled=pooled,
        sidedness=sidedness, pvalue=pvalue, permutations=permutations, seed=seed,
    )
    if as_json:
        click.echo(json.dumps(result.to_dict()))
    else:
        click.echo(f"test      : {result.test}")
        click.echo(f"statistic : {result.statistic:.6g}")
        click.echo(f"p-value   : {result.p_value:.4g}  ({result.p_method}"
                   + (f", {result.sidedness}" if result.sidedness else "") + ")")
        click.echo(f"estimator : {estimator}")
        click.echo(f"events    : {result.n_effective}")


@cli.command()
@click.option("--trend", required=True,
              help="Trend spec: 'powerlaw:b=1.5', 'bathtub:c=1,d=1,e=10', or 'constant:d=1'.")
@click.option("--beta", type=float, default=1.0, show_default=True,
              help="Weibull shape of the unit-mean renewal distribution.")
@click.option("--tau", type=float, default=None, help="Censoring time.")
@click.option("--expected-n", type=float, default=None,
              help="Solve the censoring time so this many events are expected.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--reps", type=click.IntRange(min=1), default=1, show_default=True,
              help="Number of independent processes to simulate.")
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Write the long CSV here instead of stdout.")
def simulate(trend, beta, tau, expected_n, seed, reps, out):
    """Simulate trend-renewal processes and emit long CSV."""
    kind, params = _parse_trend_spec(trend, tau)
    trend_obj = api.build_trend(kind, **params)
    tau_val = api.resolve_tau(trend_obj, tau, expected_n)
    data = api.simulate_batch(TrpModel(trend_obj, beta), tau_val, seed, reps)
    text = to_long_csv(data)
    if out:
        Path(out).write_text(text)
        click.echo(f"wrote {out}", err=True)
    else:
        click.echo(text, nl=False)


def _parse_trend_spec(spec: str, tau: float | None):
    kind, _, rest = spec.partition(":")
    if kind not in ("powerlaw", "bathtub", "constant"):
        raise click.UsageError(f"unknown trend {kind!r} in --trend")
    params: dict[str, float] = {}
    if rest:
        for item in rest.split(","):
            key, _, value = item.partition("=")
            if key not in ("b", "c", "d", "e"):
                raise click.UsageError(f"unknown trend parameter {key!r} in --trend")
            try:
                params[key] = float(value)
            except ValueError:
                raise click.UsageError(f"non-numeric trend parameter {item!r}") from None
    if kind == "bathtub":
        params["tau"] = tau
    return kind, params


@cli.command()
@click.option("--scenario", type=click.Choice(["level_rp", "power_monotonic", "power_bathtub", "multi_process"]),
              required=True)
@click.option("--grid", required=True,
              help="Comma-separated grid values (expected counts, trend b, or bathtub c).")
@click.option("--tests", default="lr,ks,ad,elr", show_default=True, help="Comma-separated test names.")
@click.option("--beta", type=float, default=1.5, show_default=True)
@click.option("--expected-n", type=float, default=30.0, show_default=True)
@click.option("--m", type=click.IntRange(min=1), default=1, show_default=True)
@click.option("--reps", type=click.IntRange(min=100), default=10_000, show_default=True)
@click.option("--alpha", type=click.FloatRange(0.0, 1.0, min_open=True, max_open=True),
              default=0.05, show_default=True)
@click.option("--estimator", type=_ESTIMATOR_CHOICE, default="sample", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--jobs", type=int, default=1, show_default=True)
@click.option("--out", type=click.Path(file_okay=False), required=True)
def study(scenario, grid, tests, beta, expected_n, m, reps, alpha, estimator, seed, jobs, out):
    """Run a level/power study and write tidy CSV plus a JSON summary."""
    cfg = StudyConfig(
        scenario=scenario,
        grid=tuple(float(g) for g in grid.split(",")),
        tests=tuple(t.strip() for t in tests.split(",")),
        shape=beta,
        expected_n=expected_n,
        m=m,
        replications=reps,
        alpha=alpha,
        seed=seed,
        estimator=Method(estimator),
    )
    result = run_study(cfg, n_jobs=jobs)
    csv_path, json_path = emit_results(result, out)
    click.echo(f"wrote {csv_path} and {json_path}", err=True)


@cli.command(name="plot-bridge")
@_with_options(data_options)
@click.option("--gamma", type=float, default=None,
              help="Scaling coefficient of variation; estimated from the data when omitted.")
@click.option("--estimator", type=_ESTIMATOR_CHOICE, default="sample", show_default=True)
def plot_bridge(data, fmt, tau, gamma, estimator):
    """Emit (s, path value) CSV pairs of the tied-down process."""
    mpd = _load_data(data, fmt, tau)
    series = api.single_series(mpd)
    if gamma is None:
        gamma = estimate(series, estimator).gamma
    click.echo("s,value")
    for s, v in api.bridge_points(series, gamma):
        click.echo(f"{s!r},{v!r}")


@cli.command()
@click.option("--kind", type=click.Choice(["cvm", "ad", "both"]), default="both", show_default=True)
@click.option("--mc-size", type=click.IntRange(min=1000), default=SHIPPED_M, show_default=True)
@click.option("--grid-n", type=click.IntRange(min=1000), default=SHIPPED_GRID, show_default=True)
@click.option("--seed", type=int, default=SHIPPED_SEED, show_default=True)
@click.option("--out", type=click.Path(file_okay=False), default=None,
              help="Output directory; defaults to the package's shipped-table location.")
def tables(kind, mc_size, grid_n, seed, out):
    """Build (or rebuild) the Monte Carlo limit tables."""
    kinds = ["cvm", "ad"] if kind == "both" else [kind]
    for k in kinds:
        click.echo(f"building {k} table: M={mc_size}, grid={grid_n}, seed={seed} ...", err=True)
        table = build_limit_table(k, m=mc_size, grid_n=grid_n, seed=seed)
        if out:
            path = Path(out) / f"{k}_limit.npz"
            path.parent.mkdir(parents=True, exist_ok=True)
        else:
            path = shipped_table_path(k)
            Path(str(path)).parent.mkdir(parents=True, exist_ok=True)
        table.save(str(path))
        click.echo(f"wrote {path}", err=True)


@cli.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(host, port):
    """Run the HTTP service (requires uvicorn)."""
    try:
        import uvicorn
    except ImportError:
        raise click.ClickException("uvicorn is not installed; install rptrend[serve]") from None
    uvicorn.run("rptrend.service:app", host=host, port=port)


def main(argv=None) -> int:
    """Entry point with the contracted exit codes."""
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.exceptions.Exit as exc:
        return 0 if exc.exit_code == 0 else 1
    except click.UsageError as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        if exc.ctx is not None:
            click.echo(exc.ctx.get_usage(), err=True)
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except DataError as exc:
        click.echo(f"data error: {exc}", err=True)
        return 2
    except (EstimatorError, InfiniteStatisticError, ValueError) as exc:
        click.echo(f"numeric error: {exc}", err=True)
        return 3


if __name__ == "__main__":
    sys.exit(main())
