"""FastAPI service exposing estimation, testing, simulation and bridge
evaluation over HTTP. Run with ``rptrend serve`` or
``uvicorn rptrend.service:app``."""

from __future__ import annotations

from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse

from . import __version__, api
from .data import DataError
from .datasets import available_datasets, load_dataset
from .estimators import EstimatorError, Method, estimate, pooled_estimate
from .schemas import (
    BridgePoint,
    BridgeRequest,
    BridgeResponse,
    EstimateRequest,
    EstimatesOut,
    ProcessIn,
    SimulateRequest,
    SimulateResponse,
    TestRequest,
    TestResponse,
)
from .trend_tests import InfiniteStatisticError

app = FastAPI(
    title="rptrend",
    version=__version__,
    description="Trend tests for time-censored recurrent event data under a renewal-process null.",
)


@app.exception_handler(DataError)
async def _data_error(request, exc: DataError):
    return JSONResponse(status_code=422, content={"detail": str(exc)})


@app.exception_handler(EstimatorError)
async def _estimator_error(request, exc: EstimatorError):
    return JSONResponse(status_code=422, content={"detail": str(exc)})


@app.exception_handler(InfiniteStatisticError)
async def _infinite_error(request, exc: InfiniteStatisticError):
    return JSONResponse(status_code=422, content={"detail": str(exc)})


@app.exception_handler(ValueError)
async def _value_error(request, exc: ValueError):
    return JSONResponse(status_code=422, content={"detail": str(exc)})


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.get("/datasets")
def datasets() -> dict:
    return {"datasets": available_datasets()}


@app.get("/datasets/{name}")
def dataset(name: str) -> dict:
    try:
        data = load_dataset(name)
    except DataError as exc:
        raise HTTPException(status_code=404, detail=str(exc)) from None
    return {
        "processes": [
            {"id": pid, "tau": s.censoring_time, "events": list(s.event_times)}
            for pid, s in data.processes
        ]
    }


@app.post("/estimate", response_model=EstimatesOut)
def estimate_endpoint(req: EstimateRequest) -> EstimatesOut:
    data = req.data.to_domain()
    if req.pooled or len(data) > 1:
        est = pooled_estimate(data, Method(req.estimator))
    else:
        est = estimate(data.series[0], Method(req.estimator))
    return EstimatesOut(mu=est.mu, sigma=est.sigma, gamma=est.gamma, method=est.method.value)


@app.post("/test", response_model=TestResponse)
def test_endpoint(req: TestRequest) -> TestResponse:
    result = api.run_named_test(
        req.data.to_domain(),
        req.test,
        estimator=req.estimator,
        a=req.a,
        pooled=req.pooled,
        sidedness=req.sidedness,
        pvalue=req.pvalue,
        permutations=req.permutations,
        seed=req.seed,
    )
    return TestResponse(**result.to_dict())


@app.post("/simulate", response_model=SimulateResponse)
def simulate_endpoint(req: SimulateRequest) -> SimulateResponse:
    trend = api.build_trend(req.trend, b=req.b, c=req.c, d=req.d, e=req.e, tau=req.tau)
    tau = api.resolve_tau(trend, req.tau, req.expected_n)
    from .trp import TrpModel

    data = api.simulate_batch(TrpModel(trend, req.shape), tau, req.seed, req.reps)
    return SimulateResponse(
        processes=[
            ProcessIn(id=pid, tau=s.censoring_time, events=list(s.event_times))
            for pid, s in data.processes
        ]
    )


@app.post("/bridge", response_model=BridgeResponse)
def bridge_endpoint(req: BridgeRequest) -> BridgeResponse:
    series = api.single_series(req.data.to_domain())
    pts = api.bridge_points(series, req.gamma)
    return BridgeResponse(points=[BridgePoint(s=s, value=v) for s, v in pts])
