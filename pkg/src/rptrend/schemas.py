"""Pydantic request/response models for the HTTP service."""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field

from .data import EventSeries, MultiProcessData


class ProcessIn(BaseModel):
    id: str
    tau: float = Field(gt=0)
    events: list[float]


class DataIn(BaseModel):
    """Either inline processes or the name of a bundled dataset."""

    processes: list[ProcessIn] | None = None
    dataset: str | None = None

    def to_domain(self) -> MultiProcessData:
        from .datasets import load_dataset

        if (self.processes is None) == (self.dataset is None):
            raise ValueError("provide exactly one of 'processes' or 'dataset'")
        if self.dataset is not None:
            return load_dataset(self.dataset)
        return MultiProcessData(
            tuple(
                (p.id, EventSeries(tuple(sorted(p.events)), p.tau))
                for p in self.processes
            )
        )


EstimatorName = Literal["sample", "censored", "diff", "weibull"]
TestName = Literal["lr", "ks", "cvm", "ad", "elr", "lrm", "gl", "cvmm", "elrm"]


class EstimatesOut(BaseModel):
    mu: float
    sigma: float
    gamma: float
    method: str


class EstimateRequest(BaseModel):
    data: DataIn
    estimator: EstimatorName = "sample"
    pooled: bool = False


class TestRequest(BaseModel):
    data: DataIn
    test: TestName = "lr"
    estimator: EstimatorName = "sample"
    a: float = Field(default=0.5, ge=0.0, le=1.0)
    pooled: bool = False
    sidedness: Literal["two_sided", "greater", "less"] = "two_sided"
    pvalue: Literal["asymptotic", "permutation"] = "asymptotic"
    permutations: int = Field(default=999, ge=99)
    seed: int = 0


class TestResponse(BaseModel):
    test: str
    statistic: float
    p_value: float
    p_method: str
    sidedness: str | None
    n_effective: int


class SimulateRequest(BaseModel):
    trend: Literal["powerlaw", "bathtub", "constant"] = "powerlaw"
    b: float = 1.0
    c: float = 0.0
    d: float = 1.0
    e: float | None = None
    shape: float = Field(default=1.0, gt=0)
    tau: float | None = Field(default=None, gt=0)
    expected_n: float | None = Field(default=None, gt=0)
    seed: int = 0
    reps: int = Field(default=1, ge=1, le=1000)


class SimulateResponse(BaseModel):
    processes: list[ProcessIn]


class BridgeRequest(BaseModel):
    data: DataIn
    gamma: float = Field(default=1.0, gt=0)


class BridgePoint(BaseModel):
    s: float
    value: float


class BridgeResponse(BaseModel):
    """Path values just after each jump, plus the endpoints."""

    points: list[BridgePoint]
