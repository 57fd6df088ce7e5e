"""FastAPI application exposing the toolkit over HTTP.

Domain validation problems map to 422, numerical/computational failures to
500; both return a one-line ``detail``.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from ..errors import ComputationError, InputError
from . import handlers
from . import models as m


def create_app() -> FastAPI:
    app = FastAPI(
        title="synthcost",
        description="Run-length constrained strands and synthesis-cost analysis",
        version="1",
    )

    @app.exception_handler(InputError)
    async def _input_error(request: Request, exc: InputError) -> JSONResponse:
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.exception_handler(ComputationError)
    async def _computation_error(request: Request, exc: ComputationError) -> JSONResponse:
        return JSONResponse(status_code=500, content={"detail": str(exc)})

    @app.get("/v1/health", response_model=m.HealthResponse)
    async def health() -> m.HealthResponse:
        return handlers.health()

    @app.post("/v1/capacity", response_model=m.CapacityResponse, response_model_by_alias=True)
    async def capacity(req: m.CapacityRequest) -> m.CapacityResponse:
        return handlers.capacity(req)

    @app.post("/v1/eigenvector", response_model=m.EigenvectorResponse, response_model_by_alias=True)
    async def eigenvector(req: m.EigenvectorRequest) -> m.EigenvectorResponse:
        return handlers.eigenvector(req)

    @app.post("/v1/sample", response_model=m.SampleResponse)
    async def sample(req: m.SampleRequest) -> m.SampleResponse:
        return handlers.sample(req)

    @app.post("/v1/cost", response_model=m.CostResponse)
    async def cost(req: m.CostRequest) -> m.CostResponse:
        return handlers.cost(req)

    @app.post("/v1/scs", response_model=m.ScsResponse)
    async def scs(req: m.ScsRequest) -> m.ScsResponse:
        return handlers.scs(req)

    @app.post("/v1/graph", response_model=m.GraphResponse)
    async def graph(req: m.GraphRequest) -> m.GraphResponse:
        return handlers.graph(req)

    @app.post("/v1/experiment", response_model=m.ExperimentResponse)
    async def experiment(req: m.ExperimentRequest) -> m.ExperimentResponse:
        return handlers.experiment(req)

    return app
