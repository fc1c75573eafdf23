"""FastAPI application exposing every workbench operation.

Routes come from the shared operation registry.  Error mapping: semantic
input problems give 422, resource-budget trips give 507, and a failed
witness recheck gives 500 with a verification marker.
"""

from importlib.metadata import PackageNotFoundError, version

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from ..budget import ResourceBudgetError, VerificationError
from . import models as m
from .ops import OPERATIONS, Operation


def _endpoint(op: Operation):
    def run(req: op.request_model):  # type: ignore[name-defined]
        return op.handler(req)
    run.__name__ = op.path.strip("/").replace("/", "_").replace("-", "_")
    return run


def _package_version() -> str:
    try:
        return version("tuplesieve")
    except PackageNotFoundError:
        return "0.0.0"


def create_app() -> FastAPI:
    app = FastAPI(title="tuplesieve", version=_package_version(),
                  description="Prime tuple sieve weights, correlation sums, and positivity detectors")

    @app.exception_handler(ValueError)
    async def _value_error(request: Request, exc: ValueError):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.exception_handler(ResourceBudgetError)
    async def _budget_error(request: Request, exc: ResourceBudgetError):
        return JSONResponse(status_code=507, content={"detail": str(exc), "code": "resource"})

    @app.exception_handler(VerificationError)
    async def _verify_error(request: Request, exc: VerificationError):
        return JSONResponse(status_code=500, content={"detail": str(exc), "code": "verification"})

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.get("/meta", response_model=m.MetaResponse)
    def meta():
        return m.MetaResponse(package="tuplesieve", version=_package_version())

    for op in OPERATIONS.values():
        response_model = op.handler.__annotations__.get("return")
        app.post(op.path, response_model=response_model, summary=op.summary)(_endpoint(op))
    return app


app = create_app()
