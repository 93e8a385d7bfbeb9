"""HTTP front end exposing the compute handlers.

Every endpoint is a pure POST: the request carries the full run
configuration, the response carries the rendered documents.  Nothing is
stored server-side, so any number of workers can serve the same routes.

Run locally with:  uvicorn squeezekit.api:app
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from . import __version__
from .config import ConfigError
from .drift import DelayScanError
from .quadrature import QuadratureError
from .service import (
    BudgetRequest,
    BudgetResponse,
    DelayScanRequest,
    DelayScanResponse,
    FitRequest,
    FitResponse,
    SpectrumRequest,
    SpectrumResponse,
    run_budget,
    run_delay_scan,
    run_fit,
    run_spectrum,
)

app = FastAPI(
    title="squeezekit",
    version=__version__,
    description=(
        "Detuned OPO squeezing spectra, drift-lineshape averaging, "
        "group-delay budgets, and delay-scan fitting."
    ),
)


def _call(handler, req):
    try:
        return handler(req)
    except (ConfigError, ValueError) as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    except (QuadratureError, DelayScanError) as exc:
        raise HTTPException(status_code=500, detail=str(exc)) from exc


@app.get("/healthz")
def healthz() -> dict:
    return {"status": "ok", "version": __version__}


@app.post("/v1/spectrum", response_model=SpectrumResponse)
def spectrum(req: SpectrumRequest) -> SpectrumResponse:
    return _call(run_spectrum, req)


@app.post("/v1/delay-scan", response_model=DelayScanResponse)
def delay_scan(req: DelayScanRequest) -> DelayScanResponse:
    return _call(run_delay_scan, req)


@app.post("/v1/budget", response_model=BudgetResponse)
def budget(req: BudgetRequest) -> BudgetResponse:
    return _call(run_budget, req)


@app.post("/v1/fit", response_model=FitResponse)
def fit(req: FitRequest) -> FitResponse:
    return _call(run_fit, req)
