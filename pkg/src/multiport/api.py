"""HTTP front end. Run with ``multiport serve`` or ``uvicorn multiport.api:app``."""

from __future__ import annotations

from fastapi import FastAPI, HTTPException
from fastapi.responses import Response

from . import __version__, service
from .core import DimensionError, PhaseError, PortError
from .fock import PhotonNumberError
from .formatting import to_json
from .schemas import CheckRequest, MultiphotonRequest, SimulateRequest, SweepRequest, SynthesizeRequest

app = FastAPI(title="multiport", version=__version__)

_DOMAIN_ERRORS = (service.InvalidInput, DimensionError, PhaseError, PortError, PhotonNumberError)


def _run(fn, req) -> Response:
    try:
        rep = fn(req)
    except _DOMAIN_ERRORS as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from None
    return Response(
        content=to_json(rep.as_dict()),
        media_type="application/json",
        headers={"X-Exit-Code": str(rep.exit_code)},
    )


@app.get("/health")
def health():
    return {"status": "ok", "version": __version__}


@app.post("/simulate")
def simulate(req: SimulateRequest):
    return _run(service.simulate, req)


@app.post("/check")
def check(req: CheckRequest):
    return _run(service.check, req)


@app.post("/synthesize")
def synthesize(req: SynthesizeRequest):
    return _run(service.synthesize, req)


@app.post("/multiphoton")
def multiphoton(req: MultiphotonRequest):
    return _run(service.multiphoton, req)


@app.post("/sweep")
def sweep(req: SweepRequest):
    return _run(service.sweep, req)
