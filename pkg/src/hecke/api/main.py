from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, ValidationError
from typing import List, Dict, Any, Optional
import logging

from src.hecke.cli import RunConfig, cmd_satake_multiply, cmd_satake_presentation, cmd_verify
from src.hecke.core.errors import HeckeError, InputError, NonUnitError, RegimeError
from src.hecke.infrastructure.monitoring import get_health_status, metrics_collector
from src.hecke.verification.suites import SUITE_NAMES

app = FastAPI(title="Derived Hecke Algebra API", version="1.0.0")

# Setup logger
logger = logging.getLogger(__name__)


# Pydantic models for request/response
class RegimeParams(BaseModel):
    group: str = "PGL2"
    q: int = 7
    ell: int = 3
    r: int = 1
    max_degree: int = 4


class MultiplyRequest(RegimeParams):
    elements: List[Dict[str, Any]]


class PresentationRequest(RegimeParams):
    support: int = 2


class VerifyRequest(BaseModel):
    q: Optional[int] = None
    ell: Optional[int] = None
    r: Optional[int] = None
    depth: Optional[int] = None
    support: Optional[int] = None
    max_degree: Optional[int] = None
    precision: Optional[int] = None


class SuiteResult(BaseModel):
    suite: str
    checks_passed: int
    checks_failed: int
    witnesses: List[Dict[str, Any]]
    details: Dict[str, Any]


class VerifyResponse(BaseModel):
    passed: bool
    reports: List[SuiteResult]


def _config(**fields) -> RunConfig:
    try:
        return RunConfig(**{k: v for k, v in fields.items() if v is not None})
    except ValidationError as e:
        raise HTTPException(status_code=400, detail=f"Invalid parameters: {e}")


def _handle(endpoint: str, e: Exception):
    """Map library errors onto HTTP status codes"""
    if isinstance(e, RegimeError):
        metrics_collector.record_error(endpoint, str(e), "regime")
        raise HTTPException(status_code=422, detail=f"Regime violation: {str(e)}")
    if isinstance(e, (InputError, NonUnitError)):
        metrics_collector.record_error(endpoint, str(e), "input")
        raise HTTPException(status_code=400, detail=f"Invalid input: {str(e)}")
    logger.error(f"{endpoint} failed: {e}")
    raise HTTPException(status_code=500, detail=f"{endpoint} failed: {str(e)}")


@app.get("/")
async def root():
    return {"message": "Derived Hecke Algebra API", "version": "1.0.0", "suites": SUITE_NAMES}


@app.get("/health")
async def health_check():
    return get_health_status()


@app.post("/satake/multiply")
async def satake_multiply(request: MultiplyRequest):
    """Convolution of toral or spherical elements"""
    config = _config(**request.model_dump(exclude={"elements"}))
    try:
        return cmd_satake_multiply(config, request.elements)
    except HeckeError as e:
        _handle("satake/multiply", e)


@app.post("/satake/presentation")
async def satake_presentation(request: PresentationRequest):
    """Invariant ranks per shell and degree"""
    config = _config(**request.model_dump())
    try:
        return cmd_satake_presentation(config)
    except HeckeError as e:
        _handle("satake/presentation", e)


@app.post("/verify/{suite}", response_model=VerifyResponse)
async def verify(suite: str, request: Optional[VerifyRequest] = None):
    """Run one suite; failed checks come back as passed: false with witnesses"""
    if suite not in SUITE_NAMES and suite != "all":
        raise HTTPException(status_code=404, detail=f"Unknown suite {suite}")
    overrides = request.model_dump(exclude_none=True) if request else {}
    config = _config(suite=[suite], **overrides)
    try:
        return cmd_verify(config, overrides)
    except HeckeError as e:
        _handle(f"verify/{suite}", e)


if __name__ == "__main__":
    import uvicorn
    uvicorn.run(app, host="0.0.0.0", port=8000)
