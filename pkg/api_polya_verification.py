#!/usr/bin/env python3
"""
FastAPI service over the verification toolkit
"""

import json
import logging
from fractions import Fraction
from typing import Dict, List, Optional

import uvicorn
from fastapi import FastAPI, File, Form, HTTPException, UploadFile
from pydantic import BaseModel, Field

from constants import enclose, warm_up
from errors import DepthExhausted, PolyaVerifyError
from geometry import Triangle, classify
from harness import case_function, list_cases, replay_case
from pde_oracle import MAX_LEVEL, spectral
from polya_verify import rectangle_payload
from polycert import certificate_to_json, certify_nonpositive, failure_to_json, parse_rational, poly_from_json
from settings import load_settings

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

# Initialize FastAPI app
app = FastAPI(
    title="Polya Functional Verification API",
    description="Closed forms, certified polynomial inequalities, finite element oracle and case replays "
                "for the Polya functional on triangles, rectangles and sectors",
    version="1.0.0"
)

settings = load_settings()
logging.getLogger().setLevel(settings.log_level)


@app.on_event("startup")
async def fill_enclosure_table():
    """Compute the constant enclosures once, before the first request"""
    warm_up()


# Pydantic models for request/response
class TriangleRequest(BaseModel):
    a: float = Field(ge=0.0)
    b: float = Field(gt=0.0)
    level: Optional[int] = Field(None, ge=2, le=MAX_LEVEL)


class RectangleRequest(BaseModel):
    a: float = Field(gt=0.0)
    b: float = Field(gt=0.0)
    terms: Optional[int] = Field(None, ge=1)
    fem_level: Optional[int] = Field(None, ge=2, le=MAX_LEVEL)


class CertifyRequest(BaseModel):
    coeffs: List[str]
    dx: str
    depth: Optional[int] = Field(None, ge=0)


class CertificateResponse(BaseModel):
    success: bool
    dx: str
    depth: int
    pieces: List[Dict[str, str]]
    failure_witness: Optional[Dict[str, Optional[str]]] = None


def _http_error(action: str, e: Exception) -> HTTPException:
    if isinstance(e, PolyaVerifyError):
        logger.warning(f"Rejected while {action}: {e}")
        return HTTPException(status_code=422, detail=f"Error {action}: {str(e)}")
    logger.exception(f"Failure while {action}")
    return HTTPException(status_code=500, detail=f"Error {action}: {str(e)}")


def _certify(coeffs, dx_text: str, depth: Optional[int]) -> CertificateResponse:
    poly = poly_from_json(coeffs)
    dx = parse_rational(dx_text)
    depth = settings.cert_max_depth if depth is None else depth
    try:
        payload = certificate_to_json(certify_nonpositive(poly, dx, depth))
    except DepthExhausted as e:
        payload = failure_to_json(dx, e)
    return CertificateResponse(**payload)


@app.get("/")
async def root():
    """Root endpoint with API information"""
    return {
        "message": "Polya Functional Verification API",
        "version": "1.0.0",
        "endpoints": {
            "/docs": "API documentation",
            "/health": "Service status and self-check",
            "/cases": "Replay case registry",
            "/compute/triangle": "Finite element lambda1, T and F of a triangle",
            "/compute/rectangle": "Series values for a rectangle, optionally with the oracle",
            "/certify": "Certify P <= 0 on (0, dx] for rational coefficients",
            "/certify/upload": "Certify a polynomial uploaded as a JSON file",
            "/replay/{case_id}": "Replay one case chain"
        }
    }


@app.get("/cases")
async def get_cases():
    """List the replay cases"""
    try:
        cases = list_cases()
        return {"cases": cases, "count": len(cases)}
    except Exception as e:
        raise _http_error("listing cases", e)


@app.post("/compute/triangle")
async def compute_triangle(request: TriangleRequest):
    """Finite element values of the triangle with apex (a, b)"""
    try:
        tri = Triangle(request.a, request.b)
        result = spectral(tri, request.level or settings.fem_max_level)
        return {**result.to_dict(), "a": request.a, "b": request.b, "class": classify(tri).value}
    except Exception as e:
        raise _http_error("computing triangle", e)


@app.post("/compute/rectangle")
async def compute_rectangle(request: RectangleRequest):
    """Series values for (-a, a) x (-b, b)"""
    try:
        return rectangle_payload(request.a, request.b, request.terms or settings.series_terms, request.fem_level)
    except Exception as e:
        raise _http_error("computing rectangle", e)


@app.post("/certify", response_model=CertificateResponse)
async def certify(request: CertifyRequest):
    """Certify nonpositivity; a failed certification is returned with its witness"""
    try:
        return _certify(request.coeffs, request.dx, request.depth)
    except Exception as e:
        raise _http_error("certifying polynomial", e)


@app.post("/certify/upload", response_model=CertificateResponse)
async def certify_upload(
    file: UploadFile = File(...),
    dx: str = Form(...),
    depth: Optional[int] = Form(None)
):
    """Upload a polynomial JSON file and certify it"""
    try:
        content = await file.read()
        coeffs = json.loads(content.decode("utf-8"))
        return _certify(coeffs, dx, depth)
    except Exception as e:
        raise _http_error("certifying uploaded polynomial", e)


@app.post("/replay/{case_id}")
async def replay(case_id: str):
    """Replay one case and return its report"""
    try:
        return replay_case(case_id, settings).to_dict()
    except Exception as e:
        raise _http_error(f"replaying {case_id}", e)


@app.get("/health")
async def health_check():
    """Health check endpoint"""
    try:
        pi = enclose("pi")
        g = case_function("acute-1a.g", (Fraction(1, 2), Fraction(29, 10)))
        return {
            "status": "healthy",
            "pi": float(pi),
            "pi_width": float(pi.width),
            "corner_value": f"{g.numerator}/{g.denominator}",
            "cases": len(list_cases())
        }
    except Exception as e:
        return {
            "status": "unhealthy",
            "error": str(e)
        }


if __name__ == "__main__":
    uvicorn.run(app, host="0.0.0.0", port=8000)
