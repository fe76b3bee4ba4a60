#!/usr/bin/env python3
"""
Tests for the verification API endpoints, called in-process.
"""

import asyncio
import io
import json

import pytest
from fastapi import HTTPException, UploadFile

from api_polya_verification import (
    CertifyRequest,
    RectangleRequest,
    TriangleRequest,
    certify,
    certify_upload,
    compute_rectangle,
    compute_triangle,
    get_cases,
    health_check,
    replay,
    root,
)


def test_root_and_health():
    """Test the info and health endpoints"""
    print("🏥 Testing health check...")
    info = asyncio.run(root())
    assert "/certify" in info["endpoints"]
    health = asyncio.run(health_check())
    print(f"   status: {health['status']}")
    assert health["status"] == "healthy"
    assert health["corner_value"] == "501126/495785"
    assert health["cases"] == 10
    assert abs(health["pi"] - 3.141592653589793) < 1e-15


def test_cases_endpoint():
    result = asyncio.run(get_cases())
    assert result["count"] == len(result["cases"]) == 10


def test_compute_endpoints():
    print("📐 Testing compute endpoints...")
    rect = asyncio.run(compute_rectangle(RectangleRequest(a=1.0, b=1.0, terms=128)))
    assert abs(rect["F"] - 0.69372) < 5e-5

    tri = asyncio.run(compute_triangle(TriangleRequest(a=0.5, b=0.8660254037844386, level=5)))
    assert tri["class"] == "Equilateral"
    assert abs(tri["F"] - 0.6579736267392906) < 1e-3

    with pytest.raises(HTTPException) as info:
        asyncio.run(compute_triangle(TriangleRequest(a=0.5, b=0.0005)))
    assert info.value.status_code == 422


def test_certify_endpoints():
    print("🧾 Testing certification endpoints...")
    ok = asyncio.run(certify(CertifyRequest(coeffs=["-1", "0", "1"], dx="1/2")))
    assert ok.success
    assert ok.pieces[-1]["hi"] == "1/2"

    failed = asyncio.run(certify(CertifyRequest(coeffs=["-1", "0", "1"], dx="2", depth=5)))
    assert not failed.success
    assert failed.failure_witness["lo"] == "1/1"

    with pytest.raises(HTTPException) as info:
        asyncio.run(certify(CertifyRequest(coeffs=["-1", "x"], dx="1/2")))
    assert info.value.status_code == 422

    upload = UploadFile(file=io.BytesIO(json.dumps({"coeffs": ["-1", "1"]}).encode("utf-8")),
                        filename="poly.json")
    uploaded = asyncio.run(certify_upload(file=upload, dx="1/2", depth=None))
    assert uploaded.success


def test_replay_endpoint():
    report = asyncio.run(replay("obtuse-2"))
    assert report["verdict"] == "Verified"
    with pytest.raises(HTTPException) as info:
        asyncio.run(replay("nope"))
    assert info.value.status_code == 422


def main():
    """Run all API tests"""
    print("🧪 API TESTS")
    print("=" * 50)
    test_root_and_health()
    test_cases_endpoint()
    test_compute_endpoints()
    test_certify_endpoints()
    test_replay_endpoint()
    print("\n🎉 All API tests passed!")


if __name__ == "__main__":
    main()
