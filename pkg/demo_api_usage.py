#!/usr/bin/env python3
"""
Demo script showing how to use the Polya Functional Verification API
"""

import json
import os
import tempfile
from typing import Any, Dict, List, Optional

import requests


class PolyaVerificationAPI:
    def __init__(self, base_url: str = "http://localhost:8000"):
        self.base_url = base_url

    def health_check(self) -> Dict[str, Any]:
        """Check API health"""
        response = requests.get(f"{self.base_url}/health")
        return response.json()

    def get_cases(self) -> Dict[str, Any]:
        """Get the replay case registry"""
        response = requests.get(f"{self.base_url}/cases")
        return response.json()

    def compute_triangle(self, a: float, b: float, level: Optional[int] = None) -> Dict[str, Any]:
        """Finite element values for the triangle with apex (a, b)"""
        payload = {"a": a, "b": b}
        if level is not None:
            payload["level"] = level
        response = requests.post(f"{self.base_url}/compute/triangle", json=payload)
        return response.json()

    def compute_rectangle(self, a: float, b: float, terms: int = 64) -> Dict[str, Any]:
        """Series values for the rectangle (-a, a) x (-b, b)"""
        response = requests.post(f"{self.base_url}/compute/rectangle", json={"a": a, "b": b, "terms": terms})
        return response.json()

    def certify(self, coeffs: List[str], dx: str, depth: int = 40) -> Dict[str, Any]:
        """Certify P <= 0 on (0, dx]"""
        payload = {"coeffs": coeffs, "dx": dx, "depth": depth}
        response = requests.post(f"{self.base_url}/certify", json=payload)
        return response.json()

    def certify_file(self, file_path: str, dx: str) -> Dict[str, Any]:
        """Upload a polynomial JSON file and certify it"""
        with open(file_path, 'rb') as f:
            files = {"file": f}
            response = requests.post(f"{self.base_url}/certify/upload", files=files, data={"dx": dx})
            return response.json()

    def replay(self, case_id: str) -> Dict[str, Any]:
        """Replay one case chain"""
        response = requests.post(f"{self.base_url}/replay/{case_id}")
        return response.json()


def main():
    """Demo the API functionality"""
    print("🚀 Polya Functional Verification API Demo")
    print("=" * 50)

    api = PolyaVerificationAPI(os.environ.get("POLYA_API_URL", "http://localhost:8000"))

    try:
        # 1. Health check
        print("1. Health Check")
        health = api.health_check()
        print(f"   Status: {health['status']}")
        print(f"   g(1/2, 29/10) = {health.get('corner_value')}")
        print()

        # 2. Cases
        print("2. Replay Cases")
        cases = api.get_cases()
        for case in cases['cases']:
            print(f"   {case['id']}: {case['title']}")
        print()

        # 3. Equilateral triangle
        print("3. Equilateral Triangle (oracle)")
        tri = api.compute_triangle(0.5, 3 ** 0.5 / 2, level=6)
        print(f"   lambda1 = {tri['lambda1']:.6f}, T = {tri['T']:.8f}, F = {tri['F']:.6f}")
        print()

        # 4. Square
        print("4. Square (series)")
        rect = api.compute_rectangle(1.0, 1.0)
        print(f"   T = {rect['T']:.6f} +- {rect['T_tail']:.1e}, F = {rect['F']:.6f}")
        print()

        # 5. Certify x^2 - 1 <= 0 on (0, 1/2], then from a file on (0, 2]
        print("5. Certification")
        result = api.certify(["-1", "0", "1"], "1/2")
        print(f"   (0, 1/2]: success={result['success']}, pieces={len(result['pieces'])}")
        with tempfile.NamedTemporaryFile(mode='w', suffix='.json', delete=False) as f:
            json.dump({"coeffs": ["-1", "0", "1"]}, f)
            temp_file = f.name
        try:
            result = api.certify_file(temp_file, "2")
            print(f"   (0, 2]: success={result['success']}, witness={result['failure_witness']}")
        finally:
            os.unlink(temp_file)
        print()

        # 6. Replay
        print("6. Replay obtuse-2")
        report = api.replay("obtuse-2")
        print(f"   Verdict: {report['verdict']}")
        for item in report['evidence']:
            print(f"     [{item['method']}] {item['check']}: {'ok' if item['passed'] else 'FAILED'}")
        print()

        print("✅ Demo completed successfully!")
        print(f"\n📖 Full API documentation: {api.base_url}/docs")
        print(f"🔗 Health check: {api.base_url}/health")

    except requests.exceptions.ConnectionError:
        print("❌ Could not connect to API. Make sure the server is running:")
        print("   python3 api_polya_verification.py")
    except Exception as e:
        print(f"❌ Error during demo: {e}")


if __name__ == "__main__":
    main()
