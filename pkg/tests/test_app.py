"""Tests for the HTTP API."""
import sys
from pathlib import Path

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent.parent))

import numpy as np
import pytest
from fastapi.testclient import TestClient

from hypersync.app import app


@pytest.fixture
def client():
    return TestClient(app)


class TestEndpoints:
    """Test the API endpoints."""

    def test_root(self, client):
        """Test the root endpoint lists the routes."""
        response = client.get("/")
        assert response.status_code == 200
        assert "simulate" in response.json()["endpoints"]

    def test_health(self, client):
        """Test the health check."""
        response = client.get("/health")
        assert response.status_code == 200
        data = response.json()
        assert data["status"] == "healthy"
        assert data["resonance_tol"] == 1e-6

    def test_classify(self, client):
        """Test classification of a two-cluster state."""
        phases = [0.0] * 9 + [float(np.pi)]
        response = client.post("/classify", json={"phases": phases})
        assert response.status_code == 200
        data = response.json()
        assert data["kind"] == "two_cluster"
        assert data["larger_fraction"] == pytest.approx(0.9)

    def test_simulate(self, client):
        """Test a short controlled run."""
        response = client.post("/simulate", json={"n": 5, "t_end": 2.0, "mode": "full", "seed": 1})
        assert response.status_code == 200
        data = response.json()
        assert data["status"] == "success"
        assert 0.0 <= data["r_hat"] <= 1.0
        assert data["samples"] == 21
        assert data["cost"] is not None

    def test_simulate_uncontrolled(self, client):
        """Test an uncontrolled run has zero intensity and no cost."""
        response = client.post("/simulate", json={"n": 5, "t_end": 2.0, "mode": "none"})
        assert response.status_code == 200
        data = response.json()
        assert data["mean_intensity"] == 0.0
        assert data["cost"] is None

    def test_simulate_infeasible_structure(self, client):
        """Test infeasible generator targets are client errors."""
        response = client.post(
            "/simulate", json={"topology": "random_sc", "n": 5, "k1_deg": 10, "k2_deg": 1, "t_end": 2.0}
        )
        assert response.status_code == 400

    def test_simulate_invalid_request(self, client):
        """Test request validation."""
        response = client.post("/simulate", json={"n": 1})
        assert response.status_code == 422

    def test_validate(self, client):
        """Test the self-checks over HTTP."""
        response = client.post("/validate", json={"flip_sign": False})
        assert response.status_code == 200
        data = response.json()
        assert data["passed"] is True
        assert len(data["checks"]) == 9
