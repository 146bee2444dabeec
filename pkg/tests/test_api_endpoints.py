import pytest
from fastapi.testclient import TestClient

from app.core.dependencies import get_model_repository_dependency
from app.main import app
from app.repositories import InMemoryModelRepository


@pytest.fixture
def api_client():
    client = TestClient(app)
    yield client
    app.dependency_overrides.clear()


@pytest.fixture
def gaussian_only_client(repository):
    subset = InMemoryModelRepository((repository.get_model("gaussian_r4"),))
    app.dependency_overrides[get_model_repository_dependency] = lambda: subset

    client = TestClient(app)
    yield client

    app.dependency_overrides.clear()


def test_root_and_health(api_client: TestClient):
    assert api_client.get("/health").json() == {"status": "healthy"}
    assert api_client.get("/").json()["message"] == "curv4 API"


def test_list_models(api_client: TestClient):
    response = api_client.get("/api/v1/catalog")

    assert response.status_code == 200
    body = response.json()
    assert len(body) == 5
    round_s4 = next(entry for entry in body if entry["name"] == "round_s4")
    assert round_s4["compact"] is True
    assert round_s4["scalar_curvature"] == "2"


def test_list_models_uses_injected_repository(gaussian_only_client: TestClient):
    body = gaussian_only_client.get("/api/v1/catalog").json()

    assert [entry["name"] for entry in body] == ["gaussian_r4"]
    assert gaussian_only_client.get("/api/v1/catalog/round_s4/verify").status_code == 404


def test_verify_round_sphere_exactly(api_client: TestClient):
    response = api_client.get("/api/v1/catalog/round_s4/verify", params={"precision": "rational", "points": 10})

    assert response.status_code == 200
    body = response.json()
    assert body["passed"] is True
    assert body["precision"] == "rational"
    assert all(report["residual_text"] == "0" for report in body["reports"])


def test_verify_unknown_model(api_client: TestClient):
    response = api_client.get("/api/v1/catalog/hyperbolic_h4/verify")

    assert response.status_code == 404
    assert response.json()["detail"]["code"] == "unknown_model"


def test_verify_rejects_empty_sample(api_client: TestClient):
    response = api_client.get("/api/v1/catalog/round_s4/verify", params={"points": 0})

    assert response.status_code == 422


def test_classify_cylinder(api_client: TestClient):
    payload = {"model": "cylinder_s3xr", "gamma": 1.5, "precision": "rational"}

    response = api_client.post("/api/v1/checks/classify", json=payload)

    assert response.status_code == 200
    reports = {report["condition_id"]: report for report in response.json()["reports"]}
    assert reports["catino_12"]["margin"] == 0.0
    assert reports["catino_12"]["satisfied"] is True
    assert reports["catino_13"]["extra"]["gamma"] == 1.5
    assert reports["thm1_plus"]["equality_diagnosis"] == "weyl_vanishes"


def test_classify_rejects_nonpositive_gamma(api_client: TestClient):
    response = api_client.post("/api/v1/checks/classify", json={"model": "round_s4", "gamma": 0.0})

    assert response.status_code == 422


def test_fuzz(api_client: TestClient):
    response = api_client.post("/api/v1/checks/fuzz", json={"trials": 500, "seed": 11})

    assert response.status_code == 200
    body = response.json()
    assert body["violations"] == 0
    assert body["trials"] == 500
    assert body["seed"] == 11
