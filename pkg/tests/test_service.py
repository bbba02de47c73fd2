import math

import pytest
from fastapi.testclient import TestClient

from bandlab.service import create_app


@pytest.fixture(scope="module")
def client():
    with TestClient(create_app()) as c:
        yield c


def test_health(client):
    r = client.get("/health")
    assert r.status_code == 200
    assert r.json()["status"] == "ok"


def test_count_band_basic(client):
    r = client.post("/count/band", json={"n": 2, "lambda": 5.0, "eps": 0.1})
    assert r.status_code == 200
    doc = r.json()
    assert doc["count"] == 20
    assert doc["lambda"] == 5.0
    assert doc["m_lo"] == 25 and doc["m_hi"] == 27
    assert "freqs" not in doc  # excluded when not listed


def test_count_band_lists_points_and_accepts_lam_name(client):
    r = client.post("/count/band",
                    json={"n": 2, "lam": 5.0, "eps": 0.1, "list_points": True})
    assert r.status_code == 200
    doc = r.json()
    assert len(doc["freqs"]) == doc["count"] == 20
    assert [5, 0] in doc["freqs"]


def test_count_band_oracle_agrees(client):
    body = {"n": 3, "lambda": 8.0, "eps": 0.5}
    fast = client.post("/count/band", json=body).json()
    oracle = client.post("/count/band", json={**body, "oracle": True}).json()
    assert fast["count"] == oracle["count"]


def test_count_ball_and_shell(client):
    r = client.post("/count/ball", json={"n": 2, "r": 2.0})
    doc = r.json()
    assert doc["count"] == 13
    assert doc["remainder"] == pytest.approx(13 - math.pi * 4, rel=1e-12)

    r = client.post("/count/shell", json={"n": 2, "m": 25})
    assert r.json()["multiplicity"] == 12


def test_exponents_inf_round_trip(client):
    r = client.post("/exponents", json={"n": 2, "ps": [6.0, "inf"]})
    assert r.status_code == 200
    profiles = r.json()["profiles"]
    assert profiles[0]["sigma"] == pytest.approx(1 / 6)
    assert profiles[1]["p"] == "inf"
    assert profiles[1]["sigma"] == pytest.approx(0.5)


def test_density_norms(client):
    r = client.post("/density/norms",
                    json={"n": 2, "lambda": 10.0, "eps": 0.5,
                          "dim": 3, "seed": 1, "qs": [1.0, 2.0]})
    assert r.status_code == 200
    doc = r.json()
    assert doc["cluster_size"] == 44
    assert doc["trace"] == pytest.approx(3.0, abs=1e-9)
    assert doc["norms"]["1.0"] == pytest.approx(3.0, rel=1e-9)
    lo, hi = doc["sup_bracket"]
    assert 0 < lo <= hi


def test_kernel_diagonal(client):
    r = client.post("/kernel/diagonal", json={"n": 2, "lambda": 50.0, "eps": 0.5})
    assert r.status_code == 200
    doc = r.json()
    assert doc["total"] > 0
    assert abs(doc["total"] - doc["reassembled"]) <= 1e-6 * doc["total"]
    assert doc["ratio_two_term"] > 0


def test_poisson_defaults(client):
    r = client.post("/kernel/poisson", json={"n": 2})
    assert r.status_code == 200
    assert r.json()["rel_discrepancy"] < 1e-4


def test_schatten_endpoint(client):
    body = {"n": 2, "lambda": 10.0, "eps": 0.5, "alpha": "inf", "seed": 3}
    r = client.post("/schatten", json=body)
    assert r.status_code == 200
    doc = r.json()
    assert doc["alpha"] == "inf"
    assert doc["value"] > 0
    assert doc["trace_identity_rel_err"] < 1e-10
    # alpha = 1 carries the two-term comparison
    r = client.post("/schatten", json={**body, "alpha": 1.0})
    assert r.json()["ratio"] > 0


def test_sweep_endpoint_document(client):
    r = client.post("/sweep", json={"n": 2, "mode": "counts",
                                    "lambda_min": 10, "lambda_max": 40,
                                    "points": 3})
    assert r.status_code == 200
    doc = r.json()
    assert set(doc) >= {"spec", "rows", "fit", "meta"}
    assert len(doc["rows"]) == 3
    assert doc["fit"]["C"] > 0
    assert doc["meta"]["config_hash"]


def test_validation_maps_to_400(client):
    r = client.post("/count/band", json={"n": 2, "lambda": -1.0, "eps": 0.1})
    assert r.status_code == 400
    assert "error" in r.json()
    r = client.post("/density/norms",
                    json={"n": 2, "lambda": 5.05, "eps": 0.04})  # empty band
    assert r.status_code == 400


def test_pydantic_rejection_maps_to_422(client):
    r = client.post("/count/band", json={"n": 9, "lambda": 5.0, "eps": 0.1})
    assert r.status_code == 422
    r = client.post("/count/band", json={"n": 2, "lambda": 5.0, "eps": 0.1,
                                         "bogus": 1})
    assert r.status_code == 422


def test_capacity_maps_to_413(client):
    r = client.post("/schatten", json={"n": 2, "lambda": 700.0, "eps": 1.0})
    assert r.status_code == 413
    assert r.json()["error"] == "CapacityError"


def test_range_guard_maps_to_400(client):
    r = client.post("/count/band", json={"n": 2, "lambda": 2e12, "eps": 0.1})
    assert r.status_code == 400
    assert r.json()["error"] == "RangeError"
